/*
  Copyright 2026 The FlashSim Authors

  Licensed under the Apache License, Version 2.0 (the "License");
  you may not use this file except in compliance with the License.
  You may obtain a copy of the License at

  http://www.apache.org/licenses/LICENSE-2.0

  Unless required by applicable law or agreed to in writing, software
  distributed under the License is distributed on an "AS IS" BASIS,
  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
  See the License for the specific language governing permissions and
  limitations under the License.
*/

#include <gtest/gtest.h>

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <tuple>

#include "host_os.hpp"

namespace flashsim {
namespace {

OsConfig cfg(OsPolicy p, std::uint32_t depth) {
  OsConfig c;
  c.policy = p;
  c.queue_depth = depth;
  return c;
}

TEST(HostOs, DepthOneForwardsOne) {
  HostOs os(cfg(OsPolicy::Fifo, 1));
  os.add_thread(0);
  os.submit(0, 1);
  os.submit(0, 2);
  EXPECT_EQ(os.dispatch(), (std::vector<IoId>{1}));
  EXPECT_EQ(os.pooled(), 1u);
  EXPECT_TRUE(os.dispatch().empty());
  os.on_interrupt(1);
  EXPECT_EQ(os.dispatch(), (std::vector<IoId>{2}));
  EXPECT_EQ(os.pooled(), 0u);
}

TEST(HostOs, FifoForwardsInSubmissionOrder) {
  HostOs os(cfg(OsPolicy::Fifo, 8));
  os.add_thread(0);
  os.add_thread(1);
  os.submit(1, 10);
  os.submit(0, 11);
  os.submit(1, 12, 9);
  EXPECT_EQ(os.dispatch(), (std::vector<IoId>{10, 11, 12}));
}

TEST(HostOs, DepthCapsOutstanding) {
  HostOs os(cfg(OsPolicy::Fifo, 4));
  os.add_thread(0);
  for (IoId i = 1; i <= 10; ++i) os.submit(0, i);
  EXPECT_EQ(os.dispatch().size(), 4u);
  EXPECT_EQ(os.outstanding(), 4u);
  EXPECT_TRUE(os.dispatch().empty());
  EXPECT_EQ(os.pooled(0), 6u);
}

TEST(HostOs, FairShareServesSmallThreadEarly) {
  HostOs os(cfg(OsPolicy::FairShare, 2));
  os.add_thread(0);
  os.add_thread(1);
  for (IoId i = 1; i <= 10; ++i) os.submit(0, i);
  os.submit(1, 100);
  auto first = os.dispatch();
  ASSERT_EQ(first.size(), 2u);
  EXPECT_NE(std::find(first.begin(), first.end(), 100u), first.end());
}

TEST(HostOs, PriorityForwardsHighestFirstAndRetags) {
  HostOs os(cfg(OsPolicy::Priority, 1));
  os.add_thread(0);
  os.submit(0, 1, 0);
  os.submit(0, 2, 5);
  os.submit(0, 3, 0);
  EXPECT_TRUE(os.tag_priority(3, 9));
  EXPECT_EQ(os.dispatch(), (std::vector<IoId>{3}));
  os.on_interrupt(3);
  EXPECT_EQ(os.dispatch(), (std::vector<IoId>{2}));
  EXPECT_FALSE(os.tag_priority(2, 1));  // already forwarded
  EXPECT_EQ(os.stale_tags(), 1u);
}

TEST(HostOs, UnknownInterruptIsViolation) {
  HostOs os(cfg(OsPolicy::Fifo, 1));
  EXPECT_THROW(os.on_interrupt(5), SimulationError);
  EXPECT_THROW(os.submit(3, 1), SimulationError);
  EXPECT_THROW(HostOs(cfg(OsPolicy::Fifo, 0)), ConfigError);
}

// Replays random submit/complete streams against simple per-policy models.
TEST(HostOs, PoliciesMatchReplayModels) {
  for (auto policy : {OsPolicy::Fifo, OsPolicy::Priority, OsPolicy::FairShare}) {
    std::mt19937_64 rng(static_cast<int>(policy) + 1);
    HostOs os(cfg(policy, 3));
    const int threads = 3;
    for (int t = 0; t < threads; ++t) os.add_thread(t);
    // Model state.
    std::vector<std::tuple<std::uint64_t, IoId, int, int>> pool;  // seq, id, prio, thread
    std::vector<IoId> outstanding;
    int cursor = 0;
    std::uint64_t seq = 0;
    IoId next = 1;
    auto model_pick = [&]() {
      std::size_t best = 0;
      if (policy == OsPolicy::Fifo) {
        for (std::size_t i = 1; i < pool.size(); ++i)
          if (std::get<0>(pool[i]) < std::get<0>(pool[best])) best = i;
      } else if (policy == OsPolicy::Priority) {
        for (std::size_t i = 1; i < pool.size(); ++i) {
          auto a = std::make_tuple(-std::get<2>(pool[i]), std::get<0>(pool[i]));
          auto b = std::make_tuple(-std::get<2>(pool[best]), std::get<0>(pool[best]));
          if (a < b) best = i;
        }
      } else {
        for (int k = 0; k < threads; ++k) {
          int t = (cursor + k) % threads;
          bool found = false;
          for (std::size_t i = 0; i < pool.size(); ++i) {
            if (std::get<3>(pool[i]) != t) continue;
            if (!found || std::get<0>(pool[i]) < std::get<0>(pool[best])) best = i;
            found = true;
          }
          if (found) {
            cursor = t + 1;
            break;
          }
        }
      }
      auto id = std::get<1>(pool[best]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
      return id;
    };
    for (int step = 0; step < 2000; ++step) {
      auto r = rng() % 3;
      if (r == 0 && !outstanding.empty()) {
        auto k = rng() % outstanding.size();
        os.on_interrupt(outstanding[k]);
        outstanding.erase(outstanding.begin() + static_cast<std::ptrdiff_t>(k));
      } else {
        int t = static_cast<int>(rng() % threads);
        int prio = static_cast<int>(rng() % 4);
        os.submit(t, next, prio);
        pool.push_back({seq++, next, prio, t});
        ++next;
      }
      std::vector<IoId> want;
      while (outstanding.size() + want.size() < 3 && !pool.empty()) want.push_back(model_pick());
      auto got = os.dispatch();
      ASSERT_EQ(got, want) << "policy " << to_string(policy) << " step " << step;
      outstanding.insert(outstanding.end(), got.begin(), got.end());
    }
  }
}

TEST(MessageBus, RoutesRegisteredKinds) {
  MessageBus bus;
  int seen = 0;
  bus.register_kind("PING", [&](ThreadId from, const Message& m) {
    EXPECT_EQ(from, 4);
    EXPECT_EQ(m.fields.at("x"), "1");
    ++seen;
  });
  Message m;
  m.kind = "PING";
  m.fields["x"] = "1";
  bus.deliver(4, m);
  EXPECT_EQ(seen, 1);
  m.kind = "PONG";
  EXPECT_THROW(bus.deliver(4, m), SimulationError);
  EXPECT_THROW(bus.register_kind("PING", nullptr), ConfigError);
}

TEST(OsPolicy, ParseRoundTrips) {
  for (auto p : {OsPolicy::Fifo, OsPolicy::Priority, OsPolicy::FairShare})
    EXPECT_EQ(parse_os_policy(to_string(p)), p);
  EXPECT_THROW(parse_os_policy("lifo"), ConfigError);
}

}  // namespace
}  // namespace flashsim
