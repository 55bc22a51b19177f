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
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include "engine.hpp"

namespace flashsim {
namespace {

TEST(EventEngine, PopsEarliestFirst) {
  EventEngine<char> e;
  e.schedule('X', 5);
  e.schedule('Y', 3);
  EXPECT_EQ(e.advance()->payload, 'Y');
  EXPECT_EQ(e.advance()->payload, 'X');
  EXPECT_FALSE(e.advance());
}

TEST(EventEngine, EqualTimesFireInInsertionOrder) {
  EventEngine<char> e;
  e.schedule('X', 7);
  e.schedule('Y', 7);
  EXPECT_EQ(e.advance()->payload, 'X');
  EXPECT_EQ(e.advance()->payload, 'Y');
}

TEST(EventEngine, EmptyEngineIsComplete) {
  EventEngine<int> e;
  EXPECT_FALSE(e.advance());
  EXPECT_TRUE(e.empty());
  EXPECT_EQ(e.now(), 0u);
}

TEST(EventEngine, AdvanceMovesClock) {
  EventEngine<int> e;
  e.schedule(1, 10);
  EXPECT_EQ(e.now(), 0u);
  auto f = e.advance();
  EXPECT_EQ(f->time, 10u);
  EXPECT_EQ(e.now(), 10u);
}

TEST(EventEngine, SchedulingInThePastThrows) {
  EventEngine<int> e;
  e.schedule(1, 10);
  e.advance();
  try {
    e.schedule(2, 9);
    FAIL() << "expected SimulationError";
  } catch (const SimulationError& err) {
    EXPECT_EQ(err.kind(), SimulationError::Kind::SchedulingInPast);
  }
  EXPECT_NO_THROW(e.schedule(3, 10));
}

TEST(EventEngine, PopOrderMatchesStableSort) {
  std::mt19937_64 rng(42);
  EventEngine<int> e;
  std::vector<std::pair<Nanos, int>> oracle;
  for (int i = 0; i < 1000; ++i) {
    Nanos t = rng() % 200;
    e.schedule(i, t);
    oracle.emplace_back(t, i);
  }
  std::stable_sort(oracle.begin(), oracle.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [t, i] : oracle) {
    auto f = e.advance();
    ASSERT_TRUE(f);
    EXPECT_EQ(f->time, t);
    EXPECT_EQ(f->payload, i);
  }
  EXPECT_FALSE(e.advance());
}

TEST(EventEngine, TimeNeverDecreasesUnderInterleaving) {
  std::mt19937_64 rng(7);
  EventEngine<int> e;
  Nanos last = 0;
  int fired = 0;
  for (int step = 0; step < 5000; ++step) {
    if (rng() % 3 != 0) {
      e.schedule(step, e.now() + rng() % 50);
    } else if (auto f = e.advance()) {
      EXPECT_GE(f->time, last);
      last = f->time;
      ++fired;
    }
  }
  while (auto f = e.advance()) {
    EXPECT_GE(f->time, last);
    last = f->time;
    ++fired;
  }
  EXPECT_GT(fired, 0);
}

TEST(EventEngine, CancelSemantics) {
  EventEngine<int> e;
  auto id = e.schedule(1, 4);
  EXPECT_TRUE(e.cancel(id));
  EXPECT_FALSE(e.cancel(id));
  EXPECT_FALSE(e.advance());
}

TEST(EventEngine, CancelledPayloadsNeverFire) {
  std::mt19937_64 rng(3);
  EventEngine<int> e;
  std::set<int> cancelled;
  std::vector<EventId> ids;
  for (int i = 0; i < 500; ++i) ids.push_back(e.schedule(i, rng() % 100));
  for (int i = 0; i < 500; i += 3) {
    ASSERT_TRUE(e.cancel(ids[i]));
    cancelled.insert(i);
  }
  EXPECT_EQ(e.pending(), 500 - cancelled.size());
  std::size_t fired = 0;
  while (auto f = e.advance()) {
    EXPECT_FALSE(cancelled.count(f->payload)) << f->payload;
    ++fired;
  }
  EXPECT_EQ(fired, 500 - cancelled.size());
}

TEST(EventEngine, NextTimeSkipsCancelled) {
  EventEngine<int> e;
  auto a = e.schedule(1, 2);
  e.schedule(2, 9);
  e.cancel(a);
  EXPECT_EQ(e.next_time(), 9u);
}

}  // namespace
}  // namespace flashsim
