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
#include <random>
#include <tuple>
#include <vector>

#include "scheduler.hpp"

namespace flashsim {
namespace {

// Every LUN runs at most one IO per dispatch pass; `stuck` LUNs run none.
struct FakeDispatcher : Dispatcher {
  std::vector<bool> busy;
  std::vector<bool> stuck;
  std::vector<IoId> started;
  explicit FakeDispatcher(std::uint32_t luns) : busy(luns, false), stuck(luns, false) {}

  TryResult try_start(IoRequest& io, Nanos now) override {
    auto lun = static_cast<std::uint32_t>(*io.lpn);
    if (busy[lun] || stuck[lun]) return TryResult::Blocked;
    busy[lun] = true;
    io.exec_started = now;
    started.push_back(io.id);
    return TryResult::Started;
  }
  std::optional<std::uint32_t> target_lun(const IoRequest& io) const override {
    return static_cast<std::uint32_t>(*io.lpn);
  }
  bool lun_blocked(std::uint32_t lun, Nanos) const override { return busy[lun] || stuck[lun]; }
  void release() { std::fill(busy.begin(), busy.end(), false); }
};

IoRequest make(IoId id, IoKind kind, std::uint32_t lun, Nanos enqueued, IoSource src = IoSource::App,
               int priority = 0) {
  IoRequest io;
  io.id = id;
  io.kind = kind;
  io.lpn = lun;  // the fake dispatcher reads the target LUN from here
  io.ssd_enqueued = enqueued;
  io.source = src;
  io.priority = priority;
  return io;
}

SchedulerConfig fifo() {
  SchedulerConfig c;
  c.class_priority = {0, 0, 0, 0};
  c.reads_over_writes = false;
  c.deadline_boost = false;
  return c;
}

std::vector<IoId> drain_one_lun(SsdScheduler& s, FakeDispatcher& d, Nanos now) {
  while (s.pending() > 0) {
    if (s.dispatch(now, d) == 0) break;
    d.release();
  }
  return d.started;
}

TEST(Ranking, OverdueFirstThenPriorityReadsEnqueueId) {
  RankKey hi{5, 1, 0, 1}, lo{0, 0, 0, 2};
  EXPECT_TRUE(ranks_ahead(true, lo, false, hi));
  EXPECT_TRUE(ranks_ahead(false, hi, false, lo));
  RankKey r{1, 1, 10, 5}, w{1, 0, 5, 4};
  EXPECT_TRUE(ranks_ahead(false, r, false, w));
  RankKey a{1, 0, 3, 9}, b{1, 0, 4, 1};
  EXPECT_TRUE(ranks_ahead(false, a, false, b));
  RankKey c{1, 0, 3, 2}, e{1, 0, 3, 3};
  EXPECT_TRUE(ranks_ahead(false, c, false, e));
  EXPECT_FALSE(ranks_ahead(false, c, false, c));
}

TEST(SsdScheduler, FifoPreservesArrivalOrder) {
  SsdScheduler s(fifo(), 1);
  FakeDispatcher d(1);
  std::deque<IoRequest> ios;
  ios.push_back(make(1, IoKind::Write, 0, 10));
  ios.push_back(make(2, IoKind::Read, 0, 20));
  ios.push_back(make(3, IoKind::Write, 0, 30));
  for (auto& io : ios) s.enqueue(io, d);
  EXPECT_EQ(drain_one_lun(s, d, 40), (std::vector<IoId>{1, 2, 3}));
}

TEST(SsdScheduler, ReadsOverWrites) {
  auto c = fifo();
  c.reads_over_writes = true;
  SsdScheduler s(c, 1);
  FakeDispatcher d(1);
  auto w = make(1, IoKind::Write, 0, 5), r = make(2, IoKind::Read, 0, 5);
  s.enqueue(w, d);
  s.enqueue(r, d);
  EXPECT_EQ(drain_one_lun(s, d, 5), (std::vector<IoId>{2, 1}));
}

TEST(SsdScheduler, OverdueWriteOutranksFreshHighPriorityRead) {
  SchedulerConfig c;
  SsdScheduler s(c, 1);
  FakeDispatcher d(1);
  auto w = make(1, IoKind::Write, 0, 0);
  w.deadline = 99;
  auto r = make(2, IoKind::Read, 0, 50, IoSource::App, 10);
  s.enqueue(w, d);
  s.enqueue(r, d);
  EXPECT_TRUE(s.overdue(w, 100));
  EXPECT_EQ(drain_one_lun(s, d, 100), (std::vector<IoId>{1, 2}));
}

TEST(SsdScheduler, DeadlineNotYetPassedDoesNotBoost) {
  SchedulerConfig c;
  SsdScheduler s(c, 1);
  FakeDispatcher d(1);
  auto w = make(1, IoKind::Write, 0, 0);
  w.deadline = 100;
  auto r = make(2, IoKind::Read, 0, 50);
  s.enqueue(w, d);
  s.enqueue(r, d);
  EXPECT_EQ(drain_one_lun(s, d, 100), (std::vector<IoId>{2, 1}));
}

TEST(SsdScheduler, PendingCountsEnqueues) {
  SsdScheduler s(SchedulerConfig{}, 4);
  FakeDispatcher d(4);
  std::deque<IoRequest> ios;
  for (IoId i = 1; i <= 100; ++i) {
    ios.push_back(make(i, IoKind::Read, i % 4, i));
    s.enqueue(ios.back(), d);
  }
  EXPECT_EQ(s.pending(), 100u);
  EXPECT_THROW(s.enqueue(ios.front(), d), SimulationError);
}

TEST(SsdScheduler, LookaheadSkipsBlockedLun) {
  SsdScheduler s(SchedulerConfig{}, 2);
  FakeDispatcher d(2);
  d.stuck[0] = true;
  auto a = make(1, IoKind::Read, 0, 0), b = make(2, IoKind::Read, 1, 5);
  s.enqueue(a, d);
  s.enqueue(b, d);
  s.dispatch(10, d);
  EXPECT_EQ(d.started, (std::vector<IoId>{2}));
}

TEST(SsdScheduler, WithoutLookaheadBlockedHeadHoldsItsClass) {
  auto c = SchedulerConfig{};
  c.greedy_lookahead = false;
  SsdScheduler s(c, 2);
  FakeDispatcher d(2);
  d.stuck[0] = true;
  auto a = make(1, IoKind::Read, 0, 0), b = make(2, IoKind::Read, 1, 5);
  auto g = make(3, IoKind::Read, 1, 6, IoSource::Gc);
  s.enqueue(a, d);
  s.enqueue(b, d);
  s.enqueue(g, d);
  s.dispatch(10, d);
  // The APP head targets the stuck LUN; only the GC class can proceed.
  EXPECT_EQ(d.started, (std::vector<IoId>{3}));
}

// Random queue contents drained one IO per pass must come out in the order
// of an independently built sort key.
TEST(SsdScheduler, DrainOrderMatchesRankingReplay) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    SchedulerConfig c;
    c.reads_over_writes = trial % 2 == 0;
    SsdScheduler s(c, 1);
    FakeDispatcher d(1);
    std::deque<IoRequest> ios;
    const Nanos now = 1000;
    for (IoId i = 1; i <= 40; ++i) {
      auto io = make(i, rng() % 2 ? IoKind::Read : IoKind::Write, 0, rng() % 1000,
                     static_cast<IoSource>(rng() % 4), static_cast<int>(rng() % 3));
      if (rng() % 4 == 0) io.deadline = rng() % 2000;
      ios.push_back(io);
      s.enqueue(ios.back(), d);
    }
    using Key = std::tuple<int, int, int, Nanos, IoId>;
    std::vector<std::pair<Key, IoId>> oracle;
    for (const auto& io : ios) {
      int overdue = io.deadline && *io.deadline < now ? 0 : 1;
      int prio = c.class_priority[static_cast<std::size_t>(io.source)] + io.priority;
      int read = c.reads_over_writes && io.kind == IoKind::Read ? 0 : 1;
      oracle.push_back({Key{overdue, -prio, read, io.ssd_enqueued, io.id}, io.id});
    }
    std::sort(oracle.begin(), oracle.end());
    std::vector<IoId> want;
    for (auto& o : oracle) want.push_back(o.second);
    EXPECT_EQ(drain_one_lun(s, d, now), want) << "trial " << trial;
  }
}

TEST(SsdScheduler, ParallelLunsStartInOnePass) {
  SsdScheduler s(SchedulerConfig{}, 4);
  FakeDispatcher d(4);
  std::deque<IoRequest> ios;
  for (IoId i = 1; i <= 8; ++i) {
    ios.push_back(make(i, IoKind::Read, (i - 1) % 4, i));
    s.enqueue(ios.back(), d);
  }
  EXPECT_EQ(s.dispatch(10, d), 4u);
  EXPECT_EQ(d.started, (std::vector<IoId>{1, 2, 3, 4}));
  for (IoId id : d.started) EXPECT_EQ(ios[id - 1].exec_started, 10u);
  EXPECT_EQ(s.pending(), 4u);
}

}  // namespace
}  // namespace flashsim
