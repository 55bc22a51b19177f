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

#include "scheduler.hpp"

#include <queue>

namespace flashsim {

bool ranks_ahead(bool a_overdue, const RankKey& a, bool b_overdue, const RankKey& b) {
  if (a_overdue != b_overdue) return a_overdue;
  if (a.priority != b.priority) return a.priority > b.priority;
  if (a.read_pref != b.read_pref) return a.read_pref > b.read_pref;
  if (a.enqueued != b.enqueued) return a.enqueued < b.enqueued;
  return a.id < b.id;
}

SsdScheduler::SsdScheduler(const SchedulerConfig& cfg, std::uint32_t luns) : cfg_(cfg), buckets_(luns + 1) {}

RankKey SsdScheduler::key(const IoRequest& io) const {
  RankKey k;
  k.priority = cfg_.class_priority[static_cast<std::size_t>(io.source)] + io.priority;
  if (cfg_.reads_over_writes) k.read_pref = io.kind == IoKind::Read ? 1 : 0;
  k.enqueued = io.ssd_enqueued;
  k.id = io.id;
  return k;
}

bool SsdScheduler::overdue(const IoRequest& io, Nanos now) const {
  return cfg_.deadline_boost && io.deadline && *io.deadline < now;
}

bool SsdScheduler::contains(IoId id) const { return ids_.count(id) > 0; }

void SsdScheduler::insert(IoRequest& io, const Dispatcher& d) {
  auto lun = d.target_lun(io);
  io.bucket = lun ? static_cast<std::int32_t>(*lun) : static_cast<std::int32_t>(flexible_bucket());
  auto e = entry(io);
  buckets_[static_cast<std::size_t>(io.bucket)].insert(e);
  by_source_[static_cast<std::size_t>(io.source)].insert(e);
}

void SsdScheduler::erase(IoRequest& io) {
  auto e = entry(io);
  buckets_[static_cast<std::size_t>(io.bucket)].erase(e);
  by_source_[static_cast<std::size_t>(io.source)].erase(e);
  io.bucket = -1;
}

void SsdScheduler::enqueue(IoRequest& io, const Dispatcher& d) {
  if (!ids_.insert(io.id).second)
    throw SimulationError(SimulationError::Kind::ModelViolation, "IO " + std::to_string(io.id) + " enqueued twice");
  io.urgent = false;
  insert(io, d);
  if (cfg_.deadline_boost && io.deadline) deadlines_.insert({*io.deadline, io.id, &io});
  ++count_;
}

void SsdScheduler::promote(Nanos now) {
  while (!deadlines_.empty() && deadlines_.begin()->deadline < now) {
    IoRequest* io = deadlines_.begin()->io;
    deadlines_.erase(deadlines_.begin());
    auto e = entry(*io);
    buckets_[static_cast<std::size_t>(io->bucket)].erase(e);
    by_source_[static_cast<std::size_t>(io->source)].erase(e);
    io->urgent = true;
    e.urgent = true;
    buckets_[static_cast<std::size_t>(io->bucket)].insert(e);
    by_source_[static_cast<std::size_t>(io->source)].insert(e);
  }
}

bool SsdScheduler::apply(TryResult r, IoRequest& io, const Dispatcher& d) {
  switch (r) {
    case TryResult::Blocked:
      io.blocked_epoch = epoch_;
      return false;
    case TryResult::Moved: {
      erase(io);
      insert(io, d);
      return true;
    }
    case TryResult::Started:
    case TryResult::Removed: {
      if (io.deadline && !io.urgent) deadlines_.erase({*io.deadline, io.id, &io});
      erase(io);
      ids_.erase(io.id);
      --count_;
      return true;
    }
  }
  return false;
}

// Global best-first walk over all queued IOs, bucket by bucket, until one
// can start.
bool SsdScheduler::step_lookahead(Nanos now, Dispatcher& d) {
  struct Cursor {
    Queue::const_iterator it;
    Queue::const_iterator end;
  };
  auto worse = [](const Cursor& a, const Cursor& b) {
    return ranks_ahead(b.it->urgent, b.it->key, a.it->urgent, a.it->key);
  };
  std::priority_queue<Cursor, std::vector<Cursor>, decltype(worse)> heads(worse);
  for (std::size_t b = 0; b < buckets_.size(); ++b) {
    const auto& q = buckets_[b];
    if (q.empty()) continue;
    if (b != flexible_bucket() && d.lun_blocked(static_cast<std::uint32_t>(b), now)) continue;
    heads.push({q.begin(), q.end()});
  }
  while (!heads.empty()) {
    Cursor c = heads.top();
    heads.pop();
    IoRequest& io = *c.it->io;
    if (io.blocked_epoch != epoch_ && apply(d.try_start(io, now), io, d)) return true;
    if (++c.it != c.end) heads.push(c);
  }
  return false;
}

// Without lookahead only the head of each source class may run; a blocked
// head holds back its whole class.
bool SsdScheduler::step_heads(Nanos now, Dispatcher& d) {
  std::vector<Entry> heads;
  for (const auto& q : by_source_)
    if (!q.empty()) heads.push_back(*q.begin());
  std::sort(heads.begin(), heads.end(), Order{});
  for (const auto& h : heads) {
    if (h.io->blocked_epoch != epoch_ && apply(d.try_start(*h.io, now), *h.io, d)) return true;
  }
  return false;
}

std::size_t SsdScheduler::dispatch(Nanos now, Dispatcher& d) {
  std::size_t n = 0;
  ++epoch_;
  d.begin_pass();
  while (count_ > 0) {
    promote(now);
    bool progressed = cfg_.greedy_lookahead ? step_lookahead(now, d) : step_heads(now, d);
    if (!progressed) break;
    ++n;
  }
  return n;
}

}  // namespace flashsim
