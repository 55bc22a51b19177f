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

#ifndef FLASHSIM_SCHEDULER_HPP
#define FLASHSIM_SCHEDULER_HPP

#include <array>
#include <optional>
#include <set>
#include <vector>

#include "hardware.hpp"
#include "mapping.hpp"

namespace flashsim {

// One IO's lifecycle record.
struct IoRequest {
  IoId id = 0;
  IoSource source = IoSource::App;
  IoKind kind = IoKind::Read;
  ThreadId thread = kNoThread;
  std::optional<Lpn> lpn;
  std::optional<std::uint32_t> tpage;          // translation page (MAPPING IOs, migrated tpages)
  std::optional<PhysicalAddress> ppa;          // page read/programmed, or block erased
  std::optional<PhysicalAddress> dst;          // copyback destination
  std::optional<PhysicalAddress> migrate_from; // source page of a GC/WL program
  int priority = 0;
  std::optional<Nanos> deadline;
  Nanos created = 0;
  Nanos os_dispatched = 0;
  Nanos ssd_enqueued = 0;
  Nanos exec_started = 0;
  Nanos completed = 0;
  Nanos channel_busy = 0;
  Nanos lun_busy = 0;
  IoStatus status = IoStatus::Pending;
  bool measured = false;
  std::vector<IoId> preds;

  // Controller bookkeeping, not traced.
  std::vector<IoId> succs;
  std::uint32_t unresolved = 0;
  bool noop = false;           // resolved without touching flash
  std::uint64_t tag = 0;       // payload written, or read back
  Temperature temperature = Temperature::Cold;
  std::optional<std::uint32_t> locality_group;
  std::uint64_t job = 0;       // relocation job, 0 for none
  std::int32_t bucket = -1;    // scheduler bucket while queued
  bool urgent = false;
  std::uint64_t blocked_epoch = 0;  // dispatch pass in which it last failed to start
};

struct SchedulerConfig {
  // Indexed by IoSource: APP, GC, WL, MAPPING.
  std::array<int, kSourceCount> class_priority{2, 1, 0, 3};
  bool reads_over_writes = true;
  bool deadline_boost = true;
  bool interleaving = true;
  bool greedy_lookahead = true;
};

// Static part of the ranking key. Overdue status is layered on top.
struct RankKey {
  int priority = 0;
  int read_pref = 0;
  Nanos enqueued = 0;
  IoId id = 0;
};

// Strict "ranks ahead of" order: overdue, then higher effective priority,
// then READ before WRITE (when enabled), then earlier enqueue, then lower id.
bool ranks_ahead(bool a_overdue, const RankKey& a, bool b_overdue, const RankKey& b);

enum class TryResult : std::uint8_t {
  Started,  // hardware reserved; drop from queue
  Blocked,  // cannot start at this instant
  Removed,  // resolved without hardware (failed / no-op); drop from queue
  Moved,    // its target LUN changed; re-bucket
};

class Dispatcher {
 public:
  virtual ~Dispatcher() = default;
  virtual TryResult try_start(IoRequest& io, Nanos now) = 0;
  // Target LUN of a queued IO, or nullopt when the LUN is chosen at dispatch.
  virtual std::optional<std::uint32_t> target_lun(const IoRequest& io) const = 0;
  // Cheap test that nothing targeting this LUN can start now.
  virtual bool lun_blocked(std::uint32_t lun, Nanos now) const = 0;
  // Start of a dispatch pass. Until the next call resources are only
  // consumed, never released.
  virtual void begin_pass() {}
};

// SSD-side pending queue: decides which IO runs next and where.
class SsdScheduler {
 public:
  SsdScheduler(const SchedulerConfig& cfg, std::uint32_t luns);

  // The IO must outlive its stay in the queue. ssd_enqueued is set by the
  // caller.
  void enqueue(IoRequest& io, const Dispatcher& d);
  // Starts IOs in rank order until nothing more can start at `now`.
  // Returns the number of queue changes (starts, removals, re-buckets).
  std::size_t dispatch(Nanos now, Dispatcher& d);

  std::size_t pending() const { return count_; }
  bool contains(IoId id) const;
  RankKey key(const IoRequest& io) const;
  bool overdue(const IoRequest& io, Nanos now) const;
  const SchedulerConfig& config() const { return cfg_; }

 private:
  struct Entry {
    bool urgent;
    RankKey key;
    IoRequest* io;
  };
  struct Order {
    bool operator()(const Entry& a, const Entry& b) const {
      return ranks_ahead(a.urgent, a.key, b.urgent, b.key);
    }
  };
  using Queue = std::set<Entry, Order>;
  struct DeadlineEntry {
    Nanos deadline;
    IoId id;
    IoRequest* io;
    bool operator<(const DeadlineEntry& o) const {
      return deadline != o.deadline ? deadline < o.deadline : id < o.id;
    }
  };

  Entry entry(const IoRequest& io) const { return Entry{io.urgent, key(io), const_cast<IoRequest*>(&io)}; }
  void insert(IoRequest& io, const Dispatcher& d);
  void erase(IoRequest& io);
  void promote(Nanos now);
  std::size_t flexible_bucket() const { return buckets_.size() - 1; }
  bool step_lookahead(Nanos now, Dispatcher& d);
  bool step_heads(Nanos now, Dispatcher& d);
  // Applies a non-blocked result; returns true when the queue changed.
  bool apply(TryResult r, IoRequest& io, const Dispatcher& d);

  SchedulerConfig cfg_;
  // Within one dispatch pass resources only get consumed, so an IO that
  // could not start stays blocked until the next pass.
  std::uint64_t epoch_ = 0;
  std::vector<Queue> buckets_;                  // one per LUN, plus flexible
  std::array<Queue, kSourceCount> by_source_;   // used without lookahead
  std::set<DeadlineEntry> deadlines_;
  std::set<IoId> ids_;
  std::size_t count_ = 0;
};

}  // namespace flashsim

#endif  // FLASHSIM_SCHEDULER_HPP
