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

#ifndef FLASHSIM_SIMULATOR_HPP
#define FLASHSIM_SIMULATOR_HPP

#include <map>
#include <memory>
#include <set>
#include <unordered_map>
#include <vector>

#include "engine.hpp"
#include "sim_config.hpp"

namespace flashsim {

// Receives every IO once, at completion, in completion order.
class IoSink {
 public:
  virtual ~IoSink() = default;
  // First measured application IO was created at `t`.
  virtual void on_measure_start(Nanos) {}
  virtual void on_io(const IoRequest& io) = 0;
};

struct RunStats {
  std::uint64_t total_ios = 0;
  std::uint64_t app_completed = 0;
  std::uint64_t app_reads = 0;
  std::uint64_t app_writes = 0;
  std::uint64_t app_trims = 0;
  std::uint64_t failed_reads = 0;
  std::uint64_t integrity_errors = 0;
  std::uint64_t lost_mappings = 0;
  std::uint64_t stale_tags = 0;
  std::uint64_t gc_jobs = 0;
  std::uint64_t wl_jobs = 0;
  std::uint64_t gc_migrations = 0;
  std::uint64_t wl_migrations = 0;
  std::uint64_t noop_migrations = 0;
  std::uint64_t erases = 0;
  std::uint64_t mapping_ios = 0;
  Nanos bootstrap_end = 0;
  Nanos end_time = 0;
  bool measured = false;
  Nanos measure_start = 0;
};

// Payload tag layout: application writes carry (thread, sequence);
// translation pages carry their index with the top bit set.
inline std::uint64_t app_tag(ThreadId t, std::uint64_t seq) {
  return (static_cast<std::uint64_t>(t + 2) << 40) | (seq & ((1ULL << 40) - 1));
}
inline std::uint64_t tpage_tag(std::uint32_t tp) { return (1ULL << 63) | tp; }

// One simulation instance: the flash array, controller, host OS and
// workload threads driven by a single event loop.
class Simulator : private Dispatcher {
 public:
  explicit Simulator(const SimConfig& cfg);
  ~Simulator() override;
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  void add_sink(IoSink* sink) { sinks_.push_back(sink); }
  // Registers a custom thread; ids continue after the configured threads.
  ThreadId add_thread(std::unique_ptr<WorkloadThread> t, std::vector<ThreadId> depends = {}, bool measured = true);
  MessageBus& messages() { return bus_; }

  // Runs to completion. Throws SimulationError on fatal conditions,
  // including a stall with IOs that can never be served.
  RunStats run();

  const SimConfig& config() const { return cfg_; }
  const FlashDevice& device() const { return dev_; }
  const Ftl& ftl() const { return *ftl_; }
  const BlockAllocator& allocator() const { return alloc_; }
  const TemperatureDetector& detector() const { return detector_; }
  const HostOs& os() const { return os_; }
  const WearLeveler& wear_leveler() const { return wl_; }
  const RunStats& stats() const { return stats_; }
  Nanos now() const { return engine_.now(); }
  std::uint64_t logical_pages() const { return ftl_->logical_pages(); }
  // Tag of the last completed write per lpn (0 when unwritten or trimmed).
  std::uint64_t expected_tag(Lpn lpn) const { return shadow_[lpn]; }
  std::optional<Temperature> temperature_hint(Lpn lpn) const;

  static constexpr ThreadId kPreconditionThread = 1000;

 private:
  class Context;
  struct Event {
    enum class Type : std::uint8_t { Complete, Wake } type;
    IoId id;
  };
  struct ThreadState {
    ThreadId id;
    std::unique_ptr<WorkloadThread> impl;
    std::vector<ThreadId> depends;
    std::vector<ThreadId> dependents;
    std::uint32_t remaining = 0;
    bool measured = true;
    enum class State : std::uint8_t { Waiting, Running, Done } state = State::Waiting;
    std::unique_ptr<Rng> rng;
    std::uint64_t write_seq = 0;
  };

  // Dispatcher
  TryResult try_start(IoRequest& io, Nanos now) override;
  std::optional<std::uint32_t> target_lun(const IoRequest& io) const override;
  bool lun_blocked(std::uint32_t lun, Nanos now) const override;
  void begin_pass() override { failed_placements_.clear(); }

  ThreadState& thread(ThreadId id);
  void start_thread(ThreadState& t);
  void finish_thread(ThreadState& t);
  IoId submit_app(ThreadState& t, IoKind kind, Lpn lpn, std::optional<Nanos> deadline);
  void handle_message(ThreadId from, const Message& m);

  IoRequest& new_io(IoSource source, IoKind kind);
  void admit(IoRequest& io);
  void add_side_ios(IoRequest& io, const TranslationAccess& side);
  void relocated(Lpn lpn);
  IoRequest& mapping_io(IoKind kind, std::uint32_t tp);
  void make_ready(IoRequest& io);
  void resolve_now(IoRequest& io, IoStatus status);
  void started(IoRequest& io, const CommandTiming& ct);
  void complete(IoId id);
  void apply_completion(IoRequest& io);
  void submit_plan(const RelocationPlan& plan, IoSource source);
  void run_background();
  void settle();
  void drain();
  Temperature classify(Lpn lpn) const;
  Temperature write_temperature(Lpn lpn);
  std::uint32_t lun_of(const PhysicalAddress& a) const { return dev_.addresses().lun_of(a); }
  void schedule_wake(Nanos t);

  SimConfig cfg_;
  FlashDevice dev_;
  std::unique_ptr<Ftl> ftl_;
  FreePool pool_;
  BlockAllocator alloc_;
  RelocationSlots slots_;
  GarbageCollector gc_;
  WearLeveler wl_;
  TemperatureDetector detector_;
  SsdScheduler sched_;
  HostOs os_;
  MessageBus bus_;
  EventEngine<Event> engine_;

  std::unordered_map<IoId, IoRequest> ios_;
  IoId next_io_ = 1;
  std::uint64_t next_job_ = 1;
  std::vector<ThreadState> threads_;
  std::map<ThreadId, std::size_t> thread_index_;
  std::vector<IoSink*> sinks_;
  std::set<Nanos> wakes_;
  std::set<std::uint32_t> gc_dirty_;
  // Unplaceable flexible writes in the current dispatch pass.
  std::vector<PlacementRequest> failed_placements_;
  bool wl_due_ = false;
  std::uint64_t writes_since_scan_ = 0;

  std::vector<std::uint64_t> shadow_;
  std::vector<std::uint8_t> hints_;  // 0 none, 1 hot, 2 cold
  std::unordered_map<Lpn, std::uint32_t> locality_;
  RunStats stats_;
  bool ran_ = false;
};

}  // namespace flashsim

#endif  // FLASHSIM_SIMULATOR_HPP
