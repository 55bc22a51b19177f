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

#ifndef FLASHSIM_WORKLOADS_HPP
#define FLASHSIM_WORKLOADS_HPP

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "host_os.hpp"

namespace flashsim {

std::uint64_t splitmix64(std::uint64_t x);

// Per-thread random stream. Draws are platform independent (no standard
// distributions involved).
class Rng {
 public:
  Rng(std::uint64_t seed, ThreadId thread);
  explicit Rng(std::uint64_t raw_seed) : gen_(raw_seed) {}
  std::uint64_t next() { return gen_(); }
  // Uniform in [0, n), n >= 1.
  std::uint64_t below(std::uint64_t n);
  // Uniform in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

struct CompletedIo {
  IoId id = 0;
  IoKind kind = IoKind::Read;
  Lpn lpn = 0;
  IoStatus status = IoStatus::Ok;
  std::uint64_t tag = 0;
  Nanos created = 0;
  Nanos completed = 0;
};

// What a workload thread sees of the system.
class ThreadContext {
 public:
  virtual ~ThreadContext() = default;
  virtual ThreadId id() const = 0;
  virtual Nanos now() const = 0;
  virtual std::uint64_t logical_pages() const = 0;
  virtual Rng& rng() = 0;
  // `deadline` is relative to submission.
  virtual IoId submit_read(Lpn lpn, std::optional<Nanos> deadline = std::nullopt) = 0;
  virtual IoId submit_write(Lpn lpn) = 0;
  virtual IoId submit_trim(Lpn lpn) = 0;
  // Open-interface and extension messages.
  virtual void send(const Message& m) = 0;
  virtual void finish() = 0;

  void tag_priority(IoId io, int priority);
  void tag_temperature(Lpn first, Lpn count, Temperature t);
  void tag_locality(std::uint32_t group, std::vector<Lpn> lpns);
};

class WorkloadThread {
 public:
  virtual ~WorkloadThread() = default;
  virtual void init(ThreadContext& ctx) = 0;
  // Runs every time an IO submitted by this thread completes.
  virtual void call_back(ThreadContext& ctx, const CompletedIo& io) = 0;
};

// Keeps up to `window` IOs in flight, refilling from call_back. Finishes
// once the generator is exhausted and nothing is in flight.
class WindowedThread : public WorkloadThread {
 public:
  explicit WindowedThread(std::uint32_t window);
  void init(ThreadContext& ctx) override;
  void call_back(ThreadContext& ctx, const CompletedIo& io) override;

 protected:
  virtual void start(ThreadContext&) {}
  // Submits exactly one IO and returns true, or returns false when nothing
  // can be issued right now.
  virtual bool issue_next(ThreadContext& ctx) = 0;
  virtual void on_complete(ThreadContext&, const CompletedIo&) {}
  virtual bool exhausted() const = 0;
  std::uint32_t in_flight() const { return in_flight_; }

 private:
  void pump(ThreadContext& ctx);

  std::uint32_t window_;
  std::uint32_t in_flight_ = 0;
  bool done_ = false;
};

class SequentialWriter : public WindowedThread {
 public:
  SequentialWriter(Lpn start, std::uint64_t count, std::uint32_t passes, std::uint32_t window);

 protected:
  bool issue_next(ThreadContext& ctx) override;
  bool exhausted() const override { return next_ >= total_; }

 private:
  Lpn start_;
  std::uint64_t count_;
  std::uint64_t total_;
  std::uint64_t next_ = 0;
};

class SequentialReader : public WindowedThread {
 public:
  SequentialReader(Lpn start, std::uint64_t count, std::uint32_t passes, std::uint32_t window);

 protected:
  bool issue_next(ThreadContext& ctx) override;
  bool exhausted() const override { return next_ >= total_; }

 private:
  Lpn start_;
  std::uint64_t count_;
  std::uint64_t total_;
  std::uint64_t next_ = 0;
};

struct RandomWriterParams {
  Lpn start = 0;
  std::uint64_t count = 0;
  std::uint64_t ios = 0;
  // Skew: a hot_share fraction of writes goes to the first hot_fraction of
  // the range. Uniform when hot_fraction is 0 or 1.
  double hot_fraction = 0.0;
  double hot_share = 0.0;
  bool hint_temperature = false;
  // Write every lpn of the range exactly once, in random order.
  bool permutation = false;
};

class RandomWriter : public WindowedThread {
 public:
  RandomWriter(const RandomWriterParams& p, std::uint32_t window);

 protected:
  void start(ThreadContext& ctx) override;
  bool issue_next(ThreadContext& ctx) override;
  bool exhausted() const override { return issued_ >= total_; }

 private:
  Lpn pick(Rng& rng) const;

  RandomWriterParams p_;
  std::uint64_t total_;
  std::uint64_t hot_count_ = 0;
  std::uint64_t issued_ = 0;
  std::vector<Lpn> order_;
};

struct RandomReaderParams {
  Lpn start = 0;
  std::uint64_t count = 0;
  std::uint64_t ios = 0;
  int priority = 0;        // sent as TAG_PRIORITY when non-zero
  Nanos deadline = 0;      // relative; 0 for none
};

class RandomReader : public WindowedThread {
 public:
  RandomReader(const RandomReaderParams& p, std::uint32_t window);

 protected:
  bool issue_next(ThreadContext& ctx) override;
  bool exhausted() const override { return issued_ >= p_.ios; }

 private:
  RandomReaderParams p_;
  std::uint64_t issued_ = 0;
};

// Two-phase Grace hash join. Phase 1 reads R then S and writes each page to
// its hash partition; phase 2 starts once every partition write completed
// and reads partition p of R then partition p of S, for each p.
// Layout from `base`: R pages, S pages, then the partition area.
class GraceHashJoin : public WindowedThread {
 public:
  GraceHashJoin(Lpn base, std::uint64_t r_pages, std::uint64_t s_pages, std::uint32_t partitions,
                std::uint32_t window);

  static std::uint64_t footprint(std::uint64_t r_pages, std::uint64_t s_pages) { return 2 * (r_pages + s_pages); }
  std::uint32_t partition_of(std::uint64_t input_index) const;
  // Lpn where input page `i` (R first, then S) lands in the partition area.
  Lpn partition_slot(std::uint64_t input_index) const { return slot_[input_index]; }
  int phase() const { return phase_; }

 protected:
  void start(ThreadContext& ctx) override;
  bool issue_next(ThreadContext& ctx) override;
  void on_complete(ThreadContext& ctx, const CompletedIo& io) override;
  bool exhausted() const override;

 private:
  Lpn base_;
  std::uint64_t r_, s_;
  std::uint32_t partitions_;
  std::vector<Lpn> slot_;            // input index -> partition-area lpn
  std::vector<Lpn> phase2_order_;
  std::vector<std::uint64_t> read_index_;  // lpn offset -> input index
  std::uint64_t next_read_ = 0;
  std::vector<std::uint64_t> pending_writes_;
  std::uint64_t writes_done_ = 0;
  std::uint64_t next_phase2_ = 0;
  int phase_ = 1;
};

// Simplified file-system pattern over a pool of fixed-size extents:
// allocate / write / free in a 2:6:2 mix. Allocation writes the extent's
// first page, writes append within an allocated extent (wrapping), and a
// free trims the extent's written pages.
class ExtentAllocator : public WindowedThread {
 public:
  ExtentAllocator(Lpn start, std::uint64_t count, std::uint64_t ops, std::uint32_t extent_pages,
                  std::uint32_t window);

 protected:
  bool issue_next(ThreadContext& ctx) override;
  bool exhausted() const override { return ops_done_ >= ops_ && trims_.empty(); }

 private:
  Lpn start_;
  std::uint32_t extent_pages_;
  std::uint64_t extents_;
  std::uint64_t ops_;
  std::uint64_t ops_done_ = 0;
  std::vector<std::uint32_t> written_;     // pages written per extent; 0 = free
  std::vector<std::uint64_t> allocated_;
  std::vector<Lpn> trims_;                 // queued trims of the last free
};

// Declarative description of one workload thread.
struct ThreadSpec {
  std::string type;  // seqwrite, seqread, randwrite, randread, grace, extent
  Lpn start = 0;
  std::uint64_t count = 0;   // 0: up to the end of the logical space
  std::uint64_t ios = 0;     // 0: one pass over the range
  std::uint32_t passes = 1;
  double hot_fraction = 0.0;
  double hot_share = 0.0;
  bool hint_temperature = false;
  bool permutation = false;
  int priority = 0;
  Nanos deadline_ns = 0;
  std::uint64_t r_pages = 64;
  std::uint64_t s_pages = 64;
  std::uint32_t partitions = 4;
  std::uint32_t extent_pages = 16;
  std::uint32_t window = 0;  // 0: workload default
  std::vector<ThreadId> depends;
  bool measured = true;
};

std::vector<std::string> thread_types();
// Builds a generator; throws ConfigError for bad parameters. `key` prefixes
// diagnostics (e.g. "workload.t0").
std::unique_ptr<WorkloadThread> make_thread(const ThreadSpec& spec, std::uint32_t default_window,
                                            std::uint64_t logical_pages, const std::string& key);

}  // namespace flashsim

#endif  // FLASHSIM_WORKLOADS_HPP
