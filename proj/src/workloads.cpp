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

#include "workloads.hpp"

#include <algorithm>

namespace flashsim {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, ThreadId thread)
    : gen_(splitmix64(splitmix64(seed) ^ splitmix64(0xF1A5'0000ULL + static_cast<std::uint64_t>(thread + 1)))) {}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % n;
}

// ---- ThreadContext helpers ------------------------------------------------

void ThreadContext::tag_priority(IoId io, int priority) {
  Message m;
  m.kind = msg::kTagPriority;
  m.io = io;
  m.priority = priority;
  send(m);
}

void ThreadContext::tag_temperature(Lpn first, Lpn count, Temperature t) {
  Message m;
  m.kind = msg::kTagTemperature;
  m.first = first;
  m.count = count;
  m.temperature = t;
  send(m);
}

void ThreadContext::tag_locality(std::uint32_t group, std::vector<Lpn> lpns) {
  Message m;
  m.kind = msg::kTagLocality;
  m.group = group;
  m.lpns = std::move(lpns);
  send(m);
}

// ---- WindowedThread -------------------------------------------------------

WindowedThread::WindowedThread(std::uint32_t window) : window_(window) {
  if (window < 1) throw ConfigError("workload window must be >= 1");
}

void WindowedThread::init(ThreadContext& ctx) {
  start(ctx);
  pump(ctx);
}

void WindowedThread::call_back(ThreadContext& ctx, const CompletedIo& io) {
  --in_flight_;
  on_complete(ctx, io);
  pump(ctx);
}

void WindowedThread::pump(ThreadContext& ctx) {
  if (done_) return;
  while (in_flight_ < window_ && issue_next(ctx)) ++in_flight_;
  if (in_flight_ == 0 && exhausted()) {
    done_ = true;
    ctx.finish();
  }
}

// ---- sequential -----------------------------------------------------------

SequentialWriter::SequentialWriter(Lpn start, std::uint64_t count, std::uint32_t passes, std::uint32_t window)
    : WindowedThread(window), start_(start), count_(count), total_(count * passes) {}

bool SequentialWriter::issue_next(ThreadContext& ctx) {
  if (next_ >= total_) return false;
  ctx.submit_write(start_ + next_ % count_);
  ++next_;
  return true;
}

SequentialReader::SequentialReader(Lpn start, std::uint64_t count, std::uint32_t passes, std::uint32_t window)
    : WindowedThread(window), start_(start), count_(count), total_(count * passes) {}

bool SequentialReader::issue_next(ThreadContext& ctx) {
  if (next_ >= total_) return false;
  ctx.submit_read(start_ + next_ % count_);
  ++next_;
  return true;
}

// ---- random ---------------------------------------------------------------

RandomWriter::RandomWriter(const RandomWriterParams& p, std::uint32_t window)
    : WindowedThread(window), p_(p), total_(p.permutation ? p.count : p.ios) {
  if (p.hot_fraction > 0.0 && p.hot_fraction < 1.0) {
    hot_count_ = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(static_cast<double>(p.count) * p.hot_fraction));
    hot_count_ = std::min(hot_count_, p.count);
  }
}

void RandomWriter::start(ThreadContext& ctx) {
  if (p_.permutation) {
    order_.resize(p_.count);
    for (std::uint64_t i = 0; i < p_.count; ++i) order_[i] = p_.start + i;
    for (std::uint64_t i = p_.count; i > 1; --i) std::swap(order_[i - 1], order_[ctx.rng().below(i)]);
  }
  if (p_.hint_temperature && hot_count_ > 0) {
    ctx.tag_temperature(p_.start, hot_count_, Temperature::Hot);
    ctx.tag_temperature(p_.start + hot_count_, p_.count - hot_count_, Temperature::Cold);
  }
}

Lpn RandomWriter::pick(Rng& rng) const {
  if (hot_count_ == 0 || hot_count_ == p_.count) return p_.start + rng.below(p_.count);
  if (rng.unit() < p_.hot_share) return p_.start + rng.below(hot_count_);
  return p_.start + hot_count_ + rng.below(p_.count - hot_count_);
}

bool RandomWriter::issue_next(ThreadContext& ctx) {
  if (issued_ >= total_) return false;
  ctx.submit_write(p_.permutation ? order_[issued_] : pick(ctx.rng()));
  ++issued_;
  return true;
}

RandomReader::RandomReader(const RandomReaderParams& p, std::uint32_t window) : WindowedThread(window), p_(p) {}

bool RandomReader::issue_next(ThreadContext& ctx) {
  if (issued_ >= p_.ios) return false;
  std::optional<Nanos> deadline;
  if (p_.deadline > 0) deadline = p_.deadline;
  IoId id = ctx.submit_read(p_.start + ctx.rng().below(p_.count), deadline);
  if (p_.priority != 0) ctx.tag_priority(id, p_.priority);
  ++issued_;
  return true;
}

// ---- Grace hash join ------------------------------------------------------

GraceHashJoin::GraceHashJoin(Lpn base, std::uint64_t r_pages, std::uint64_t s_pages, std::uint32_t partitions,
                             std::uint32_t window)
    : WindowedThread(window), base_(base), r_(r_pages), s_(s_pages), partitions_(partitions) {
  const std::uint64_t n = r_ + s_;
  // Region sizes per (partition, relation), laid out partition-major so a
  // partition's R and S halves are adjacent.
  std::vector<std::uint64_t> size(2 * partitions_, 0);
  for (std::uint64_t i = 0; i < n; ++i) ++size[2 * partition_of(i) + (i < r_ ? 0 : 1)];
  std::vector<std::uint64_t> offset(2 * partitions_, 0);
  for (std::size_t k = 1; k < size.size(); ++k) offset[k] = offset[k - 1] + size[k - 1];
  slot_.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    auto k = 2 * partition_of(i) + (i < r_ ? 0 : 1);
    slot_[i] = base_ + n + offset[k]++;
  }
  phase2_order_.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) phase2_order_[i] = base_ + n + i;
}

std::uint32_t GraceHashJoin::partition_of(std::uint64_t input_index) const {
  return static_cast<std::uint32_t>(splitmix64(input_index) % partitions_);
}

void GraceHashJoin::start(ThreadContext& ctx) {
  const std::uint64_t n = r_ + s_;
  std::vector<std::vector<Lpn>> members(partitions_);
  for (std::uint64_t i = 0; i < n; ++i) members[partition_of(i)].push_back(slot_[i]);
  for (std::uint32_t p = 0; p < partitions_; ++p) {
    std::sort(members[p].begin(), members[p].end());
    auto group = (static_cast<std::uint32_t>(ctx.id() & 0xFFFF) << 16) | p;
    ctx.tag_locality(group, std::move(members[p]));
  }
}

bool GraceHashJoin::issue_next(ThreadContext& ctx) {
  const std::uint64_t n = r_ + s_;
  if (phase_ == 1) {
    if (!pending_writes_.empty()) {
      auto i = pending_writes_.front();
      pending_writes_.erase(pending_writes_.begin());
      ctx.submit_write(slot_[i]);
      return true;
    }
    if (next_read_ < n) {
      ctx.submit_read(base_ + next_read_++);
      return true;
    }
    return false;
  }
  if (next_phase2_ < n) {
    ctx.submit_read(phase2_order_[next_phase2_++]);
    return true;
  }
  return false;
}

void GraceHashJoin::on_complete(ThreadContext&, const CompletedIo& io) {
  if (phase_ != 1) return;
  if (io.kind == IoKind::Read) {
    pending_writes_.push_back(io.lpn - base_);
  } else if (++writes_done_ == r_ + s_) {
    phase_ = 2;
  }
}

bool GraceHashJoin::exhausted() const { return phase_ == 2 && next_phase2_ >= r_ + s_; }

// ---- extent allocator -----------------------------------------------------

ExtentAllocator::ExtentAllocator(Lpn start, std::uint64_t count, std::uint64_t ops, std::uint32_t extent_pages,
                                 std::uint32_t window)
    : WindowedThread(window),
      start_(start),
      extent_pages_(extent_pages),
      extents_(count / extent_pages),
      ops_(ops),
      written_(extents_, 0) {}

bool ExtentAllocator::issue_next(ThreadContext& ctx) {
  if (!trims_.empty()) {
    ctx.submit_trim(trims_.back());
    trims_.pop_back();
    return true;
  }
  if (ops_done_ >= ops_) return false;
  ++ops_done_;
  auto& rng = ctx.rng();
  auto r = rng.below(10);
  enum { Alloc, Write, Free } op = r < 2 ? Alloc : (r < 8 ? Write : Free);
  if (op != Alloc && allocated_.empty()) op = Alloc;
  if (op == Alloc && allocated_.size() == extents_) op = Write;

  if (op == Alloc) {
    auto e = rng.below(extents_);
    while (written_[e] != 0) e = (e + 1) % extents_;
    written_[e] = 1;
    allocated_.push_back(e);
    ctx.submit_write(start_ + e * extent_pages_);
    return true;
  }
  auto k = rng.below(allocated_.size());
  auto e = allocated_[k];
  if (op == Write) {
    auto page = written_[e] % extent_pages_;
    ctx.submit_write(start_ + e * extent_pages_ + page);
    ++written_[e];
    if (written_[e] == 2 * extent_pages_) written_[e] = extent_pages_;  // keep "fully written", bounded
    return true;
  }
  allocated_[k] = allocated_.back();
  allocated_.pop_back();
  auto pages = std::min<std::uint32_t>(written_[e], extent_pages_);
  written_[e] = 0;
  for (std::uint32_t p = pages; p-- > 1;) trims_.push_back(start_ + e * extent_pages_ + p);
  ctx.submit_trim(start_ + e * extent_pages_);
  return true;
}

// ---- factory --------------------------------------------------------------

std::vector<std::string> thread_types() { return {"seqwrite", "seqread", "randwrite", "randread", "grace", "extent"}; }

std::unique_ptr<WorkloadThread> make_thread(const ThreadSpec& s, std::uint32_t default_window,
                                            std::uint64_t logical_pages, const std::string& key) {
  auto fail = [&](const std::string& field, const std::string& why) {
    throw ConfigError(key + "." + field + ": " + why);
  };
  std::uint32_t window = s.window ? s.window : default_window;
  if (window < 1) fail("window", "must be >= 1");
  if (s.start >= logical_pages) fail("start", "beyond the logical space (" + std::to_string(logical_pages) + " pages)");
  std::uint64_t count = s.count ? s.count : logical_pages - s.start;
  if (s.start + count > logical_pages) fail("count", "range exceeds the logical space");

  if (s.type == "seqwrite" || s.type == "seqread") {
    if (s.passes < 1) fail("passes", "must be >= 1");
    if (s.type == "seqwrite") return std::make_unique<SequentialWriter>(s.start, count, s.passes, window);
    return std::make_unique<SequentialReader>(s.start, count, s.passes, window);
  }
  if (s.type == "randwrite") {
    if (s.hot_fraction < 0.0 || s.hot_fraction > 1.0) fail("hot_fraction", "must be in [0, 1]");
    if (s.hot_share < 0.0 || s.hot_share > 1.0) fail("hot_share", "must be in [0, 1]");
    RandomWriterParams p;
    p.start = s.start;
    p.count = count;
    p.ios = s.ios ? s.ios : count;
    p.hot_fraction = s.hot_fraction;
    p.hot_share = s.hot_share;
    p.hint_temperature = s.hint_temperature;
    p.permutation = s.permutation;
    return std::make_unique<RandomWriter>(p, window);
  }
  if (s.type == "randread") {
    RandomReaderParams p;
    p.start = s.start;
    p.count = count;
    p.ios = s.ios ? s.ios : count;
    p.priority = s.priority;
    p.deadline = s.deadline_ns;
    return std::make_unique<RandomReader>(p, window);
  }
  if (s.type == "grace") {
    if (s.r_pages < 1 || s.s_pages < 1) fail("r_pages", "relation sizes must be >= 1");
    if (s.partitions < 1 || s.partitions > 0xFFFF) fail("partitions", "must be in [1, 65535]");
    if (s.start + GraceHashJoin::footprint(s.r_pages, s.s_pages) > logical_pages)
      fail("r_pages", "join footprint 2*(R+S) exceeds the logical space");
    return std::make_unique<GraceHashJoin>(s.start, s.r_pages, s.s_pages, s.partitions, window);
  }
  if (s.type == "extent") {
    if (s.extent_pages < 1) fail("extent_pages", "must be >= 1");
    if (count < s.extent_pages) fail("count", "smaller than one extent");
    return std::make_unique<ExtentAllocator>(s.start, count, s.ios ? s.ios : count, s.extent_pages, window);
  }
  fail("type", "unknown thread type '" + s.type + "'");
  return nullptr;
}

}  // namespace flashsim
