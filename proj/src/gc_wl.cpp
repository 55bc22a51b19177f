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

#include "gc_wl.hpp"

namespace flashsim {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::optional<std::uint64_t> pick_free_block(const FreePool& pool, std::uint32_t lun, Temperature t) {
  const auto& set = pool.lun(lun);
  if (set.empty()) return std::nullopt;
  if (t == Temperature::Hot) return set.begin()->second;
  auto max_count = set.rbegin()->first;
  return set.lower_bound({max_count, 0})->second;
}

// ---- TemperatureDetector --------------------------------------------------

TemperatureDetector::TemperatureDetector(const DetectorConfig& cfg) : cfg_(cfg) {
  if (cfg.filters < 1 || cfg.bits < 1 || cfg.hashes < 1 || cfg.window_writes < 1)
    throw ConfigError("temperature detector parameters must be >= 1");
  filters_.assign(cfg.filters, std::vector<std::uint64_t>((cfg.bits + 63) / 64, 0));
}

std::uint32_t TemperatureDetector::bit_index(Lpn lpn, std::uint32_t k) const {
  return static_cast<std::uint32_t>(mix64(lpn * 0x100000001B3ULL + k * 0xC2B2AE3D27D4EB4FULL) % cfg_.bits);
}

void TemperatureDetector::record_write(Lpn lpn) {
  auto& f = filters_[cursor_];
  for (std::uint32_t k = 0; k < cfg_.hashes; ++k) {
    auto bit = bit_index(lpn, k);
    f[bit / 64] |= 1ULL << (bit % 64);
  }
  if (++writes_in_window_ == cfg_.window_writes) {
    writes_in_window_ = 0;
    cursor_ = (cursor_ + 1) % cfg_.filters;
    std::fill(filters_[cursor_].begin(), filters_[cursor_].end(), 0);
  }
}

bool TemperatureDetector::in_filter(std::uint32_t filter, Lpn lpn) const {
  const auto& f = filters_[filter];
  for (std::uint32_t k = 0; k < cfg_.hashes; ++k) {
    auto bit = bit_index(lpn, k);
    if (!((f[bit / 64] >> (bit % 64)) & 1ULL)) return false;
  }
  return true;
}

std::uint32_t TemperatureDetector::hits(Lpn lpn) const {
  std::uint32_t n = 0;
  for (std::uint32_t i = 0; i < cfg_.filters; ++i) n += in_filter(i, lpn) ? 1 : 0;
  return n;
}

Temperature TemperatureDetector::classify(Lpn lpn) const {
  return hits(lpn) >= cfg_.hot_threshold ? Temperature::Hot : Temperature::Cold;
}

// ---- relocation planning --------------------------------------------------

RelocationPlan plan_relocation(const FlashDevice& dev, const Ftl& ftl, std::uint64_t block, IoSource source,
                               bool copyback, const Classifier& classify) {
  const auto& addr = dev.addresses();
  RelocationPlan plan;
  plan.block = block;
  plan.lun = addr.lun_of_block(block);
  std::vector<std::uint32_t> moves;
  for (std::uint32_t p = 0; p < dev.geometry().pages_per_block; ++p) {
    auto page = addr.block_address(block, p);
    if (!dev.is_valid(page)) continue;
    auto owner = ftl.owner(page);
    if (owner.kind == PageOwner::Kind::None)
      throw SimulationError(SimulationError::Kind::ModelViolation, "valid page without owner at " + to_string(page));
    Temperature temp = Temperature::Cold;
    if (owner.kind == PageOwner::Kind::Data && classify) temp = classify(owner.id);
    PlannedIo io;
    io.source = source;
    io.ppa = page;
    io.lun = plan.lun;
    io.owner = owner;
    io.temperature = temp;
    if (copyback) {
      io.kind = IoKind::Copyback;
      moves.push_back(static_cast<std::uint32_t>(plan.ios.size()));
      plan.ios.push_back(io);
    } else {
      io.kind = IoKind::Read;
      auto read_idx = static_cast<std::uint32_t>(plan.ios.size());
      plan.ios.push_back(io);
      io.kind = IoKind::Write;
      io.preds = {read_idx};
      moves.push_back(static_cast<std::uint32_t>(plan.ios.size()));
      plan.ios.push_back(io);
    }
  }
  PlannedIo erase;
  erase.kind = IoKind::Erase;
  erase.source = source;
  erase.ppa = addr.block_address(block, 0);
  erase.lun = plan.lun;
  erase.preds = std::move(moves);
  plan.ios.push_back(std::move(erase));
  return plan;
}

// ---- GarbageCollector -----------------------------------------------------

GarbageCollector::GarbageCollector(const GcConfig& cfg, FlashDevice& dev, const Ftl& ftl,
                                   const BlockAllocator& alloc, RelocationSlots& slots)
    : cfg_(cfg), dev_(dev), ftl_(ftl), alloc_(alloc), slots_(slots) {
  if (cfg.greediness < 1 || cfg.greediness >= dev.geometry().blocks_per_lun)
    throw ConfigError("controller.gc_greediness must satisfy 1 <= K < blocks_per_lun");
}

std::optional<std::uint64_t> GarbageCollector::select_victim(std::uint32_t lun) const {
  const auto& geo = dev_.geometry();
  std::optional<std::uint64_t> best;
  std::uint64_t first = std::uint64_t{lun} * geo.blocks_per_lun;
  for (std::uint64_t b = first; b < first + geo.blocks_per_lun; ++b) {
    const auto& r = dev_.block(b);
    if (r.state != BlockState::Full || r.relocating) continue;
    if (!best) {
      best = b;
      continue;
    }
    const auto& cur = dev_.block(*best);
    if (r.valid_count < cur.valid_count ||
        (r.valid_count == cur.valid_count && r.erase_count < cur.erase_count))
      best = b;
  }
  return best;
}

bool GarbageCollector::needs_collection(std::uint32_t lun) const {
  return alloc_.free_blocks(lun) < cfg_.greediness || alloc_.writable_pages(lun) <= alloc_.reserve_pages();
}

RelocationPlan GarbageCollector::check_gc(std::uint32_t lun, Nanos, const Classifier& classify) {
  if (slots_.busy(lun) || !needs_collection(lun)) return {};
  auto victim = select_victim(lun);
  // Nothing reclaimable yet; host overwrites may invalidate pages later.
  // A run that can make no further progress is reported by the driver.
  if (!victim || dev_.block(*victim).valid_count >= dev_.geometry().pages_per_block) return {};
  auto plan = plan_relocation(dev_, ftl_, *victim, IoSource::Gc, uses_copyback(), classify);
  dev_.block(*victim).relocating = true;
  slots_.acquire(lun);
  return plan;
}

// ---- WearLeveler ----------------------------------------------------------

WearLeveler::WearLeveler(const WlConfig& cfg, FlashDevice& dev, const Ftl& ftl, const BlockAllocator& alloc,
                         RelocationSlots& slots, bool copyback)
    : cfg_(cfg), dev_(dev), ftl_(ftl), alloc_(alloc), slots_(slots), copyback_(copyback) {
  if (cfg.staleness_factor <= 0) throw ConfigError("controller.wl_staleness must be > 0");
  if (cfg.scan_interval < 1) throw ConfigError("controller.wl_scan_interval must be >= 1");
}

void WearLeveler::on_erase(Nanos now, Nanos previous_erase_time) {
  interval_sum_ += static_cast<long double>(now - previous_erase_time);
  ++interval_count_;
}

double WearLeveler::avg_erase_interval() const {
  if (interval_count_ == 0) return static_cast<double>(dev_.timing().t_erase) * 1000.0;
  return static_cast<double>(interval_sum_ / static_cast<long double>(interval_count_));
}

double WearLeveler::mean_erase_count() const {
  return static_cast<double>(dev_.total_erases()) / static_cast<double>(dev_.geometry().total_blocks());
}

bool WearLeveler::is_stale_young(const BlockRecord& b, Nanos now) const {
  if (b.state != BlockState::Full || b.relocating) return false;
  if (!(static_cast<double>(b.erase_count) < mean_erase_count())) return false;
  return static_cast<double>(now - b.last_erase_time) > cfg_.staleness_factor * avg_erase_interval();
}

std::optional<std::uint64_t> WearLeveler::static_candidate(Nanos now) const {
  const auto& geo = dev_.geometry();
  const auto& addr = dev_.addresses();
  std::optional<std::uint64_t> best;
  deferred_ = false;
  for (std::uint64_t b = 0; b < geo.total_blocks(); ++b) {
    const auto& r = dev_.block(b);
    if (!is_stale_young(r, now)) continue;
    auto lun = addr.lun_of_block(b);
    if (slots_.busy(lun)) {
      deferred_ = true;
      continue;
    }
    // Migrations may draw on the GC reserve; the erase that ends the job
    // returns a whole block.
    if (alloc_.writable_pages(lun) < r.valid_count) continue;
    if (!best) {
      best = b;
      continue;
    }
    const auto& cur = dev_.block(*best);
    if (r.erase_count < cur.erase_count ||
        (r.erase_count == cur.erase_count && r.last_erase_time < cur.last_erase_time))
      best = b;
  }
  return best;
}

RelocationPlan WearLeveler::static_wl_scan(Nanos now) {
  if (!cfg_.enabled) return {};
  auto b = static_candidate(now);
  if (!b) return {};
  deferred_ = false;
  auto plan = plan_relocation(dev_, ftl_, *b, IoSource::Wl, copyback_ && dev_.timing().copyback,
                              [](Lpn) { return Temperature::Cold; });
  dev_.block(*b).relocating = true;
  slots_.acquire(plan.lun);
  return plan;
}

}  // namespace flashsim
