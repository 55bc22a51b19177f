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

#ifndef FLASHSIM_GC_WL_HPP
#define FLASHSIM_GC_WL_HPP

#include <functional>
#include <optional>
#include <vector>

#include "hardware.hpp"
#include "mapping.hpp"

namespace flashsim {

// Dynamic wear leveling: hot data goes to the youngest FREE block, cold data
// to the oldest. Ties go to the lowest block index.
std::optional<std::uint64_t> pick_free_block(const FreePool& pool, std::uint32_t lun, Temperature t);

struct DetectorConfig {
  bool enabled = true;
  std::uint32_t filters = 4;
  std::uint32_t bits = 16384;
  std::uint32_t hashes = 2;
  std::uint32_t window_writes = 4096;
  std::uint32_t hot_threshold = 2;
};

// Multiple rotating Bloom filters. Each write is recorded in the current
// filter; every window_writes writes the cursor advances and the next filter
// is cleared. An lpn is hot when present in at least hot_threshold filters.
class TemperatureDetector {
 public:
  explicit TemperatureDetector(const DetectorConfig& cfg);

  void record_write(Lpn lpn);
  Temperature classify(Lpn lpn) const;
  bool in_filter(std::uint32_t filter, Lpn lpn) const;
  std::uint32_t hits(Lpn lpn) const;
  std::uint32_t cursor() const { return cursor_; }
  const DetectorConfig& config() const { return cfg_; }

 private:
  std::uint32_t bit_index(Lpn lpn, std::uint32_t k) const;

  DetectorConfig cfg_;
  std::vector<std::vector<std::uint64_t>> filters_;
  std::uint32_t cursor_ = 0;
  std::uint32_t writes_in_window_ = 0;
};

struct PlannedIo {
  IoKind kind = IoKind::Read;
  IoSource source = IoSource::Gc;
  PhysicalAddress ppa;  // page read or copied, or any page of the erased block
  std::uint32_t lun = 0;
  PageOwner owner;
  Temperature temperature = Temperature::Cold;
  std::vector<std::uint32_t> preds;  // indices into RelocationPlan::ios
};

// Migration IOs for one victim block, ending in its ERASE.
struct RelocationPlan {
  std::uint64_t block = 0;
  std::uint32_t lun = 0;
  std::vector<PlannedIo> ios;
  bool empty() const { return ios.empty(); }
};

// At most one GC or WL relocation job per LUN at a time.
class RelocationSlots {
 public:
  explicit RelocationSlots(std::uint32_t luns) : busy_(luns, 0) {}
  bool busy(std::uint32_t lun) const { return busy_[lun] != 0; }
  void acquire(std::uint32_t lun) { busy_[lun] = 1; }
  void release(std::uint32_t lun) { busy_[lun] = 0; }

 private:
  std::vector<std::uint8_t> busy_;
};

using Classifier = std::function<Temperature(Lpn)>;

struct GcConfig {
  std::uint32_t greediness = 2;
  bool copyback = true;
};

class GarbageCollector {
 public:
  GarbageCollector(const GcConfig& cfg, FlashDevice& dev, const Ftl& ftl, const BlockAllocator& alloc,
                   RelocationSlots& slots);

  // FULL block with the fewest valid pages; ties by erase count, then index.
  std::optional<std::uint64_t> select_victim(std::uint32_t lun) const;
  bool needs_collection(std::uint32_t lun) const;
  // Plans a collection when the LUN is below its free-block floor and idle.
  // The victim is marked relocating and the LUN's slot acquired.
  RelocationPlan check_gc(std::uint32_t lun, Nanos now, const Classifier& classify);
  bool uses_copyback() const { return cfg_.copyback && dev_.timing().copyback; }
  const GcConfig& config() const { return cfg_; }

 private:
  GcConfig cfg_;
  FlashDevice& dev_;
  const Ftl& ftl_;
  const BlockAllocator& alloc_;
  RelocationSlots& slots_;
};

struct WlConfig {
  bool enabled = true;
  double staleness_factor = 4.0;
  std::uint32_t scan_interval = 1024;
};

class WearLeveler {
 public:
  WearLeveler(const WlConfig& cfg, FlashDevice& dev, const Ftl& ftl, const BlockAllocator& alloc,
              RelocationSlots& slots, bool copyback);

  // Feeds the running mean of per-block erase intervals.
  void on_erase(Nanos now, Nanos previous_erase_time);
  double avg_erase_interval() const;
  double mean_erase_count() const;
  bool is_stale_young(const BlockRecord& b, Nanos now) const;
  std::optional<std::uint64_t> static_candidate(Nanos now) const;
  // At most one relocation batch per scan; its pages are classified cold.
  RelocationPlan static_wl_scan(Nanos now);
  // The last scan found a candidate only on LUNs with a job in flight.
  bool deferred() const { return deferred_; }
  const WlConfig& config() const { return cfg_; }

 private:
  WlConfig cfg_;
  FlashDevice& dev_;
  const Ftl& ftl_;
  const BlockAllocator& alloc_;
  RelocationSlots& slots_;
  bool copyback_;
  long double interval_sum_ = 0;
  std::uint64_t interval_count_ = 0;
  mutable bool deferred_ = false;
};

// Builds the migration IOs for a victim block: per valid page either one
// COPYBACK or a READ followed by a PROGRAM, then one ERASE after all of them.
RelocationPlan plan_relocation(const FlashDevice& dev, const Ftl& ftl, std::uint64_t block, IoSource source,
                               bool copyback, const Classifier& classify);

}  // namespace flashsim

#endif  // FLASHSIM_GC_WL_HPP
