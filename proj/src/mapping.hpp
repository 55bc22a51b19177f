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

#ifndef FLASHSIM_MAPPING_HPP
#define FLASHSIM_MAPPING_HPP

#include <array>
#include <functional>
#include <optional>
#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hardware.hpp"

namespace flashsim {

enum class MappingScheme : std::uint8_t { PageMap, Dftl };

// Serialized size of one mapping entry and of one cached DFTL entry
// (address + flags + LRU links, rounded).
inline constexpr std::uint64_t kMapEntryBytes = 8;
inline constexpr std::uint64_t kCmtEntryBytes = 16;

struct FtlConfig {
  MappingScheme scheme = MappingScheme::PageMap;
  std::uint64_t cmt_capacity = 4096;
  double overprovision = 0.10;
};

std::uint64_t logical_page_count(const Geometry& geo, double overprovision);

// Side effects of a DFTL cache access: the translation page to fetch on a
// miss and the translation page to write back when a dirty entry is evicted.
struct TranslationAccess {
  bool hit = true;
  std::optional<std::uint32_t> read_tpage;
  std::optional<std::uint32_t> writeback_tpage;
};

struct PageOwner {
  enum class Kind : std::uint8_t { None, Data, Translation };
  Kind kind = Kind::None;
  std::uint64_t id = 0;  // lpn or translation page index
};

// Logical-to-physical translation. The full table is authoritative for
// content; under DFTL the cached mapping table (CMT) decides which
// translation-page IOs an access costs.
class Ftl {
 public:
  Ftl(const Geometry& geo, const FtlConfig& cfg, RamBudget& ram);
  Ftl(const Ftl&) = delete;
  Ftl& operator=(const Ftl&) = delete;
  ~Ftl();

  MappingScheme scheme() const { return cfg_.scheme; }
  std::uint64_t logical_pages() const { return logical_pages_; }
  std::uint32_t entries_per_tpage() const { return entries_per_tpage_; }
  std::uint32_t tpage_count() const { return tpage_count_; }
  std::uint32_t tpage_of(Lpn lpn) const { return static_cast<std::uint32_t>(lpn / entries_per_tpage_); }

  std::optional<PhysicalAddress> lookup(Lpn lpn) const;
  std::uint64_t mapped_count() const { return mapped_count_; }

  // CMT access. `load` = fetch the translation page on a miss (false for
  // GC relocations, which already know the new address).
  TranslationAccess access(Lpn lpn, bool make_dirty, bool load = true);

  struct ReadTranslation {
    PhysicalAddress ppa;
    TranslationAccess side;
  };
  // Throws SimulationError{Integrity} for an unmapped lpn.
  ReadTranslation translate_read(Lpn lpn);

  // Binds a completed program; returns and invalidates the previous page.
  std::optional<PhysicalAddress> bind_write(Lpn lpn, const PhysicalAddress& ppa, FlashDevice& dev);
  // Moves a live page. Returns false (and invalidates `to`) when `lpn` no
  // longer maps to `from`, i.e. the host overwrote it mid-migration.
  bool relocate(Lpn lpn, const PhysicalAddress& from, const PhysicalAddress& to, FlashDevice& dev);
  std::optional<PhysicalAddress> unmap(Lpn lpn, FlashDevice& dev);

  std::optional<PhysicalAddress> tpage_location(std::uint32_t tp) const;
  void bind_tpage(std::uint32_t tp, const PhysicalAddress& ppa, FlashDevice& dev);
  bool relocate_tpage(std::uint32_t tp, const PhysicalAddress& from, const PhysicalAddress& to, FlashDevice& dev);

  PageOwner owner(const PhysicalAddress& ppa) const;

  std::uint64_t cmt_size() const { return cmt_size_; }
  std::uint64_t cmt_capacity() const { return cfg_.cmt_capacity; }
  bool cached(Lpn lpn) const;
  bool dirty(Lpn lpn) const;

 private:
  static constexpr std::uint32_t kNil = UINT32_MAX;
  static constexpr std::uint64_t kUnmapped = UINT64_MAX;
  static constexpr std::int64_t kNoOwner = -1;

  void set_owner(std::uint64_t page_id, std::int64_t owner) { owners_[page_id] = owner; }
  void lru_unlink(std::uint32_t i);
  void lru_push_front(std::uint32_t i);

  AddressMap map_;
  FtlConfig cfg_;
  RamBudget& ram_;
  std::uint64_t logical_pages_;
  std::uint32_t entries_per_tpage_;
  std::uint32_t tpage_count_;
  std::uint64_t reserved_fixed_ = 0;

  std::vector<std::uint64_t> l2p_;      // page id or kUnmapped
  std::vector<std::int64_t> owners_;    // lpn >= 0, -(tp + 2) for translation pages
  std::vector<std::uint64_t> gtd_;      // translation page -> page id
  std::uint64_t mapped_count_ = 0;

  // CMT as an intrusive LRU list over lpns; head is most recent.
  std::vector<std::uint32_t> prev_, next_;
  std::vector<std::uint8_t> cmt_flags_;  // bit0 cached, bit1 dirty
  std::uint32_t head_ = kNil, tail_ = kNil;
  std::uint64_t cmt_size_ = 0;
};

// FREE blocks per LUN ordered by (erase_count, block id).
class FreePool {
 public:
  explicit FreePool(std::uint32_t luns) : pools_(luns) {}

  void add(std::uint32_t lun, std::uint32_t erase_count, std::uint64_t block_id) {
    pools_[lun].insert({erase_count, block_id});
  }
  void remove(std::uint32_t lun, std::uint32_t erase_count, std::uint64_t block_id) {
    pools_[lun].erase({erase_count, block_id});
  }
  std::size_t size(std::uint32_t lun) const { return pools_[lun].size(); }
  const std::set<std::pair<std::uint32_t, std::uint64_t>>& lun(std::uint32_t l) const { return pools_[l]; }

 private:
  std::vector<std::set<std::pair<std::uint32_t, std::uint64_t>>> pools_;
};

// Which budget a write draws from. Host data and translation pages must
// leave one block's worth of writable pages per LUN for relocations.
enum class WriteStream : std::uint8_t { Data, Mapping, Relocation };

struct PlacementRequest {
  Temperature temperature = Temperature::Cold;
  std::optional<std::uint32_t> locality_group;
  WriteStream stream = WriteStream::Data;
  std::optional<std::uint32_t> only_lun;
};

struct Placement {
  PhysicalAddress addr;
  std::uint64_t block_id = 0;
  std::uint32_t lun = 0;
  Temperature slot = Temperature::Cold;
  bool from_free_pool = false;
};

// Whether a program to (lun, page) could start now.
using LunPredicate = std::function<bool(std::uint32_t lun, std::uint32_t page)>;

// Write-pointer set: one OPEN block per (LUN, temperature class), LUN
// rotation and free-space admission.
class BlockAllocator {
 public:
  BlockAllocator(FlashDevice& dev, FreePool& pool);

  // Pure choice; nothing is claimed until commit().
  std::optional<Placement> choose(const PlacementRequest& req, const LunPredicate& available) const;
  void commit(const Placement& p, const PlacementRequest& req);

  // Choice on an idle device, as if every LUN could start now. Throws
  // SimulationError{OutOfSpace} when no LUN can take the write.
  PhysicalAddress choose_write_location(Lpn lpn, Temperature t,
                                        std::optional<std::uint32_t> group = std::nullopt) const;

  void on_block_erased(std::uint64_t block_id);

  std::uint64_t writable_pages(std::uint32_t lun) const { return writable_[lun]; }
  std::uint32_t free_blocks(std::uint32_t lun) const { return static_cast<std::uint32_t>(pool_.size(lun)); }
  std::uint64_t reserve_pages() const { return dev_.geometry().pages_per_block; }
  std::optional<std::uint64_t> open_block(std::uint32_t lun, Temperature t) const;
  std::optional<std::uint64_t> group_block(std::uint32_t group) const;
  bool admissible(std::uint32_t lun, WriteStream s) const;

 private:
  struct SlotChoice {
    std::uint64_t block;
    Temperature slot;
    bool from_pool;
  };
  std::optional<SlotChoice> pick_block(std::uint32_t lun, Temperature t) const;
  bool has_space(std::optional<std::uint64_t> b) const;

  FlashDevice& dev_;
  FreePool& pool_;
  std::vector<std::array<std::optional<std::uint64_t>, 2>> open_;
  std::vector<std::uint64_t> writable_;
  std::unordered_map<std::uint32_t, std::uint64_t> groups_;
  std::array<std::uint32_t, 3> cursor_{0, 0, 0};
};

}  // namespace flashsim

#endif  // FLASHSIM_MAPPING_HPP
