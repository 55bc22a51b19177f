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

#include "mapping.hpp"

#include <cmath>

#include "gc_wl.hpp"

namespace flashsim {

namespace {

SimulationError violation(const std::string& what) {
  return SimulationError(SimulationError::Kind::ModelViolation, what);
}

constexpr std::uint8_t kCached = 1;
constexpr std::uint8_t kDirty = 2;

std::size_t slot_index(Temperature t) { return t == Temperature::Hot ? 0 : 1; }

}  // namespace

std::uint64_t logical_page_count(const Geometry& geo, double overprovision) {
  if (!(overprovision >= 0.0 && overprovision < 1.0))
    throw ConfigError("controller.overprovision must be in [0, 1)");
  auto n = static_cast<std::uint64_t>(std::floor(static_cast<double>(geo.total_pages()) * (1.0 - overprovision) + 1e-9));
  if (n == 0) throw ConfigError("controller.overprovision leaves no logical pages");
  return n;
}

// ---- Ftl ------------------------------------------------------------------

Ftl::Ftl(const Geometry& geo, const FtlConfig& cfg, RamBudget& ram)
    : map_{geo},
      cfg_(cfg),
      ram_(ram),
      logical_pages_(logical_page_count(geo, cfg.overprovision)),
      entries_per_tpage_(geo.page_size_bytes / static_cast<std::uint32_t>(kMapEntryBytes)),
      tpage_count_(static_cast<std::uint32_t>((logical_pages_ + entries_per_tpage_ - 1) / entries_per_tpage_)),
      l2p_(logical_pages_, kUnmapped),
      owners_(geo.total_pages(), kNoOwner) {
  if (cfg.scheme == MappingScheme::PageMap) {
    reserved_fixed_ = logical_pages_ * kMapEntryBytes;
    if (!ram_.reserve(RamBudget::Pool::Ram, reserved_fixed_))
      throw ConfigError("hardware.ram_bytes too small for the page map (" + std::to_string(reserved_fixed_) +
                        " bytes needed)");
    return;
  }
  if (cfg.cmt_capacity == 0) throw ConfigError("controller.cmt_capacity must be >= 1");
  reserved_fixed_ = std::uint64_t{tpage_count_} * kMapEntryBytes;
  if (reserved_fixed_ + cfg.cmt_capacity * kCmtEntryBytes > ram_.capacity(RamBudget::Pool::Ram) ||
      !ram_.reserve(RamBudget::Pool::Ram, reserved_fixed_))
    throw ConfigError("hardware.ram_bytes too small for the DFTL cache and directory");
  gtd_.assign(tpage_count_, kUnmapped);
  prev_.assign(logical_pages_, kNil);
  next_.assign(logical_pages_, kNil);
  cmt_flags_.assign(logical_pages_, 0);
}

Ftl::~Ftl() {
  ram_.release(RamBudget::Pool::Ram, reserved_fixed_ + cmt_size_ * kCmtEntryBytes);
}

std::optional<PhysicalAddress> Ftl::lookup(Lpn lpn) const {
  if (lpn >= logical_pages_) throw violation("lpn " + std::to_string(lpn) + " out of range");
  if (l2p_[lpn] == kUnmapped) return std::nullopt;
  return map_.page_address(l2p_[lpn]);
}

bool Ftl::cached(Lpn lpn) const {
  return cfg_.scheme == MappingScheme::PageMap || (cmt_flags_[lpn] & kCached);
}

bool Ftl::dirty(Lpn lpn) const {
  return cfg_.scheme == MappingScheme::Dftl && (cmt_flags_[lpn] & kDirty);
}

void Ftl::lru_unlink(std::uint32_t i) {
  if (prev_[i] != kNil) next_[prev_[i]] = next_[i]; else head_ = next_[i];
  if (next_[i] != kNil) prev_[next_[i]] = prev_[i]; else tail_ = prev_[i];
  prev_[i] = next_[i] = kNil;
}

void Ftl::lru_push_front(std::uint32_t i) {
  prev_[i] = kNil;
  next_[i] = head_;
  if (head_ != kNil) prev_[head_] = i;
  head_ = i;
  if (tail_ == kNil) tail_ = i;
}

TranslationAccess Ftl::access(Lpn lpn, bool make_dirty, bool load) {
  TranslationAccess out;
  if (cfg_.scheme == MappingScheme::PageMap) return out;
  if (lpn >= logical_pages_) throw violation("lpn " + std::to_string(lpn) + " out of range");
  auto i = static_cast<std::uint32_t>(lpn);
  if (cmt_flags_[i] & kCached) {
    lru_unlink(i);
    lru_push_front(i);
    if (make_dirty) cmt_flags_[i] |= kDirty;
    return out;
  }
  out.hit = false;
  if (cmt_size_ == cfg_.cmt_capacity) {
    std::uint32_t victim = tail_;
    if (cmt_flags_[victim] & kDirty) {
      // The written-back page carries every entry of its range, so cached
      // siblings are clean afterwards.
      auto tp = tpage_of(victim);
      out.writeback_tpage = tp;
      Lpn lo = Lpn{tp} * entries_per_tpage_;
      Lpn hi = std::min<Lpn>(lo + entries_per_tpage_, logical_pages_);
      for (Lpn l = lo; l < hi; ++l) cmt_flags_[l] &= static_cast<std::uint8_t>(~kDirty);
    }
    lru_unlink(victim);
    cmt_flags_[victim] = 0;
    --cmt_size_;
    ram_.release(RamBudget::Pool::Ram, kCmtEntryBytes);
  }
  if (!ram_.reserve(RamBudget::Pool::Ram, kCmtEntryBytes))
    throw SimulationError(SimulationError::Kind::OutOfSpace, "RAM budget exhausted by the mapping cache");
  lru_push_front(i);
  cmt_flags_[i] = kCached | (make_dirty ? kDirty : 0);
  ++cmt_size_;
  if (load) out.read_tpage = tpage_of(lpn);
  return out;
}

Ftl::ReadTranslation Ftl::translate_read(Lpn lpn) {
  auto ppa = lookup(lpn);
  if (!ppa) throw SimulationError(SimulationError::Kind::Integrity, "read of unmapped lpn " + std::to_string(lpn));
  return {*ppa, access(lpn, false)};
}

std::optional<PhysicalAddress> Ftl::bind_write(Lpn lpn, const PhysicalAddress& ppa, FlashDevice& dev) {
  if (lpn >= logical_pages_) throw violation("lpn " + std::to_string(lpn) + " out of range");
  auto pid = map_.page_id(ppa);
  if (!dev.is_valid(ppa) || owners_[pid] != kNoOwner)
    throw violation("binding lpn " + std::to_string(lpn) + " to page " + to_string(ppa) +
                    " that holds no freshly programmed data");
  std::optional<PhysicalAddress> old;
  if (l2p_[lpn] != kUnmapped) {
    old = map_.page_address(l2p_[lpn]);
    dev.invalidate(*old);
    set_owner(l2p_[lpn], kNoOwner);
  } else {
    ++mapped_count_;
  }
  l2p_[lpn] = pid;
  set_owner(pid, static_cast<std::int64_t>(lpn));
  return old;
}

bool Ftl::relocate(Lpn lpn, const PhysicalAddress& from, const PhysicalAddress& to, FlashDevice& dev) {
  auto from_id = map_.page_id(from);
  auto to_id = map_.page_id(to);
  if (!dev.is_valid(to) || owners_[to_id] != kNoOwner)
    throw violation("relocation target " + to_string(to) + " was not freshly programmed");
  if (l2p_[lpn] != from_id) {
    dev.invalidate(to);
    return false;
  }
  dev.invalidate(from);
  set_owner(from_id, kNoOwner);
  l2p_[lpn] = to_id;
  set_owner(to_id, static_cast<std::int64_t>(lpn));
  return true;
}

std::optional<PhysicalAddress> Ftl::unmap(Lpn lpn, FlashDevice& dev) {
  if (lpn >= logical_pages_) throw violation("lpn " + std::to_string(lpn) + " out of range");
  if (l2p_[lpn] == kUnmapped) return std::nullopt;
  auto old = map_.page_address(l2p_[lpn]);
  dev.invalidate(old);
  set_owner(l2p_[lpn], kNoOwner);
  l2p_[lpn] = kUnmapped;
  --mapped_count_;
  return old;
}

std::optional<PhysicalAddress> Ftl::tpage_location(std::uint32_t tp) const {
  if (cfg_.scheme != MappingScheme::Dftl || tp >= tpage_count_ || gtd_[tp] == kUnmapped) return std::nullopt;
  return map_.page_address(gtd_[tp]);
}

void Ftl::bind_tpage(std::uint32_t tp, const PhysicalAddress& ppa, FlashDevice& dev) {
  auto pid = map_.page_id(ppa);
  if (!dev.is_valid(ppa) || owners_[pid] != kNoOwner)
    throw violation("translation page bound to a page that was not freshly programmed");
  if (gtd_[tp] != kUnmapped) {
    dev.invalidate(map_.page_address(gtd_[tp]));
    set_owner(gtd_[tp], kNoOwner);
  }
  gtd_[tp] = pid;
  set_owner(pid, -static_cast<std::int64_t>(tp) - 2);
}

bool Ftl::relocate_tpage(std::uint32_t tp, const PhysicalAddress& from, const PhysicalAddress& to,
                         FlashDevice& dev) {
  auto from_id = map_.page_id(from);
  if (gtd_[tp] != from_id) {
    dev.invalidate(to);
    return false;
  }
  dev.invalidate(from);
  set_owner(from_id, kNoOwner);
  gtd_[tp] = map_.page_id(to);
  set_owner(gtd_[tp], -static_cast<std::int64_t>(tp) - 2);
  return true;
}

PageOwner Ftl::owner(const PhysicalAddress& ppa) const {
  auto o = owners_[map_.page_id(ppa)];
  if (o == kNoOwner) return {};
  if (o >= 0) return {PageOwner::Kind::Data, static_cast<std::uint64_t>(o)};
  return {PageOwner::Kind::Translation, static_cast<std::uint64_t>(-o - 2)};
}

// ---- BlockAllocator -------------------------------------------------------

BlockAllocator::BlockAllocator(FlashDevice& dev, FreePool& pool)
    : dev_(dev), pool_(pool), open_(dev.geometry().total_luns()), writable_(dev.geometry().total_luns(), 0) {
  const auto& geo = dev.geometry();
  for (std::uint64_t b = 0; b < geo.total_blocks(); ++b) {
    auto lun = dev.addresses().lun_of_block(b);
    const auto& rec = dev.block(b);
    if (rec.state == BlockState::Free) {
      pool_.add(lun, rec.erase_count, b);
      writable_[lun] += geo.pages_per_block;
    } else {
      writable_[lun] += geo.pages_per_block - rec.claim_ptr;
    }
  }
}

bool BlockAllocator::has_space(std::optional<std::uint64_t> b) const {
  return b && dev_.block(*b).claim_ptr < dev_.geometry().pages_per_block;
}

std::optional<std::uint64_t> BlockAllocator::open_block(std::uint32_t lun, Temperature t) const {
  auto b = open_[lun][slot_index(t)];
  return has_space(b) ? b : std::nullopt;
}

std::optional<std::uint64_t> BlockAllocator::group_block(std::uint32_t group) const {
  auto it = groups_.find(group);
  if (it == groups_.end() || !has_space(it->second)) return std::nullopt;
  return it->second;
}

bool BlockAllocator::admissible(std::uint32_t lun, WriteStream s) const {
  if (s == WriteStream::Relocation) return writable_[lun] >= 1;
  return writable_[lun] > reserve_pages();
}

std::optional<BlockAllocator::SlotChoice> BlockAllocator::pick_block(std::uint32_t lun, Temperature t) const {
  if (auto b = open_block(lun, t)) return SlotChoice{*b, t, false};
  if (auto fb = pick_free_block(pool_, lun, t)) return SlotChoice{*fb, t, true};
  Temperature other = t == Temperature::Hot ? Temperature::Cold : Temperature::Hot;
  if (auto b = open_block(lun, other)) return SlotChoice{*b, other, false};
  return std::nullopt;
}

std::optional<Placement> BlockAllocator::choose(const PlacementRequest& req, const LunPredicate& available) const {
  const auto& geo = dev_.geometry();
  const auto& addr = dev_.addresses();
  auto make = [&](std::uint64_t block, Temperature slot, bool from_pool) {
    Placement p;
    p.block_id = block;
    p.lun = addr.lun_of_block(block);
    p.addr = addr.block_address(block, dev_.block(block).claim_ptr);
    p.slot = slot;
    p.from_free_pool = from_pool;
    return p;
  };

  if (req.locality_group) {
    if (auto gb = group_block(*req.locality_group)) {
      auto lun = addr.lun_of_block(*gb);
      if (req.only_lun && *req.only_lun != lun) return std::nullopt;
      if (!admissible(lun, req.stream) || !available(lun, dev_.block(*gb).claim_ptr)) return std::nullopt;
      return make(*gb, req.temperature, false);
    }
  }

  std::uint32_t luns = geo.total_luns();
  if (req.only_lun) {
    auto lun = *req.only_lun;
    if (!admissible(lun, req.stream)) return std::nullopt;
    auto c = pick_block(lun, req.temperature);
    if (!c || !available(lun, dev_.block(c->block).claim_ptr)) return std::nullopt;
    return make(c->block, c->slot, c->from_pool);
  }

  // Keep LUNs within two blocks of the most writable one.
  std::uint64_t most = 0;
  for (std::uint32_t l = 0; l < luns; ++l)
    if (admissible(l, req.stream)) most = std::max(most, writable_[l]);
  std::uint64_t slack = 2ULL * geo.pages_per_block;

  std::uint32_t start = cursor_[static_cast<std::size_t>(req.stream)];
  for (std::uint32_t k = 0; k < luns; ++k) {
    std::uint32_t lun = (start + k) % luns;
    if (!admissible(lun, req.stream) || writable_[lun] + slack < most) continue;
    auto c = pick_block(lun, req.temperature);
    if (!c || !available(lun, dev_.block(c->block).claim_ptr)) continue;
    return make(c->block, c->slot, c->from_pool);
  }
  return std::nullopt;
}

void BlockAllocator::commit(const Placement& p, const PlacementRequest& req) {
  const auto& rec = dev_.block(p.block_id);
  if (p.from_free_pool) {
    pool_.remove(p.lun, rec.erase_count, p.block_id);
    open_[p.lun][slot_index(p.slot)] = p.block_id;
  }
  auto page = dev_.claim_page(p.block_id);
  if (page != p.addr.page) throw violation("placement committed out of order at " + to_string(p.addr));
  --writable_[p.lun];
  if (req.locality_group) groups_[*req.locality_group] = p.block_id;
  if (!req.only_lun) cursor_[static_cast<std::size_t>(req.stream)] = (p.lun + 1) % dev_.geometry().total_luns();
}

PhysicalAddress BlockAllocator::choose_write_location(Lpn, Temperature t,
                                                     std::optional<std::uint32_t> group) const {
  PlacementRequest req;
  req.temperature = t;
  req.locality_group = group;
  auto p = choose(req, [](std::uint32_t, std::uint32_t) { return true; });
  if (!p) throw SimulationError(SimulationError::Kind::OutOfSpace, "no writable page on any LUN");
  return p->addr;
}

void BlockAllocator::on_block_erased(std::uint64_t block_id) {
  auto lun = dev_.addresses().lun_of_block(block_id);
  for (auto& slot : open_[lun])
    if (slot == block_id) slot.reset();
  for (auto it = groups_.begin(); it != groups_.end();) {
    if (it->second == block_id) it = groups_.erase(it); else ++it;
  }
  pool_.add(lun, dev_.block(block_id).erase_count, block_id);
  writable_[lun] += dev_.geometry().pages_per_block;
}

}  // namespace flashsim
