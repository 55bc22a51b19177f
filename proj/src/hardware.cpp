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

#include "hardware.hpp"

#include <algorithm>

namespace flashsim {

namespace {

SimulationError violation(const std::string& what) {
  return SimulationError(SimulationError::Kind::ModelViolation, what);
}

SimulationError integrity(const std::string& what) {
  return SimulationError(SimulationError::Kind::Integrity, what);
}

}  // namespace

void Geometry::validate() const {
  if (channels < 1 || luns_per_channel < 1 || blocks_per_lun < 1 || pages_per_block < 1 || page_size_bytes < 1)
    throw ConfigError("hardware geometry counts must all be >= 1");
  if (page_size_bytes % 8 != 0) throw ConfigError("hardware.page_size must be a multiple of 8");
}

void TimingProfile::validate() const {
  if (t_cmd == 0 || t_data == 0 || t_read == 0 || t_prog_fast == 0 || t_erase == 0)
    throw ConfigError("hardware timings must all be > 0");
  if (cell_type == CellType::Mlc && t_prog_slow == 0) throw ConfigError("hardware.t_prog_slow must be > 0 for MLC");
}

std::string to_string(const PhysicalAddress& a) {
  return std::to_string(a.channel) + ":" + std::to_string(a.lun) + ":" + std::to_string(a.block) + ":" +
         std::to_string(a.page);
}

bool RamBudget::reserve(Pool pool, std::uint64_t bytes) {
  auto i = idx(pool);
  if (used_[i] + bytes > capacity_[i]) return false;
  used_[i] += bytes;
  return true;
}

void RamBudget::release(Pool pool, std::uint64_t bytes) {
  auto i = idx(pool);
  used_[i] = bytes > used_[i] ? 0 : used_[i] - bytes;
}

FlashDevice::FlashDevice(const Geometry& geo, const TimingProfile& timing, bool interleaving,
                         std::uint64_t ram_bytes, std::uint64_t bbram_bytes)
    : map_{geo},
      timing_(timing),
      interleaving_(interleaving),
      channel_slots_(geo.channels),
      luns_(geo.total_luns()),
      channel_busy_total_(geo.channels, 0),
      lun_busy_total_(geo.total_luns(), 0),
      blocks_(geo.total_blocks()),
      tags_(geo.total_pages(), 0),
      valid_bits_((geo.total_pages() + 63) / 64, 0),
      ram_(ram_bytes, bbram_bytes) {
  geo.validate();
  timing.validate();
}

// ---- occupancy ------------------------------------------------------------

bool FlashDevice::channel_free(std::uint32_t channel, Nanos from, Nanos len) const {
  Nanos to = from + len;
  for (const auto& iv : channel_slots_[channel]) {
    if (iv.start >= to) break;
    if (iv.end > from) return false;
  }
  return true;
}

Nanos FlashDevice::first_gap(std::uint32_t channel, Nanos from, Nanos len) const {
  Nanos candidate = from;
  for (const auto& iv : channel_slots_[channel]) {
    if (iv.end <= candidate) continue;
    if (iv.start >= candidate + len) break;
    candidate = iv.end;
  }
  return candidate;
}

void FlashDevice::insert_interval(std::uint32_t channel, Nanos start, Nanos end) {
  auto& slots = channel_slots_[channel];
  auto it = std::upper_bound(slots.begin(), slots.end(), start,
                             [](Nanos s, const Interval& iv) { return s < iv.start; });
  slots.insert(it, Interval{start, end});
  channel_busy_total_[channel] += end - start;
}

void FlashDevice::prune(Nanos now) {
  for (auto& slots : channel_slots_) {
    auto keep = std::find_if(slots.begin(), slots.end(), [now](const Interval& iv) { return iv.end > now; });
    slots.erase(slots.begin(), keep);
  }
}

bool FlashDevice::pipelinable(const LunTimeline& lt, Nanos at) const {
  return timing_.pipelined_program && interleaving_ && lt.last_op == FlashOp::Program && lt.last_cell_start <= at;
}

bool FlashDevice::can_start(FlashOp op, std::uint32_t lun, std::uint32_t page, Nanos at) const {
  const auto& t = timing_;
  const auto& lt = luns_[lun];
  std::uint32_t ch = map_.geo.channel_of(lun);
  bool lun_free = lt.busy_until <= at;
  if (!interleaving_) {
    if (!lun_free) return false;
    Nanos hold = 0;
    switch (op) {
      case FlashOp::Read: hold = t.t_cmd + t.t_read + t.t_data; break;
      case FlashOp::Program: hold = t.t_cmd + t.t_data + t.program_time(page); break;
      case FlashOp::Erase: hold = t.t_cmd + t.t_erase; break;
      case FlashOp::Copyback: hold = t.t_cmd + t.t_read + t.program_time(page); break;
    }
    return channel_free(ch, at, hold);
  }
  switch (op) {
    case FlashOp::Program:
      if (!lun_free && !pipelinable(lt, at)) return false;
      return channel_free(ch, at, t.t_cmd + t.t_data);
    case FlashOp::Read:
    case FlashOp::Erase:
    case FlashOp::Copyback:
      return lun_free && channel_free(ch, at, t.t_cmd);
  }
  return false;
}

CommandTiming FlashDevice::reserve(FlashOp op, std::uint32_t lun, std::uint32_t page, Nanos at) {
  const auto& t = timing_;
  auto& lt = luns_[lun];
  std::uint32_t ch = map_.geo.channel_of(lun);
  CommandTiming ct;
  ct.start = at;
  auto wake = [&ct](Nanos w) { ct.wake_points[ct.wake_count++] = w; };

  if (!interleaving_) {
    Nanos hold = 0;
    switch (op) {
      case FlashOp::Read: hold = t.t_cmd + t.t_read + t.t_data; break;
      case FlashOp::Program: hold = t.t_cmd + t.t_data + t.program_time(page); break;
      case FlashOp::Erase: hold = t.t_cmd + t.t_erase; break;
      case FlashOp::Copyback: hold = t.t_cmd + t.t_read + t.program_time(page); break;
    }
    insert_interval(ch, at, at + hold);
    ct.complete = at + hold;
    ct.channel_busy = hold;
    ct.lun_busy = hold;
    lt.busy_until = ct.complete;
    lt.last_op = op;
    lt.last_cell_start = at;
    lun_busy_total_[lun] += hold;
    wake(ct.complete);
    return ct;
  }

  switch (op) {
    case FlashOp::Read: {
      insert_interval(ch, at, at + t.t_cmd);
      Nanos out = first_gap(ch, at + t.t_cmd + t.t_read, t.t_data);
      insert_interval(ch, out, out + t.t_data);
      ct.complete = out + t.t_data;
      ct.channel_busy = t.t_cmd + t.t_data;
      ct.lun_busy = ct.complete - at;
      lt.busy_until = ct.complete;
      lt.last_cell_start = at + t.t_cmd;
      wake(at + t.t_cmd);
      wake(ct.complete);
      break;
    }
    case FlashOp::Program: {
      Nanos data_end = at + t.t_cmd + t.t_data;
      insert_interval(ch, at, data_end);
      ct.channel_busy = t.t_cmd + t.t_data;
      if (lt.busy_until > at) {
        // Pipelined: data went into the cache register while the previous
        // program's cell phase was still running.
        Nanos cell = std::max(data_end, lt.busy_until);
        ct.complete = cell + t.program_time(page);
        ct.lun_busy = ct.complete - cell;
        lt.last_cell_start = cell;
        wake(cell);
      } else {
        ct.complete = data_end + t.program_time(page);
        ct.lun_busy = ct.complete - at;
        lt.last_cell_start = data_end;
      }
      lt.busy_until = ct.complete;
      wake(data_end);
      wake(ct.complete);
      break;
    }
    case FlashOp::Erase: {
      insert_interval(ch, at, at + t.t_cmd);
      ct.complete = at + t.t_cmd + t.t_erase;
      ct.channel_busy = t.t_cmd;
      ct.lun_busy = ct.complete - at;
      lt.busy_until = ct.complete;
      lt.last_cell_start = at + t.t_cmd;
      wake(at + t.t_cmd);
      wake(ct.complete);
      break;
    }
    case FlashOp::Copyback: {
      insert_interval(ch, at, at + t.t_cmd);
      ct.complete = at + t.t_cmd + t.t_read + t.program_time(page);
      ct.channel_busy = t.t_cmd;
      ct.lun_busy = ct.complete - at;
      lt.busy_until = ct.complete;
      lt.last_cell_start = at + t.t_cmd;
      wake(at + t.t_cmd);
      wake(ct.complete);
      break;
    }
  }
  lt.last_op = op;
  lun_busy_total_[lun] += ct.lun_busy;
  return ct;
}

CommandTiming FlashDevice::reserve_channel_command(std::uint32_t channel, Nanos at) {
  CommandTiming ct;
  ct.start = at;
  ct.complete = at + timing_.t_cmd;
  ct.channel_busy = timing_.t_cmd;
  insert_interval(channel, at, ct.complete);
  ct.wake_points[ct.wake_count++] = ct.complete;
  return ct;
}

void FlashDevice::check_address(const PhysicalAddress& a) const {
  if (!map_.valid(a)) throw violation("physical address out of range: " + to_string(a));
}

CommandTiming FlashDevice::execute_command(FlashOp op, const PhysicalAddress& addr,
                                           const std::optional<PhysicalAddress>& dst, Nanos earliest) {
  check_address(addr);
  std::uint32_t lun = map_.lun_of(addr);
  std::uint32_t page = addr.page;
  switch (op) {
    case FlashOp::Program: {
      const auto& b = blocks_[map_.block_id(addr)];
      if (b.state == BlockState::Full || addr.page != b.claim_ptr)
        throw violation("out-of-order program at " + to_string(addr));
      break;
    }
    case FlashOp::Erase:
      if (blocks_[map_.block_id(addr)].valid_count > 0)
        throw integrity("erase issued for block holding valid pages at " + to_string(addr));
      break;
    case FlashOp::Copyback: {
      if (!timing_.copyback)
        throw SimulationError(SimulationError::Kind::UnsupportedCommand, "copyback not supported by this device");
      if (!dst) throw violation("copyback without destination");
      check_address(*dst);
      if (map_.lun_of(*dst) != lun)
        throw SimulationError(SimulationError::Kind::UnsupportedCommand, "copyback across LUNs");
      const auto& b = blocks_[map_.block_id(*dst)];
      if (b.state == BlockState::Full || dst->page != b.claim_ptr)
        throw violation("out-of-order copyback destination " + to_string(*dst));
      page = dst->page;
      break;
    }
    case FlashOp::Read: break;
  }

  std::vector<Nanos> candidates{earliest, luns_[lun].busy_until, luns_[lun].last_cell_start};
  for (const auto& iv : channel_slots_[map_.geo.channel_of(lun)]) candidates.push_back(iv.end);
  std::sort(candidates.begin(), candidates.end());
  for (Nanos c : candidates) {
    if (c < earliest) continue;
    if (!can_start(op, lun, page, c)) continue;
    if (op == FlashOp::Program) claim_page(map_.block_id(addr));
    if (op == FlashOp::Copyback) claim_page(map_.block_id(*dst));
    return reserve(op, lun, page, c);
  }
  // Unreachable: after the last reservation ends everything is free.
  throw violation("no feasible start for command");
}

// ---- state ----------------------------------------------------------------

std::uint32_t FlashDevice::claim_page(std::uint64_t block_id) {
  auto& b = blocks_[block_id];
  if (b.claim_ptr >= map_.geo.pages_per_block) throw violation("claim on a fully claimed block");
  if (b.state == BlockState::Free) b.state = BlockState::Open;
  return b.claim_ptr++;
}

void FlashDevice::program_page(const PhysicalAddress& addr, std::uint64_t tag) {
  check_address(addr);
  auto& b = blocks_[map_.block_id(addr)];
  if (b.state == BlockState::Full || addr.page != b.write_ptr)
    throw violation("out-of-order program at " + to_string(addr) + " (write pointer " +
                    std::to_string(b.write_ptr) + ")");
  auto pid = map_.page_id(addr);
  tags_[pid] = tag;
  valid_bits_[pid / 64] |= (1ULL << (pid % 64));
  ++b.valid_count;
  ++b.write_ptr;
  if (b.claim_ptr < b.write_ptr) b.claim_ptr = b.write_ptr;
  b.state = b.write_ptr == map_.geo.pages_per_block ? BlockState::Full : BlockState::Open;
}

bool FlashDevice::is_valid(const PhysicalAddress& addr) const {
  auto pid = map_.page_id(addr);
  return (valid_bits_[pid / 64] >> (pid % 64)) & 1ULL;
}

bool FlashDevice::is_programmed(const PhysicalAddress& addr) const {
  return addr.page < blocks_[map_.block_id(addr)].write_ptr;
}

std::uint64_t FlashDevice::read_page(const PhysicalAddress& addr) const {
  check_address(addr);
  if (!is_valid(addr)) throw integrity("read of invalid or unwritten page " + to_string(addr));
  return tags_[map_.page_id(addr)];
}

std::uint64_t FlashDevice::peek_page(const PhysicalAddress& addr) const {
  check_address(addr);
  if (!is_programmed(addr)) throw integrity("read of unprogrammed page " + to_string(addr));
  return tags_[map_.page_id(addr)];
}

void FlashDevice::invalidate(const PhysicalAddress& addr) {
  check_address(addr);
  auto pid = map_.page_id(addr);
  if (!is_valid(addr)) throw violation("invalidate of a page that is not valid: " + to_string(addr));
  valid_bits_[pid / 64] &= ~(1ULL << (pid % 64));
  --blocks_[map_.block_id(addr)].valid_count;
}

void FlashDevice::erase_block(std::uint64_t block_id, Nanos now) {
  auto& b = blocks_[block_id];
  if (b.valid_count > 0)
    throw integrity("erase of block " + std::to_string(block_id) + " holding " + std::to_string(b.valid_count) +
                    " valid pages");
  std::uint64_t first = block_id * map_.geo.pages_per_block;
  for (std::uint32_t p = 0; p < map_.geo.pages_per_block; ++p) tags_[first + p] = 0;
  b.state = BlockState::Free;
  b.write_ptr = 0;
  b.claim_ptr = 0;
  b.valid_count = 0;
  ++b.erase_count;
  b.last_erase_time = now;
  b.age_rank = ++erase_seq_;
  b.relocating = false;
}

void FlashDevice::copyback(const PhysicalAddress& src, const PhysicalAddress& dst) {
  if (map_.lun_of(src) != map_.lun_of(dst))
    throw SimulationError(SimulationError::Kind::UnsupportedCommand, "copyback across LUNs");
  std::uint64_t tag = read_page(src);
  program_page(dst, tag);
  invalidate(src);
}

}  // namespace flashsim
