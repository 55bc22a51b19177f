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

#ifndef FLASHSIM_HARDWARE_HPP
#define FLASHSIM_HARDWARE_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "types.hpp"

namespace flashsim {

// Shape of the flash array. LUNs are numbered channel-striped:
// lun_index = lun * channels + channel, so consecutive indices alternate
// channels.
struct Geometry {
  std::uint32_t channels = 4;
  std::uint32_t luns_per_channel = 2;
  std::uint32_t blocks_per_lun = 128;
  std::uint32_t pages_per_block = 64;
  std::uint32_t page_size_bytes = 4096;

  std::uint32_t total_luns() const { return channels * luns_per_channel; }
  std::uint64_t total_blocks() const { return std::uint64_t{total_luns()} * blocks_per_lun; }
  std::uint64_t total_pages() const { return total_blocks() * pages_per_block; }

  std::uint32_t lun_index(std::uint32_t channel, std::uint32_t lun) const { return lun * channels + channel; }
  std::uint32_t channel_of(std::uint32_t lun_index) const { return lun_index % channels; }
  std::uint32_t lun_in_channel(std::uint32_t lun_index) const { return lun_index / channels; }

  void validate() const;
};

struct PhysicalAddress {
  std::uint32_t channel = 0;
  std::uint32_t lun = 0;
  std::uint32_t block = 0;
  std::uint32_t page = 0;

  bool operator==(const PhysicalAddress&) const = default;
};

std::string to_string(const PhysicalAddress& a);

// Linearisation helpers between addresses and dense indices.
struct AddressMap {
  Geometry geo;

  std::uint32_t lun_of(const PhysicalAddress& a) const { return geo.lun_index(a.channel, a.lun); }
  std::uint64_t block_id(const PhysicalAddress& a) const {
    return std::uint64_t{lun_of(a)} * geo.blocks_per_lun + a.block;
  }
  std::uint64_t page_id(const PhysicalAddress& a) const { return block_id(a) * geo.pages_per_block + a.page; }
  std::uint32_t lun_of_block(std::uint64_t block_id) const {
    return static_cast<std::uint32_t>(block_id / geo.blocks_per_lun);
  }
  PhysicalAddress block_address(std::uint64_t block_id, std::uint32_t page = 0) const {
    auto lun = lun_of_block(block_id);
    return {geo.channel_of(lun), geo.lun_in_channel(lun),
            static_cast<std::uint32_t>(block_id % geo.blocks_per_lun), page};
  }
  PhysicalAddress page_address(std::uint64_t page_id) const {
    return block_address(page_id / geo.pages_per_block, static_cast<std::uint32_t>(page_id % geo.pages_per_block));
  }
  bool valid(const PhysicalAddress& a) const {
    return a.channel < geo.channels && a.lun < geo.luns_per_channel && a.block < geo.blocks_per_lun &&
           a.page < geo.pages_per_block;
  }
};

enum class CellType : std::uint8_t { Slc, Mlc };

struct TimingProfile {
  Nanos t_cmd = 2'000;
  Nanos t_data = 100'000;
  Nanos t_read = 25'000;
  Nanos t_prog_fast = 200'000;
  Nanos t_prog_slow = 600'000;
  Nanos t_erase = 1'500'000;
  CellType cell_type = CellType::Slc;
  bool copyback = false;
  bool pipelined_program = false;

  // MLC alternates fast (even page) and slow (odd page) programs.
  Nanos program_time(std::uint32_t page) const {
    return (cell_type == CellType::Mlc && (page & 1U)) ? t_prog_slow : t_prog_fast;
  }
  void validate() const;
};

enum class FlashOp : std::uint8_t { Read, Program, Erase, Copyback };

enum class BlockState : std::uint8_t { Free, Open, Full };

struct BlockRecord {
  BlockState state = BlockState::Free;
  std::uint32_t write_ptr = 0;    // next page to complete programming
  std::uint32_t claim_ptr = 0;    // next page handed out to an issued program
  std::uint32_t valid_count = 0;
  std::uint32_t erase_count = 0;
  Nanos last_erase_time = 0;
  std::uint64_t age_rank = 0;     // device-wide erase ordinal of the last erase
  bool relocating = false;        // victim of an in-flight GC/WL job
};

struct CommandTiming {
  Nanos start = 0;
  Nanos complete = 0;
  Nanos channel_busy = 0;
  Nanos lun_busy = 0;
  // Instants at which a resource touched by this command frees up.
  std::array<Nanos, 4> wake_points{};
  std::uint8_t wake_count = 0;
};

class RamBudget {
 public:
  enum class Pool { Ram, Bbram };

  RamBudget(std::uint64_t ram_capacity, std::uint64_t bbram_capacity)
      : capacity_{ram_capacity, bbram_capacity} {}

  bool reserve(Pool pool, std::uint64_t bytes);
  void release(Pool pool, std::uint64_t bytes);
  std::uint64_t used(Pool pool) const { return used_[idx(pool)]; }
  std::uint64_t capacity(Pool pool) const { return capacity_[idx(pool)]; }

 private:
  static std::size_t idx(Pool p) { return p == Pool::Ram ? 0 : 1; }
  std::array<std::uint64_t, 2> capacity_;
  std::array<std::uint64_t, 2> used_{0, 0};
};

// The flash array: per-block state, per-page content tags, and channel/LUN
// occupancy timelines.
class FlashDevice {
 public:
  FlashDevice(const Geometry& geo, const TimingProfile& timing, bool interleaving,
              std::uint64_t ram_bytes = 64ULL << 20, std::uint64_t bbram_bytes = 1ULL << 20);

  const Geometry& geometry() const { return map_.geo; }
  const AddressMap& addresses() const { return map_; }
  const TimingProfile& timing() const { return timing_; }
  bool interleaving() const { return interleaving_; }

  // ---- occupancy -------------------------------------------------------
  // True when a command of this kind on this LUN can begin at `at`.
  // `page` selects the program duration (MLC parity) for Program/Copyback.
  bool can_start(FlashOp op, std::uint32_t lun, std::uint32_t page, Nanos at) const;
  // Reserves resources for a command starting at `at`; caller has checked
  // can_start().
  CommandTiming reserve(FlashOp op, std::uint32_t lun, std::uint32_t page, Nanos at);
  bool channel_free(std::uint32_t channel, Nanos from, Nanos len) const;
  // False when no command of any kind can start on the LUN at `at`.
  bool lun_may_start(std::uint32_t lun, Nanos at) const {
    return luns_[lun].busy_until <= at || pipelinable(luns_[lun], at);
  }
  Nanos lun_busy_until(std::uint32_t lun) const { return luns_[lun].busy_until; }
  // Command-only channel reservation (used for TRIM).
  CommandTiming reserve_channel_command(std::uint32_t channel, Nanos at);
  // Earliest-start search plus reservation, with full precondition checks.
  // Programs and copybacks claim their destination page.
  CommandTiming execute_command(FlashOp op, const PhysicalAddress& addr,
                                const std::optional<PhysicalAddress>& dst, Nanos earliest);
  void prune(Nanos now);

  Nanos channel_busy_total(std::uint32_t channel) const { return channel_busy_total_[channel]; }
  Nanos lun_busy_total(std::uint32_t lun) const { return lun_busy_total_[lun]; }

  // ---- block & page state ------------------------------------------------
  BlockRecord& block(std::uint64_t block_id) { return blocks_[block_id]; }
  const BlockRecord& block(std::uint64_t block_id) const { return blocks_[block_id]; }
  const std::vector<BlockRecord>& blocks() const { return blocks_; }

  // Hands out the next in-order page of a block to an issued program.
  std::uint32_t claim_page(std::uint64_t block_id);
  void program_page(const PhysicalAddress& addr, std::uint64_t tag);
  // Reads a valid page's tag; integrity error otherwise.
  std::uint64_t read_page(const PhysicalAddress& addr) const;
  // Reads whatever was programmed since the last erase, valid or not.
  std::uint64_t peek_page(const PhysicalAddress& addr) const;
  bool is_valid(const PhysicalAddress& addr) const;
  bool is_programmed(const PhysicalAddress& addr) const;
  void invalidate(const PhysicalAddress& addr);
  void erase_block(std::uint64_t block_id, Nanos now);
  // Intra-LUN copy of a page; the source's valid bit moves to the destination.
  void copyback(const PhysicalAddress& src, const PhysicalAddress& dst);

  std::uint64_t total_erases() const { return erase_seq_; }

  RamBudget& ram() { return ram_; }
  const RamBudget& ram() const { return ram_; }

 private:
  struct Interval {
    Nanos start;
    Nanos end;
  };
  struct LunTimeline {
    Nanos busy_until = 0;
    FlashOp last_op = FlashOp::Read;
    Nanos last_cell_start = 0;
  };

  void insert_interval(std::uint32_t channel, Nanos start, Nanos end);
  Nanos first_gap(std::uint32_t channel, Nanos from, Nanos len) const;
  bool pipelinable(const LunTimeline& lt, Nanos at) const;
  void check_address(const PhysicalAddress& a) const;

  AddressMap map_;
  TimingProfile timing_;
  bool interleaving_;
  std::vector<std::vector<Interval>> channel_slots_;
  std::vector<LunTimeline> luns_;
  std::vector<Nanos> channel_busy_total_;
  std::vector<Nanos> lun_busy_total_;

  std::vector<BlockRecord> blocks_;
  std::vector<std::uint64_t> tags_;
  std::vector<std::uint64_t> valid_bits_;
  std::uint64_t erase_seq_ = 0;
  RamBudget ram_;
};

}  // namespace flashsim

#endif  // FLASHSIM_HARDWARE_HPP
