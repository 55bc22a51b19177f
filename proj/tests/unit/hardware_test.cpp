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

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <vector>

#include "hardware.hpp"

namespace flashsim {
namespace {

Geometry small_geo(std::uint32_t channels = 2, std::uint32_t luns = 2) {
  Geometry g;
  g.channels = channels;
  g.luns_per_channel = luns;
  g.blocks_per_lun = 8;
  g.pages_per_block = 8;
  return g;
}

TimingProfile slc(bool copyback = false) {
  TimingProfile t;
  t.t_cmd = 2000;
  t.t_data = 100000;
  t.t_read = 25000;
  t.t_prog_fast = 200000;
  t.t_prog_slow = 600000;
  t.t_erase = 1500000;
  t.copyback = copyback;
  return t;
}

TEST(Geometry, LunIndexAlternatesChannels) {
  auto g = small_geo(4, 2);
  EXPECT_EQ(g.lun_index(0, 0), 0u);
  EXPECT_EQ(g.lun_index(1, 0), 1u);
  EXPECT_EQ(g.lun_index(0, 1), 4u);
  for (std::uint32_t l = 0; l < g.total_luns(); ++l) EXPECT_EQ(g.lun_index(g.channel_of(l), g.lun_in_channel(l)), l);
}

TEST(AddressMap, PageIdRoundTrips) {
  AddressMap m{small_geo(2, 2)};
  for (std::uint64_t p = 0; p < m.geo.total_pages(); ++p) EXPECT_EQ(m.page_id(m.page_address(p)), p);
}

TEST(FlashDevice, IdleReadIsPhaseSum) {
  FlashDevice dev(small_geo(), slc(), true);
  auto ct = dev.execute_command(FlashOp::Read, {0, 0, 0, 0}, std::nullopt, 0);
  EXPECT_EQ(ct.start, 0u);
  EXPECT_EQ(ct.complete - ct.start, 2000u + 25000u + 100000u);
  EXPECT_EQ(ct.channel_busy, 2000u + 100000u);
}

TEST(FlashDevice, IdleEraseIsCommandPlusErase) {
  FlashDevice dev(small_geo(), slc(), true);
  auto ct = dev.execute_command(FlashOp::Erase, {1, 1, 3, 0}, std::nullopt, 50);
  EXPECT_EQ(ct.start, 50u);
  EXPECT_EQ(ct.complete - ct.start, 2000u + 1500000u);
}

TEST(FlashDevice, IdleProgramIsPhaseSum) {
  FlashDevice dev(small_geo(), slc(), true);
  auto ct = dev.execute_command(FlashOp::Program, {0, 0, 0, 0}, std::nullopt, 0);
  EXPECT_EQ(ct.complete, 2000u + 100000u + 200000u);
}

TEST(FlashDevice, MlcAlternatesProgramSpeed) {
  auto t = slc();
  t.cell_type = CellType::Mlc;
  FlashDevice dev(small_geo(), t, true);
  auto a = dev.execute_command(FlashOp::Program, {0, 0, 0, 0}, std::nullopt, 0);
  auto b = dev.execute_command(FlashOp::Program, {0, 0, 0, 1}, std::nullopt, a.complete);
  EXPECT_EQ(a.complete - a.start, 2000u + 100000u + 200000u);
  EXPECT_EQ(b.complete - b.start, 2000u + 100000u + 600000u);
}

// Hand-scheduled: LUN 0 and LUN 2 share channel 0. The second transfer
// waits for the first to leave the channel, then programs in parallel.
TEST(FlashDevice, TwoProgramsOnOneChannelOverlapCellPhases) {
  FlashDevice dev(small_geo(2, 2), slc(), true);
  auto a = dev.execute_command(FlashOp::Program, {0, 0, 0, 0}, std::nullopt, 0);
  auto b = dev.execute_command(FlashOp::Program, {0, 1, 0, 0}, std::nullopt, 0);
  EXPECT_EQ(a.start, 0u);
  EXPECT_EQ(a.complete, 302000u);
  EXPECT_EQ(b.start, 102000u);
  EXPECT_EQ(b.complete, 404000u);
  EXPECT_LT(b.complete, 2 * 302000u);
}

TEST(FlashDevice, WithoutInterleavingChannelIsHeldForWholeCommand) {
  FlashDevice dev(small_geo(2, 2), slc(), false);
  auto a = dev.execute_command(FlashOp::Program, {0, 0, 0, 0}, std::nullopt, 0);
  auto b = dev.execute_command(FlashOp::Program, {0, 1, 0, 0}, std::nullopt, 0);
  EXPECT_EQ(b.start, a.complete);
  EXPECT_EQ(b.complete, 2 * 302000u);
}

TEST(FlashDevice, ReadDataOutIsReservedAtIssue) {
  FlashDevice dev(small_geo(2, 2), slc(), true);
  // The read holds the channel for [0, 2000) and its data-out for
  // [27000, 127000). A 102000 ns program transfer fits in neither gap.
  auto r = dev.execute_command(FlashOp::Read, {0, 0, 0, 0}, std::nullopt, 0);
  auto p = dev.execute_command(FlashOp::Program, {0, 1, 0, 0}, std::nullopt, 0);
  EXPECT_EQ(r.complete, 127000u);
  EXPECT_EQ(p.start, 127000u);
  // A second read on the other LUN only needs t_cmd: it fits at 2000.
  FlashDevice dev2(small_geo(2, 2), slc(), true);
  dev2.execute_command(FlashOp::Read, {0, 0, 0, 0}, std::nullopt, 0);
  auto r2 = dev2.execute_command(FlashOp::Read, {0, 1, 0, 0}, std::nullopt, 0);
  EXPECT_EQ(r2.start, 2000u);
  EXPECT_EQ(r2.complete, 227000u);
}

TEST(FlashDevice, ContentSemantics) {
  FlashDevice dev(small_geo(), slc(true), true);
  PhysicalAddress a{0, 0, 1, 0};
  dev.execute_command(FlashOp::Program, a, std::nullopt, 0);
  dev.program_page(a, 7);
  EXPECT_EQ(dev.read_page(a), 7u);

  PhysicalAddress dst{0, 0, 2, 0};
  dev.execute_command(FlashOp::Copyback, a, dst, 0);
  dev.copyback(a, dst);
  EXPECT_EQ(dev.read_page(dst), 7u);
  EXPECT_FALSE(dev.is_valid(a));

  dev.erase_block(dev.addresses().block_id(a), 10);
  EXPECT_THROW(dev.read_page(a), SimulationError);
  EXPECT_EQ(dev.block(dev.addresses().block_id(a)).erase_count, 1u);
}

TEST(FlashDevice, RejectsOutOfOrderProgramAndErasingValidData) {
  FlashDevice dev(small_geo(), slc(), true);
  EXPECT_THROW(dev.execute_command(FlashOp::Program, {0, 0, 0, 3}, std::nullopt, 0), SimulationError);
  dev.execute_command(FlashOp::Program, {0, 0, 0, 0}, std::nullopt, 0);
  dev.program_page({0, 0, 0, 0}, 1);
  EXPECT_THROW(dev.execute_command(FlashOp::Erase, {0, 0, 0, 0}, std::nullopt, 0), SimulationError);
}

TEST(FlashDevice, CopybackNeedsSupportAndSameLun) {
  FlashDevice off(small_geo(), slc(false), true);
  EXPECT_THROW(off.execute_command(FlashOp::Copyback, {0, 0, 0, 0}, PhysicalAddress{0, 0, 1, 0}, 0),
               SimulationError);
  FlashDevice on(small_geo(), slc(true), true);
  EXPECT_THROW(on.execute_command(FlashOp::Copyback, {0, 0, 0, 0}, PhysicalAddress{1, 0, 1, 0}, 0), SimulationError);
}

// Random command stream; reconstruct each command's channel and LUN
// occupancy from the phase model and check that nothing overlaps.
TEST(FlashDevice, RandomStreamsNeverOverlapResources) {
  auto geo = small_geo(2, 2);
  auto t = slc(true);
  FlashDevice dev(geo, t, true);
  std::mt19937_64 rng(11);
  struct Span {
    Nanos a, b;
  };
  std::map<std::uint32_t, std::vector<Span>> chan, lun;
  std::vector<std::uint32_t> next_page(geo.total_blocks(), 0);
  Nanos clock = 0;
  for (int i = 0; i < 400; ++i) {
    clock += rng() % 60000;
    std::uint32_t l = rng() % geo.total_luns();
    PhysicalAddress addr{geo.channel_of(l), geo.lun_in_channel(l), static_cast<std::uint32_t>(rng() % 4), 0};
    auto bid = dev.addresses().block_id(addr);
    FlashOp op = (rng() % 2) ? FlashOp::Read : FlashOp::Program;
    if (op == FlashOp::Program) {
      if (next_page[bid] >= geo.pages_per_block) op = FlashOp::Read;
      else addr.page = next_page[bid]++;
    }
    auto ct = dev.execute_command(op, addr, std::nullopt, clock);
    EXPECT_GE(ct.start, clock);
    auto c = geo.channel_of(l);
    if (op == FlashOp::Read) {
      chan[c].push_back({ct.start, ct.start + t.t_cmd});
      chan[c].push_back({ct.complete - t.t_data, ct.complete});
      EXPECT_GE(ct.complete - t.t_data, ct.start + t.t_cmd + t.t_read);
    } else {
      chan[c].push_back({ct.start, ct.start + t.t_cmd + t.t_data});
    }
    lun[l].push_back({ct.complete - ct.lun_busy, ct.complete});
  }
  auto disjoint = [](std::vector<Span> v) {
    std::sort(v.begin(), v.end(), [](const Span& x, const Span& y) { return x.a < y.a; });
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i].a < v[i - 1].b) return false;
    return true;
  };
  for (auto& [c, v] : chan) EXPECT_TRUE(disjoint(v)) << "channel " << c;
  for (auto& [l, v] : lun) EXPECT_TRUE(disjoint(v)) << "lun " << l;
}

TEST(RamBudget, ReserveAndRelease) {
  RamBudget ram(1024, 0);
  EXPECT_TRUE(ram.reserve(RamBudget::Pool::Ram, 1024));
  EXPECT_FALSE(ram.reserve(RamBudget::Pool::Ram, 1));
  ram.release(RamBudget::Pool::Ram, 1024);
  EXPECT_TRUE(ram.reserve(RamBudget::Pool::Ram, 1));
  EXPECT_EQ(ram.used(RamBudget::Pool::Ram), 1u);
  EXPECT_FALSE(ram.reserve(RamBudget::Pool::Bbram, 1));
}

}  // namespace
}  // namespace flashsim
