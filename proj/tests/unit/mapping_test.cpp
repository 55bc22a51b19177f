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

#include <list>
#include <map>
#include <random>
#include <set>

#include "gc_wl.hpp"
#include "mapping.hpp"

namespace flashsim {
namespace {

Geometry geo(std::uint32_t channels, std::uint32_t luns, std::uint32_t blocks = 16, std::uint32_t pages = 16) {
  Geometry g;
  g.channels = channels;
  g.luns_per_channel = luns;
  g.blocks_per_lun = blocks;
  g.pages_per_block = pages;
  return g;
}

// Device + allocator + FTL wired like the controller, with helpers that
// perform a complete host write on an idle device.
struct Rig {
  Geometry g;
  FlashDevice dev;
  FreePool pool;
  BlockAllocator alloc;
  Ftl ftl;
  std::uint64_t seq = 0;

  explicit Rig(const Geometry& geo, FtlConfig cfg = {})
      : g(geo), dev(geo, TimingProfile{}, true), pool(geo.total_luns()), alloc(dev, pool), ftl(geo, cfg, dev.ram()) {}

  Placement place(Temperature t = Temperature::Cold, std::optional<std::uint32_t> group = std::nullopt) {
    PlacementRequest req;
    req.temperature = t;
    req.locality_group = group;
    auto p = alloc.choose(req, [](std::uint32_t, std::uint32_t) { return true; });
    EXPECT_TRUE(p);
    alloc.commit(*p, req);
    return *p;
  }
  PhysicalAddress write(Lpn lpn, Temperature t = Temperature::Cold) {
    auto p = place(t);
    dev.program_page(p.addr, ++seq);
    ftl.bind_write(lpn, p.addr, dev);
    return p.addr;
  }
};

TEST(LogicalPages, OverprovisionFloor) {
  auto g = geo(1, 1, 10, 10);
  EXPECT_EQ(logical_page_count(g, 0.10), 90u);
  EXPECT_EQ(logical_page_count(g, 0.0), 100u);
  EXPECT_THROW(logical_page_count(g, 1.0), ConfigError);
}

TEST(PageMap, WriteThenTranslate) {
  Rig r(geo(2, 2));
  auto ppa = r.write(9);
  auto t = r.ftl.translate_read(9);
  EXPECT_EQ(t.ppa, ppa);
  EXPECT_FALSE(t.side.read_tpage);
  EXPECT_FALSE(t.side.writeback_tpage);
  EXPECT_THROW(r.ftl.translate_read(10), SimulationError);
}

TEST(PageMap, OverwriteInvalidatesOldPage) {
  Rig r(geo(2, 2));
  auto first = r.write(3);
  auto p = r.place();
  r.dev.program_page(p.addr, 99);
  auto old = r.ftl.bind_write(3, p.addr, r.dev);
  ASSERT_TRUE(old);
  EXPECT_EQ(*old, first);
  EXPECT_FALSE(r.dev.is_valid(first));
  EXPECT_EQ(r.dev.read_page(r.ftl.lookup(3).value()), 99u);
}

TEST(PageMap, ReservesEightBytesPerLogicalPage) {
  Rig r(geo(2, 2));
  EXPECT_EQ(r.dev.ram().used(RamBudget::Pool::Ram), r.ftl.logical_pages() * kMapEntryBytes);
}

TEST(Allocator, FirstWriteGoesToLunZeroLowestFreeBlock) {
  Rig r(geo(2, 2));
  auto p = r.place();
  EXPECT_EQ(p.addr, (PhysicalAddress{0, 0, 0, 0}));
}

TEST(Allocator, RoundRobinSpreadsWritesEvenly) {
  Rig r(geo(4, 2));
  std::map<std::uint32_t, int> per_lun;
  for (int i = 0; i < 16; ++i) ++per_lun[r.place().lun];
  ASSERT_EQ(per_lun.size(), 8u);
  for (auto& [l, n] : per_lun) EXPECT_EQ(n, 2) << "lun " << l;
}

TEST(Allocator, TemperatureClassesUseSeparateOpenBlocks) {
  Rig r(geo(1, 1));
  auto h1 = r.place(Temperature::Hot);
  auto h2 = r.place(Temperature::Hot);
  auto c = r.place(Temperature::Cold);
  EXPECT_EQ(h1.block_id, h2.block_id);
  EXPECT_NE(c.block_id, h1.block_id);
}

TEST(Allocator, LocalityGroupSharesOneBlock) {
  Rig r(geo(4, 2));
  auto a = r.place(Temperature::Cold, 5);
  auto b = r.place(Temperature::Cold, 5);
  auto c = r.place(Temperature::Cold, 5);
  EXPECT_EQ(a.block_id, b.block_id);
  EXPECT_EQ(b.block_id, c.block_id);
  EXPECT_EQ(c.addr.page, 2u);
}

TEST(Allocator, DataWritesStopAtReserve) {
  Rig r(geo(1, 1, 4, 4));
  int placed = 0;
  PlacementRequest req;
  while (auto p = r.alloc.choose(req, [](std::uint32_t, std::uint32_t) { return true; })) {
    r.alloc.commit(*p, req);
    ++placed;
  }
  EXPECT_EQ(placed, 16 - 4);
  req.stream = WriteStream::Relocation;
  EXPECT_TRUE(r.alloc.choose(req, [](std::uint32_t, std::uint32_t) { return true; }));
}

TEST(Relocation, PreservesPayloadAndEmptiesVictim) {
  Rig r(geo(1, 1));
  for (Lpn l = 0; l < 16; ++l) r.write(l);
  auto victim = r.dev.addresses().block_id(*r.ftl.lookup(0));
  std::map<Lpn, std::uint64_t> before;
  for (Lpn l = 0; l < 16; ++l) before[l] = r.dev.read_page(*r.ftl.lookup(l));
  auto mapped = r.ftl.mapped_count();
  for (Lpn l = 0; l < 16; ++l) {
    auto from = *r.ftl.lookup(l);
    if (r.dev.addresses().block_id(from) != victim) continue;
    PlacementRequest req;
    req.stream = WriteStream::Relocation;
    auto p = r.alloc.choose(req, [](std::uint32_t, std::uint32_t) { return true; });
    r.alloc.commit(*p, req);
    r.dev.program_page(p->addr, r.dev.read_page(from));
    EXPECT_TRUE(r.ftl.relocate(l, from, p->addr, r.dev));
  }
  EXPECT_EQ(r.dev.block(victim).valid_count, 0u);
  EXPECT_EQ(r.ftl.mapped_count(), mapped);
  for (Lpn l = 0; l < 16; ++l) EXPECT_EQ(r.dev.read_page(*r.ftl.lookup(l)), before[l]);
}

TEST(Relocation, StaleSourceIsDropped) {
  Rig r(geo(1, 1));
  auto from = r.write(4);
  r.write(4);  // host overwrite while a migration of the old copy is in flight
  auto p = r.place();
  r.dev.program_page(p.addr, 1);
  EXPECT_FALSE(r.ftl.relocate(4, from, p.addr, r.dev));
  EXPECT_FALSE(r.dev.is_valid(p.addr));
}

// Randomized relocations against a shadow copy of every lpn's payload.
TEST(Relocation, RandomMovesKeepBijection) {
  Rig r(geo(2, 1, 32, 8));
  std::mt19937_64 rng(5);
  std::map<Lpn, std::uint64_t> shadow;
  for (Lpn l = 0; l < 100; ++l) {
    r.write(l);
    shadow[l] = r.seq;
  }
  for (int i = 0; i < 150; ++i) {
    Lpn l = rng() % 100;
    auto from = *r.ftl.lookup(l);
    PlacementRequest req;
    req.stream = WriteStream::Relocation;
    req.only_lun = r.dev.addresses().lun_of(from);
    auto p = r.alloc.choose(req, [](std::uint32_t, std::uint32_t) { return true; });
    if (!p) break;
    r.alloc.commit(*p, req);
    r.dev.program_page(p->addr, r.dev.read_page(from));
    ASSERT_TRUE(r.ftl.relocate(l, from, p->addr, r.dev));
  }
  EXPECT_EQ(r.ftl.mapped_count(), 100u);
  std::set<std::uint64_t> pages;
  std::uint64_t valid = 0;
  for (const auto& b : r.dev.blocks()) valid += b.valid_count;
  for (auto& [l, tag] : shadow) {
    auto ppa = *r.ftl.lookup(l);
    EXPECT_TRUE(pages.insert(r.dev.addresses().page_id(ppa)).second);
    EXPECT_EQ(r.dev.read_page(ppa), tag);
    auto o = r.ftl.owner(ppa);
    EXPECT_EQ(o.kind, PageOwner::Kind::Data);
    EXPECT_EQ(o.id, l);
  }
  EXPECT_EQ(valid, 100u);
}

FtlConfig dftl(std::uint64_t capacity) {
  FtlConfig c;
  c.scheme = MappingScheme::Dftl;
  c.cmt_capacity = capacity;
  return c;
}

TEST(Dftl, CapacityOneDirtyEvictionCostsWritebackAndRead) {
  Rig r(geo(2, 2, 64, 64), dftl(1));
  Lpn a = 0, b = r.ftl.entries_per_tpage();  // different translation pages
  auto first = r.ftl.access(a, true);
  EXPECT_FALSE(first.hit);
  EXPECT_EQ(first.read_tpage, 0u);
  EXPECT_FALSE(first.writeback_tpage);
  auto second = r.ftl.access(b, false);
  EXPECT_EQ(second.writeback_tpage, 0u);
  EXPECT_EQ(second.read_tpage, 1u);
  EXPECT_FALSE(r.ftl.cached(a));
  EXPECT_TRUE(r.ftl.cached(b));
}

TEST(Dftl, HitHasNoSideEffects) {
  Rig r(geo(2, 2, 64, 64), dftl(4));
  r.ftl.access(3, false);
  auto again = r.ftl.access(3, true);
  EXPECT_TRUE(again.hit);
  EXPECT_FALSE(again.read_tpage);
  EXPECT_TRUE(r.ftl.dirty(3));
}

TEST(Dftl, RamTracksCachedEntries) {
  Rig r(geo(2, 2, 64, 64), dftl(10));
  auto base = r.dev.ram().used(RamBudget::Pool::Ram);
  EXPECT_EQ(base, std::uint64_t{r.ftl.tpage_count()} * kMapEntryBytes);
  for (Lpn l = 0; l < 7; ++l) r.ftl.access(l * 3, false);
  EXPECT_EQ(r.dev.ram().used(RamBudget::Pool::Ram), base + 7 * kCmtEntryBytes);
  for (Lpn l = 100; l < 120; ++l) r.ftl.access(l, false);
  EXPECT_EQ(r.dev.ram().used(RamBudget::Pool::Ram), base + 10 * kCmtEntryBytes);
}

// Independent LRU model: list of lpns (front = most recent) plus dirty set.
struct LruOracle {
  std::size_t capacity;
  std::uint32_t per_tpage;
  std::list<Lpn> order;
  std::set<Lpn> dirty;

  TranslationAccess access(Lpn lpn, bool make_dirty) {
    TranslationAccess out;
    auto it = std::find(order.begin(), order.end(), lpn);
    if (it != order.end()) {
      order.erase(it);
      order.push_front(lpn);
      if (make_dirty) dirty.insert(lpn);
      return out;
    }
    out.hit = false;
    if (order.size() == capacity) {
      Lpn victim = order.back();
      order.pop_back();
      if (dirty.count(victim)) {
        auto tp = static_cast<std::uint32_t>(victim / per_tpage);
        out.writeback_tpage = tp;
        for (auto d = dirty.begin(); d != dirty.end();) {
          if (*d / per_tpage == tp) d = dirty.erase(d); else ++d;
        }
      }
      dirty.erase(victim);
    }
    order.push_front(lpn);
    if (make_dirty) dirty.insert(lpn);
    out.read_tpage = static_cast<std::uint32_t>(lpn / per_tpage);
    return out;
  }
};

TEST(Dftl, RandomAccessesMatchLruReplay) {
  for (std::uint64_t cap : {1, 3, 17, 64}) {
    Rig r(geo(2, 2, 64, 64), dftl(cap));
    LruOracle o{cap, r.ftl.entries_per_tpage(), {}, {}};
    std::mt19937_64 rng(cap);
    for (int i = 0; i < 3000; ++i) {
      // Skewed draws so hits, clean and dirty evictions all occur.
      Lpn lpn = (rng() % 4 == 0) ? rng() % 4000 : rng() % (2 * cap + 2);
      bool dirty = rng() % 2;
      auto got = r.ftl.access(lpn, dirty);
      auto want = o.access(lpn, dirty);
      ASSERT_EQ(got.hit, want.hit) << "cap " << cap << " step " << i;
      ASSERT_EQ(got.read_tpage, want.read_tpage) << "cap " << cap << " step " << i;
      ASSERT_EQ(got.writeback_tpage, want.writeback_tpage) << "cap " << cap << " step " << i;
    }
    EXPECT_EQ(r.ftl.cmt_size(), o.order.size());
  }
}

TEST(Dftl, RelocationInsertDoesNotLoad) {
  Rig r(geo(2, 2, 64, 64), dftl(4));
  auto side = r.ftl.access(42, true, false);
  EXPECT_FALSE(side.hit);
  EXPECT_FALSE(side.read_tpage);
  EXPECT_TRUE(r.ftl.dirty(42));
}

TEST(FreeBlockPick, HotYoungestColdOldest) {
  FreePool pool(1);
  pool.add(0, 1, 10);
  pool.add(0, 9, 11);
  EXPECT_EQ(pick_free_block(pool, 0, Temperature::Hot), 10u);
  EXPECT_EQ(pick_free_block(pool, 0, Temperature::Cold), 11u);
  FreePool ties(1);
  ties.add(0, 3, 7);
  ties.add(0, 3, 2);
  EXPECT_EQ(pick_free_block(ties, 0, Temperature::Hot), 2u);
  EXPECT_EQ(pick_free_block(ties, 0, Temperature::Cold), 2u);
}

}  // namespace
}  // namespace flashsim
