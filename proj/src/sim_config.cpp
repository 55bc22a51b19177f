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

#include "sim_config.hpp"

#include <functional>
#include <limits>

namespace flashsim {

namespace {

std::uint32_t u32(const Config& c, const std::string& path) {
  auto v = c.get_u64(path);
  if (v > std::numeric_limits<std::uint32_t>::max()) throw ConfigError(path + ": value too large");
  return static_cast<std::uint32_t>(v);
}

std::uint32_t positive(const Config& c, const std::string& path) {
  auto v = u32(c, path);
  if (v == 0) throw ConfigError(path + ": must be >= 1");
  return v;
}

Nanos duration(const Config& c, const std::string& path) {
  auto v = c.get_u64(path);
  if (v == 0) throw ConfigError(path + ": must be > 0");
  return v;
}

int small_int(const Config& c, const std::string& path) {
  auto v = c.get_i64(path);
  if (v < -1000000 || v > 1000000) throw ConfigError(path + ": out of range [-1000000, 1000000]");
  return static_cast<int>(v);
}

}  // namespace

SimConfig build_sim_config(const Config& c) {
  SimConfig s;
  auto& g = s.geometry;
  g.channels = positive(c, "hardware.channels");
  g.luns_per_channel = positive(c, "hardware.luns_per_channel");
  g.blocks_per_lun = positive(c, "hardware.blocks_per_lun");
  g.pages_per_block = positive(c, "hardware.pages_per_block");
  g.page_size_bytes = positive(c, "hardware.page_size");
  if (g.page_size_bytes % 8 != 0) throw ConfigError("hardware.page_size: must be a multiple of 8");
  if (g.blocks_per_lun < 3) throw ConfigError("hardware.blocks_per_lun: must be >= 3");
  if (g.total_pages() > (1ULL << 34)) throw ConfigError("hardware: device too large for the simulator");

  auto& t = s.timing;
  t.t_cmd = duration(c, "hardware.t_cmd");
  t.t_data = duration(c, "hardware.t_data");
  t.t_read = duration(c, "hardware.t_read");
  t.t_prog_fast = duration(c, "hardware.t_prog_fast");
  t.t_prog_slow = duration(c, "hardware.t_prog_slow");
  t.t_erase = duration(c, "hardware.t_erase");
  t.cell_type = c.get("hardware.cell_type") == "mlc" ? CellType::Mlc : CellType::Slc;
  t.copyback = c.get_bool("hardware.copyback");
  t.pipelined_program = c.get_bool("hardware.pipelined_program");
  s.ram_bytes = c.get_u64("hardware.ram_bytes");
  s.bbram_bytes = c.get_u64("hardware.bbram_bytes");

  s.ftl.scheme = c.get("controller.mapping") == "dftl" ? MappingScheme::Dftl : MappingScheme::PageMap;
  s.ftl.cmt_capacity = c.get_u64("controller.cmt_capacity");
  if (s.ftl.scheme == MappingScheme::Dftl && s.ftl.cmt_capacity == 0)
    throw ConfigError("controller.cmt_capacity: must be >= 1");
  s.ftl.overprovision = c.get_double("controller.overprovision");
  if (!(s.ftl.overprovision >= 0.0 && s.ftl.overprovision < 1.0))
    throw ConfigError("controller.overprovision: must be in [0, 1)");
  auto logical = logical_page_count(g, s.ftl.overprovision);
  // GC needs at least the reserve block plus the free-block floor beyond the
  // logical space on every LUN.
  s.gc.greediness = positive(c, "controller.gc_greediness");
  if (s.gc.greediness >= g.blocks_per_lun)
    throw ConfigError("controller.gc_greediness: must be < hardware.blocks_per_lun");
  std::uint64_t spare = g.total_pages() - logical;
  std::uint64_t needed = std::uint64_t{g.total_luns()} * (s.gc.greediness + 2) * g.pages_per_block;
  if (spare < needed)
    throw ConfigError("controller.overprovision: leaves " + std::to_string(spare) + " spare pages, " +
                      std::to_string(needed) + " needed for garbage collection at this greediness");
  s.gc.copyback = c.get_bool("controller.gc_copyback");

  s.wl.enabled = c.get_bool("controller.wl_enabled");
  s.wl.staleness_factor = c.get_double("controller.wl_staleness");
  if (!(s.wl.staleness_factor > 0)) throw ConfigError("controller.wl_staleness: must be > 0");
  s.wl.scan_interval = positive(c, "controller.wl_scan_interval");

  s.detector.enabled = c.get_bool("controller.detector_enabled");
  s.detector.filters = positive(c, "controller.bloom_filters");
  s.detector.bits = positive(c, "controller.bloom_bits");
  s.detector.hashes = positive(c, "controller.bloom_hashes");
  s.detector.window_writes = positive(c, "controller.bloom_window");
  s.detector.hot_threshold = positive(c, "controller.hot_threshold");
  if (s.detector.hot_threshold > s.detector.filters)
    throw ConfigError("controller.hot_threshold: must be <= controller.bloom_filters");

  auto& sc = s.scheduler;
  sc.class_priority[static_cast<std::size_t>(IoSource::App)] = small_int(c, "controller.prio_app");
  sc.class_priority[static_cast<std::size_t>(IoSource::Gc)] = small_int(c, "controller.prio_gc");
  sc.class_priority[static_cast<std::size_t>(IoSource::Wl)] = small_int(c, "controller.prio_wl");
  sc.class_priority[static_cast<std::size_t>(IoSource::Mapping)] = small_int(c, "controller.prio_mapping");
  sc.reads_over_writes = c.get_bool("controller.reads_over_writes");
  sc.deadline_boost = c.get_bool("controller.deadline_boost");
  sc.greedy_lookahead = c.get_bool("controller.greedy_lookahead");
  sc.interleaving = c.get_bool("controller.interleaving");

  auto qd = u32(c, "os.queue_depth");
  s.os.queue_depth = qd ? qd : 2 * g.total_luns();
  s.os.policy = parse_os_policy(c.get("os.policy"));
  s.os.open_interface = c.get_bool("os.open_interface");

  auto pre = c.get("workload.precondition");
  s.precondition = pre == "sequential"        ? Precondition::Sequential
                   : pre == "random"          ? Precondition::Random
                   : pre == "seq_then_random" ? Precondition::SeqThenRandom
                                              : Precondition::None;
  s.window = positive(c, "workload.window");

  auto indices = c.thread_indices();
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] != i)
      throw ConfigError("workload.t" + std::to_string(i) + ".type: thread indices must be contiguous from 0");
  }
  for (auto n : indices) {
    auto key = "workload.t" + std::to_string(n);
    ThreadSpec ts;
    ts.type = c.get(key + ".type");
    if (ts.type.empty()) throw ConfigError(key + ".type: missing thread type");
    ts.start = c.get_u64(key + ".start");
    ts.count = c.get_u64(key + ".count");
    ts.ios = c.get_u64(key + ".ios");
    ts.passes = u32(c, key + ".passes");
    ts.hot_fraction = c.get_double(key + ".hot_fraction");
    ts.hot_share = c.get_double(key + ".hot_share");
    ts.hint_temperature = c.get_bool(key + ".hint_temperature");
    ts.permutation = c.get_bool(key + ".permutation");
    ts.priority = small_int(c, key + ".priority");
    ts.deadline_ns = c.get_u64(key + ".deadline_ns");
    ts.r_pages = c.get_u64(key + ".r_pages");
    ts.s_pages = c.get_u64(key + ".s_pages");
    ts.partitions = u32(c, key + ".partitions");
    ts.extent_pages = u32(c, key + ".extent_pages");
    ts.window = u32(c, key + ".window");
    for (auto d : c.get_ids(key + ".depends")) {
      if (d >= static_cast<std::int64_t>(indices.size()) || d == n)
        throw ConfigError(key + ".depends: no such thread t" + std::to_string(d));
      ts.depends.push_back(static_cast<ThreadId>(d));
    }
    ts.measured = c.get_bool(key + ".measured");
    // Validate parameters against the logical space now, not mid-run.
    make_thread(ts, s.window, logical, key);
    s.threads.push_back(std::move(ts));
  }
  // Reject dependency cycles.
  std::vector<int> state(s.threads.size(), 0);
  std::function<void(std::size_t)> visit = [&](std::size_t i) {
    if (state[i] == 2) return;
    if (state[i] == 1) throw ConfigError("workload.t" + std::to_string(i) + ".depends: dependency cycle");
    state[i] = 1;
    for (auto d : s.threads[i].depends) visit(static_cast<std::size_t>(d));
    state[i] = 2;
  };
  for (std::size_t i = 0; i < s.threads.size(); ++i) visit(i);

  s.name = c.get("experiment.name");
  if (s.name.empty() || s.name.find('/') != std::string::npos)
    throw ConfigError("experiment.name: must be non-empty and contain no '/'");
  s.seed = c.get_u64("experiment.seed");
  return s;
}

}  // namespace flashsim
