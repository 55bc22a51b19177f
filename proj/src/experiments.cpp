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

#include "experiments.hpp"

#include <fstream>
#include <memory>

namespace flashsim {

namespace fs = std::filesystem;

namespace {

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError(dir.string() + ": cannot create output directory");
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError(p.string() + ": cannot open for writing");
  return f;
}

std::string csv_safe(std::string s) {
  for (auto& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

}  // namespace

fs::path run_directory(const fs::path& out, const std::string& name, std::uint64_t seed) {
  return out / name / ("seed=" + std::to_string(seed));
}

RunResult run_single(Config cfg, std::uint64_t seed, const fs::path& dir) {
  cfg.set("experiment.seed", std::to_string(seed));
  SimConfig sc = build_sim_config(cfg);
  make_dir(dir);
  {
    auto f = open_out(dir / "config_resolved");
    f << cfg.resolved_text();
  }

  RunResult r;
  r.dir = dir;
  auto trace = open_out(dir / "trace.csv");
  std::vector<char> buf(1 << 20);
  trace.rdbuf()->pubsetbuf(buf.data(), static_cast<std::streamsize>(buf.size()));
  Simulator sim(sc);
  TraceWriter tw(trace);
  MetricsCollector mc(sc.geometry);
  sim.add_sink(&tw);
  sim.add_sink(&mc);
  try {
    r.stats = sim.run();
  } catch (...) {
    trace.flush();
    throw;
  }
  trace.flush();
  if (!trace) throw ConfigError((dir / "trace.csv").string() + ": write failed");
  auto m = open_out(dir / "metrics.csv");
  mc.write(m);
  if (!m) throw ConfigError((dir / "metrics.csv").string() + ": write failed");
  r.summary = mc.summary();
  return r;
}

const char* sweep_header() {
  return "param,value,seed,status,app_ios,throughput_iops,latency_mean_ns,latency_p99_ns,write_amplification,"
         "gc_migrations,wl_migrations,erases,integrity_errors,sim_end_ns,error";
}

std::vector<SweepCell> run_sweep(const Config& base, const SweepSpec& spec, const fs::path& out) {
  if (!Config::known_key(spec.param) || spec.param.rfind("experiment.", 0) == 0)
    throw ConfigError(spec.param + ": not a sweepable configuration key");
  if (spec.values.empty()) throw ConfigError("values: empty list");
  if (spec.seeds == 0) throw ConfigError("seeds: must be at least 1");

  std::vector<Config> configs;
  for (const auto& v : spec.values) {
    Config c = base;
    try {
      c.set(spec.param, v);
      for (std::uint64_t r = 0; r < spec.seeds; ++r) {
        Config cs = c;
        cs.set("experiment.seed", std::to_string(spec.base_seed + r));
        build_sim_config(cs);
      }
    } catch (const ConfigError& e) {
      throw ConfigError(spec.param + "=" + v + ": " + e.what());
    }
    configs.push_back(std::move(c));
  }

  const std::string name = base.get("experiment.name");
  const fs::path root = out / name;
  make_dir(root);
  auto csv = open_out(root / "sweep.csv");
  csv << sweep_header() << '\n';

  std::vector<SweepCell> cells;
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    for (std::uint64_t r = 0; r < spec.seeds; ++r) {
      SweepCell cell;
      cell.value = spec.values[i];
      cell.seed = spec.base_seed + r;
      fs::path dir = root / (spec.param + "=" + cell.value) / ("seed=" + std::to_string(cell.seed));
      try {
        auto res = run_single(configs[i], cell.seed, dir);
        cell.ok = true;
        cell.stats = res.stats;
        cell.summary = res.summary;
      } catch (const SimulationError& e) {
        cell.error = e.what();
      }
      const auto& s = cell.summary;
      csv << spec.param << ',' << cell.value << ',' << cell.seed << ',' << (cell.ok ? "OK" : "FAILED") << ',';
      if (cell.ok) {
        csv << s.app_ios << ',' << s.throughput << ',' << s.latency_mean << ',' << s.latency_p99 << ','
            << s.write_amplification << ',' << s.gc_migrations << ',' << s.wl_migrations << ',' << s.erases << ','
            << cell.stats.integrity_errors << ',' << cell.stats.end_time << ',';
      } else {
        csv << ",,,,,,,,,,";
      }
      csv << csv_safe(cell.error) << '\n';
      csv.flush();
      cells.push_back(std::move(cell));
    }
  }
  if (!csv) throw ConfigError((root / "sweep.csv").string() + ": write failed");
  return cells;
}

}  // namespace flashsim
