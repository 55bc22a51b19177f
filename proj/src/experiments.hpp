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

#ifndef FLASHSIM_EXPERIMENTS_HPP
#define FLASHSIM_EXPERIMENTS_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"
#include "metrics.hpp"

namespace flashsim {

struct RunResult {
  std::filesystem::path dir;
  RunStats stats;
  MetricsCollector::Summary summary;
};

// Runs one simulation and writes trace.csv, metrics.csv and config_resolved
// into `dir`, which is created if needed. The seed overrides
// experiment.seed.
RunResult run_single(Config cfg, std::uint64_t seed, const std::filesystem::path& dir);

// <out>/<name>/seed=<s>
std::filesystem::path run_directory(const std::filesystem::path& out, const std::string& name, std::uint64_t seed);

struct SweepSpec {
  std::string param;  // dotted key, e.g. controller.gc_greediness
  std::vector<std::string> values;
  std::uint64_t seeds = 1;  // repetitions; seeds are base, base+1, ...
  std::uint64_t base_seed = 1;
};

struct SweepCell {
  std::string value;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  RunStats stats;
  MetricsCollector::Summary summary;
};

// Checks every (value, seed) config up front and throws ConfigError before
// running anything. Fatal simulation errors mark the cell FAILED and the
// sweep continues. Writes <out>/<name>/sweep.csv.
std::vector<SweepCell> run_sweep(const Config& base, const SweepSpec& spec, const std::filesystem::path& out);

const char* sweep_header();

}  // namespace flashsim

#endif  // FLASHSIM_EXPERIMENTS_HPP
