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

#ifndef FLASHSIM_SIM_CONFIG_HPP
#define FLASHSIM_SIM_CONFIG_HPP

#include <string>
#include <vector>

#include "config.hpp"
#include "gc_wl.hpp"
#include "host_os.hpp"
#include "scheduler.hpp"
#include "workloads.hpp"

namespace flashsim {

enum class Precondition : std::uint8_t { None, Sequential, Random, SeqThenRandom };

// Fully typed, validated simulation parameters.
struct SimConfig {
  Geometry geometry;
  TimingProfile timing;
  std::uint64_t ram_bytes = 64ULL << 20;
  std::uint64_t bbram_bytes = 1ULL << 20;
  FtlConfig ftl;
  GcConfig gc;
  WlConfig wl;
  DetectorConfig detector;
  SchedulerConfig scheduler;
  OsConfig os;
  Precondition precondition = Precondition::None;
  std::uint32_t window = 16;
  std::vector<ThreadSpec> threads;
  std::string name = "run";
  std::uint64_t seed = 1;
};

// Converts and cross-checks a parsed config; throws ConfigError naming the
// offending key.
SimConfig build_sim_config(const Config& cfg);

}  // namespace flashsim

#endif  // FLASHSIM_SIM_CONFIG_HPP
