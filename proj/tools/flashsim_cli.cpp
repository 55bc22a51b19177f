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

// flashsim command-line driver. Links only the C API.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "flashsim/flashsim.h"

namespace {

using ConfigPtr = std::unique_ptr<flashsim_config, decltype(&flashsim_config_free)>;

int exit_code(flashsim_status s) {
  switch (s) {
    case FLASHSIM_OK: return 0;
    case FLASHSIM_ERR_CONFIG:
    case FLASHSIM_ERR_ARGUMENT: return 1;
    default: return 2;
  }
}

int report(flashsim_status s) {
  if (s != FLASHSIM_OK) std::cerr << "flashsim: error: " << flashsim_last_error() << '\n';
  return exit_code(s);
}

std::string get(const flashsim_config* cfg, const char* key) {
  std::size_t n = 0;
  if (flashsim_config_get(cfg, key, nullptr, 0, &n) != FLASHSIM_OK) return {};
  std::string s(n + 1, '\0');
  flashsim_config_get(cfg, key, s.data(), s.size(), nullptr);
  s.resize(n);
  return s;
}

flashsim_status load(const std::string& path, ConfigPtr& out) {
  flashsim_config* raw = nullptr;
  auto s = flashsim_config_load(path.c_str(), &raw);
  out.reset(raw);
  return s;
}

std::string default_out(const std::string& given) {
  if (!given.empty()) return given;
  if (const char* env = std::getenv("FLASHSIM_OUT"); env && *env) return env;
  return "out";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flashsim: discrete-event SSD simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", flashsim_version());

  std::string config, out, param, values;
  std::uint64_t seed = 0, seeds = 0;

  auto* run = app.add_subcommand("run", "run one simulation");
  run->add_option("--config", config, "configuration file")->required();
  auto* run_seed = run->add_option("--seed", seed, "RNG seed (default: experiment.seed)");
  run->add_option("--out", out, "output root (default: $FLASHSIM_OUT, else ./out)");

  auto* sweep = app.add_subcommand("sweep", "vary one parameter across values and seeds");
  sweep->add_option("--config", config, "configuration file")->required();
  auto* sw_param = sweep->add_option("--param", param, "dotted key, e.g. controller.gc_greediness");
  auto* sw_values = sweep->add_option("--values", values, "comma-separated values");
  auto* sw_seeds = sweep->add_option("--seeds", seeds, "repetitions with distinct seeds");
  auto* sw_seed = sweep->add_option("--seed", seed, "first seed (default: experiment.seed)");
  sweep->add_option("--out", out, "output root (default: $FLASHSIM_OUT, else ./out)");

  auto* validate = app.add_subcommand("validate", "check a configuration");
  validate->add_option("--config", config, "configuration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "flashsim: error: " << e.what() << '\n';
    return 1;
  }

  ConfigPtr cfg(nullptr, &flashsim_config_free);
  if (auto s = load(config, cfg); s != FLASHSIM_OK) return report(s);

  if (validate->parsed()) {
    if (auto s = flashsim_config_validate(cfg.get()); s != FLASHSIM_OK) return report(s);
    std::cout << config << ": ok\n";
    return 0;
  }

  if (run->parsed()) {
    if (run_seed->count() == 0) seed = std::stoull(get(cfg.get(), "experiment.seed"));
    std::string dir = default_out(out) + "/" + get(cfg.get(), "experiment.name") + "/seed=" + std::to_string(seed);
    flashsim_stats st{};
    if (auto s = flashsim_run_to_dir(cfg.get(), seed, dir.c_str(), &st); s != FLASHSIM_OK) return report(s);
    std::cout << dir << '\n';
    if (st.integrity_errors || st.lost_mappings) {
      std::cerr << "flashsim: error: " << st.integrity_errors << " integrity errors, " << st.lost_mappings
                << " lost mappings\n";
      return 2;
    }
    return 0;
  }

  if (sw_param->count() == 0) param = get(cfg.get(), "experiment.param");
  if (sw_values->count() == 0) values = get(cfg.get(), "experiment.values");
  if (sw_seeds->count() == 0) seeds = std::stoull(get(cfg.get(), "experiment.seeds"));
  if (sw_seed->count() == 0) seed = std::stoull(get(cfg.get(), "experiment.seed"));
  if (param.empty()) {
    std::cerr << "flashsim: error: --param not given and experiment.param unset\n";
    return 1;
  }
  std::size_t failed = 0;
  std::string root = default_out(out);
  auto s = flashsim_sweep(cfg.get(), param.c_str(), values.c_str(), seeds, seed, root.c_str(), &failed);
  if (s != FLASHSIM_OK) return report(s);
  std::cout << root << "/" << get(cfg.get(), "experiment.name") << "/sweep.csv\n";
  if (failed) std::cerr << "flashsim: " << failed << " sweep cell(s) FAILED\n";
  return 0;
}
