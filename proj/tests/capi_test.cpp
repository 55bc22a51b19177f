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

// Exercises the shared library through its C header only.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "flashsim/flashsim.h"

namespace {

namespace fs = std::filesystem;

const char* kTiny =
    "[hardware]\nchannels = 2\nluns_per_channel = 2\nblocks_per_lun = 32\npages_per_block = 16\n"
    "[controller]\noverprovision = 0.3\n"
    "[workload]\nt0.type = randwrite\nt0.ios = 200\nt1.type = randread\nt1.ios = 100\nt1.depends = 0\n"
    "[experiment]\nname = tiny\n";

struct ConfigPtr {
  flashsim_config* p = nullptr;
  ~ConfigPtr() { flashsim_config_free(p); }
};

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / ("flashsim_capi_" + name);
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string get(const flashsim_config* c, const char* key) {
  size_t n = 0;
  EXPECT_EQ(flashsim_config_get(c, key, nullptr, 0, &n), FLASHSIM_OK);
  std::string s(n, '\0');
  EXPECT_EQ(flashsim_config_get(c, key, s.data(), n + 1, &n), FLASHSIM_OK);
  return s;
}

TEST(CApi, ParseSetGet) {
  ConfigPtr c;
  ASSERT_EQ(flashsim_config_parse(kTiny, &c.p), FLASHSIM_OK);
  EXPECT_EQ(get(c.p, "hardware.channels"), "2");
  EXPECT_EQ(get(c.p, "hardware.t_read"), "25000");
  ASSERT_EQ(flashsim_config_set(c.p, "hardware.channels", "1"), FLASHSIM_OK);
  EXPECT_EQ(get(c.p, "hardware.channels"), "1");
  EXPECT_EQ(flashsim_config_validate(c.p), FLASHSIM_OK);
}

TEST(CApi, TruncatedGetterReportsFullLength) {
  ConfigPtr c;
  ASSERT_EQ(flashsim_config_parse(kTiny, &c.p), FLASHSIM_OK);
  char buf[3];
  size_t n = 0;
  ASSERT_EQ(flashsim_config_get(c.p, "experiment.name", buf, sizeof buf, &n), FLASHSIM_OK);
  EXPECT_EQ(n, 4u);
  EXPECT_STREQ(buf, "ti");
  ASSERT_EQ(flashsim_config_resolved(c.p, nullptr, 0, &n), FLASHSIM_OK);
  EXPECT_GT(n, 100u);
}

TEST(CApi, ErrorsCarryCodesAndMessages) {
  flashsim_config* c = nullptr;
  EXPECT_EQ(flashsim_config_parse("[hardwre]\nchannels = 4\n", &c), FLASHSIM_ERR_CONFIG);
  EXPECT_EQ(c, nullptr);
  EXPECT_NE(std::string(flashsim_last_error()).find("hardwre.channels"), std::string::npos);
  EXPECT_EQ(flashsim_config_load("/nonexistent/x.ini", &c), FLASHSIM_ERR_CONFIG);
  EXPECT_EQ(flashsim_config_parse(nullptr, &c), FLASHSIM_ERR_ARGUMENT);
  EXPECT_EQ(flashsim_config_parse(kTiny, nullptr), FLASHSIM_ERR_ARGUMENT);
  EXPECT_EQ(flashsim_config_validate(nullptr), FLASHSIM_ERR_ARGUMENT);
  EXPECT_EQ(flashsim_sim_run(nullptr), FLASHSIM_ERR_ARGUMENT);
  ConfigPtr ok;
  ASSERT_EQ(flashsim_config_parse(kTiny, &ok.p), FLASHSIM_OK);
  EXPECT_EQ(flashsim_config_set(ok.p, "hardware.channels", "zero"), FLASHSIM_ERR_CONFIG);
  EXPECT_NE(std::string(flashsim_last_error()).find("hardware.channels"), std::string::npos);
  // Cross-field limits are checked by validation, not by set.
  ASSERT_EQ(flashsim_config_set(ok.p, "controller.overprovision", "0.01"), FLASHSIM_OK);
  EXPECT_EQ(flashsim_config_validate(ok.p), FLASHSIM_ERR_CONFIG);
  EXPECT_NE(std::string(flashsim_last_error()).find("controller.overprovision"), std::string::npos);
  flashsim_config_free(nullptr);
  flashsim_sim_free(nullptr);
}

TEST(CApi, InMemoryRunIsDeterministic) {
  ConfigPtr c;
  ASSERT_EQ(flashsim_config_parse(kTiny, &c.p), FLASHSIM_OK);
  std::string metrics[2];
  for (auto& m : metrics) {
    flashsim_sim* s = nullptr;
    ASSERT_EQ(flashsim_sim_create(c.p, 5, nullptr, &s), FLASHSIM_OK);
    char probe[1];
    size_t n = 0;
    EXPECT_EQ(flashsim_sim_metrics(s, probe, 1, &n), FLASHSIM_ERR_ARGUMENT) << "metrics before run";
    ASSERT_EQ(flashsim_sim_run(s), FLASHSIM_OK);
    EXPECT_EQ(flashsim_sim_run(s), FLASHSIM_ERR_ARGUMENT) << "second run";
    flashsim_stats st{};
    ASSERT_EQ(flashsim_sim_stats(s, &st), FLASHSIM_OK);
    EXPECT_EQ(st.app_completed, 300u);
    EXPECT_EQ(st.app_writes, 200u);
    EXPECT_EQ(st.integrity_errors, 0u);
    ASSERT_EQ(flashsim_sim_metrics(s, nullptr, 0, &n), FLASHSIM_OK);
    m.resize(n);
    ASSERT_EQ(flashsim_sim_metrics(s, m.data(), n + 1, &n), FLASHSIM_OK);
    flashsim_sim_free(s);
  }
  EXPECT_EQ(metrics[0], metrics[1]);
  EXPECT_EQ(metrics[0].rfind("scope,id,io_type,metric,value\n", 0), 0u);
}

TEST(CApi, RunToDirWritesArtifacts) {
  ConfigPtr c;
  ASSERT_EQ(flashsim_config_parse(kTiny, &c.p), FLASHSIM_OK);
  auto dir = scratch("run");
  flashsim_stats st{};
  ASSERT_EQ(flashsim_run_to_dir(c.p, 3, dir.c_str(), &st), FLASHSIM_OK);
  for (const char* f : {"trace.csv", "metrics.csv", "config_resolved"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
  auto trace = slurp(dir / "trace.csv");
  EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), static_cast<long>(st.total_ios + 1));

  // The resolved config reproduces the run.
  ConfigPtr again;
  ASSERT_EQ(flashsim_config_load((dir / "config_resolved").c_str(), &again.p), FLASHSIM_OK);
  auto dir2 = scratch("run2");
  ASSERT_EQ(flashsim_run_to_dir(again.p, 3, dir2.c_str(), nullptr), FLASHSIM_OK);
  EXPECT_EQ(slurp(dir2 / "trace.csv"), trace);
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST(CApi, SweepCountsFailedCells) {
  ConfigPtr c;
  ASSERT_EQ(flashsim_config_parse(kTiny, &c.p), FLASHSIM_OK);
  auto out = scratch("sweep");
  size_t failed = 99;
  ASSERT_EQ(flashsim_sweep(c.p, "controller.overprovision", "0.3,0.4", 2, 1, out.c_str(), &failed), FLASHSIM_OK);
  EXPECT_EQ(failed, 0u);
  auto csv = slurp(out / "tiny" / "sweep.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_TRUE(fs::exists(out / "tiny" / "controller.overprovision=0.4" / "seed=2" / "trace.csv"));
  EXPECT_EQ(flashsim_sweep(c.p, "controller.overprovision", "0.3,bogus", 1, 1, out.c_str(), &failed),
            FLASHSIM_ERR_CONFIG);
  EXPECT_EQ(flashsim_sweep(c.p, "controller.nope", "1", 1, 1, out.c_str(), &failed), FLASHSIM_ERR_CONFIG);
  fs::remove_all(out);
}

TEST(CApi, Version) { EXPECT_STRNE(flashsim_version(), ""); }

}  // namespace
