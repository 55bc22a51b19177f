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

#include "flashsim/flashsim.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>

#include "experiments.hpp"

using namespace flashsim;

struct flashsim_config {
  Config cfg;
};

struct flashsim_sim {
  SimConfig sc;
  std::unique_ptr<std::ofstream> trace_file;
  std::unique_ptr<TraceWriter> trace;
  std::unique_ptr<MetricsCollector> metrics;
  std::unique_ptr<Simulator> sim;
  RunStats stats;
  bool ran = false;
};

namespace {

thread_local std::string g_error;

flashsim_status fail(flashsim_status s, const std::string& msg) {
  g_error = msg;
  return s;
}

template <class F>
flashsim_status guarded(F&& f) {
  try {
    g_error.clear();
    return f();
  } catch (const ConfigError& e) {
    return fail(FLASHSIM_ERR_CONFIG, e.what());
  } catch (const SimulationError& e) {
    return fail(FLASHSIM_ERR_SIMULATION, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FLASHSIM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FLASHSIM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FLASHSIM_ERR_INTERNAL, "unknown error");
  }
}

flashsim_status copy_out(const std::string& s, char* buf, std::size_t len, std::size_t* needed) {
  if (needed) *needed = s.size();
  if (buf && len) {
    std::size_t n = std::min(len - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
  }
  return FLASHSIM_OK;
}

void fill(const RunStats& r, flashsim_stats* out) {
  *out = flashsim_stats{};
  out->total_ios = r.total_ios;
  out->app_completed = r.app_completed;
  out->app_reads = r.app_reads;
  out->app_writes = r.app_writes;
  out->app_trims = r.app_trims;
  out->failed_reads = r.failed_reads;
  out->integrity_errors = r.integrity_errors;
  out->lost_mappings = r.lost_mappings;
  out->stale_tags = r.stale_tags;
  out->gc_migrations = r.gc_migrations;
  out->wl_migrations = r.wl_migrations;
  out->erases = r.erases;
  out->mapping_ios = r.mapping_ios;
  out->measure_start_ns = r.measure_start;
  out->end_ns = r.end_time;
}

#define REQUIRE(p) \
  if (!(p)) return fail(FLASHSIM_ERR_ARGUMENT, #p " must not be null")

}  // namespace

extern "C" {

const char* flashsim_last_error(void) { return g_error.c_str(); }

const char* flashsim_version(void) { return "1.0.0"; }

flashsim_status flashsim_config_load(const char* path, flashsim_config** out) {
  return guarded([&] {
    REQUIRE(path);
    REQUIRE(out);
    *out = new flashsim_config{Config::load(path)};
    return FLASHSIM_OK;
  });
}

flashsim_status flashsim_config_parse(const char* text, flashsim_config** out) {
  return guarded([&] {
    REQUIRE(text);
    REQUIRE(out);
    *out = new flashsim_config{Config::parse(text)};
    return FLASHSIM_OK;
  });
}

flashsim_status flashsim_config_set(flashsim_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    REQUIRE(cfg);
    REQUIRE(key);
    REQUIRE(value);
    cfg->cfg.set(key, value);
    return FLASHSIM_OK;
  });
}

flashsim_status flashsim_config_get(const flashsim_config* cfg, const char* key, char* buf, size_t len,
                                    size_t* needed) {
  return guarded([&] {
    REQUIRE(cfg);
    REQUIRE(key);
    return copy_out(cfg->cfg.get(key), buf, len, needed);
  });
}

flashsim_status flashsim_config_resolved(const flashsim_config* cfg, char* buf, size_t len, size_t* needed) {
  return guarded([&] {
    REQUIRE(cfg);
    return copy_out(cfg->cfg.resolved_text(), buf, len, needed);
  });
}

flashsim_status flashsim_config_validate(const flashsim_config* cfg) {
  return guarded([&] {
    REQUIRE(cfg);
    build_sim_config(cfg->cfg);
    return FLASHSIM_OK;
  });
}

void flashsim_config_free(flashsim_config* cfg) { delete cfg; }

flashsim_status flashsim_run_to_dir(const flashsim_config* cfg, uint64_t seed, const char* dir,
                                    flashsim_stats* stats) {
  return guarded([&] {
    REQUIRE(cfg);
    REQUIRE(dir);
    auto r = run_single(cfg->cfg, seed, dir);
    if (stats) fill(r.stats, stats);
    return FLASHSIM_OK;
  });
}

flashsim_status flashsim_sim_create(const flashsim_config* cfg, uint64_t seed, const char* trace_path,
                                    flashsim_sim** out) {
  return guarded([&] {
    REQUIRE(cfg);
    REQUIRE(out);
    Config c = cfg->cfg;
    c.set("experiment.seed", std::to_string(seed));
    auto s = std::make_unique<flashsim_sim>();
    s->sc = build_sim_config(c);
    s->sim = std::make_unique<Simulator>(s->sc);
    if (trace_path) {
      s->trace_file = std::make_unique<std::ofstream>(trace_path, std::ios::binary | std::ios::trunc);
      if (!*s->trace_file) throw ConfigError(std::string(trace_path) + ": cannot open for writing");
      s->trace = std::make_unique<TraceWriter>(*s->trace_file);
      s->sim->add_sink(s->trace.get());
    }
    s->metrics = std::make_unique<MetricsCollector>(s->sc.geometry);
    s->sim->add_sink(s->metrics.get());
    *out = s.release();
    return FLASHSIM_OK;
  });
}

flashsim_status flashsim_sim_run(flashsim_sim* sim) {
  return guarded([&] {
    REQUIRE(sim);
    if (sim->ran) return fail(FLASHSIM_ERR_ARGUMENT, "simulation already ran");
    sim->ran = true;
    sim->stats = sim->sim->run();
    if (sim->trace_file) sim->trace_file->flush();
    return FLASHSIM_OK;
  });
}

flashsim_status flashsim_sim_stats(const flashsim_sim* sim, flashsim_stats* out) {
  return guarded([&] {
    REQUIRE(sim);
    REQUIRE(out);
    fill(sim->sim->stats(), out);
    return FLASHSIM_OK;
  });
}

flashsim_status flashsim_sim_metrics(const flashsim_sim* sim, char* buf, size_t len, size_t* needed) {
  return guarded([&] {
    REQUIRE(sim);
    if (!sim->ran) return fail(FLASHSIM_ERR_ARGUMENT, "simulation has not run");
    std::ostringstream os;
    sim->metrics->write(os);
    return copy_out(os.str(), buf, len, needed);
  });
}

void flashsim_sim_free(flashsim_sim* sim) { delete sim; }

flashsim_status flashsim_sweep(const flashsim_config* cfg, const char* param, const char* values, uint64_t seeds,
                               uint64_t base_seed, const char* out, size_t* failed_cells) {
  return guarded([&] {
    REQUIRE(cfg);
    REQUIRE(param);
    REQUIRE(values);
    REQUIRE(out);
    SweepSpec spec;
    spec.param = param;
    for (auto& v : split(values, ',')) {
      auto t = trim(v);
      if (t.empty()) throw ConfigError(std::string("values: empty entry in '") + values + "'");
      spec.values.push_back(t);
    }
    spec.seeds = seeds;
    spec.base_seed = base_seed;
    auto cells = run_sweep(cfg->cfg, spec, out);
    std::size_t failed = 0;
    for (const auto& c : cells) failed += c.ok ? 0 : 1;
    if (failed_cells) *failed_cells = failed;
    return FLASHSIM_OK;
  });
}

}  // extern "C"
