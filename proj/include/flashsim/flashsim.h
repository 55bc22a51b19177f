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

#ifndef FLASHSIM_FLASHSIM_H
#define FLASHSIM_FLASHSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(FLASHSIM_BUILDING_LIBRARY)
#define FLASHSIM_API __attribute__((visibility("default")))
#else
#define FLASHSIM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum flashsim_status {
  FLASHSIM_OK = 0,
  FLASHSIM_ERR_CONFIG = 1,      /* bad key, value, file or output path */
  FLASHSIM_ERR_SIMULATION = 2,  /* fatal model violation, integrity error, out of space */
  FLASHSIM_ERR_ARGUMENT = 3,    /* null handle or pointer, bad call order */
  FLASHSIM_ERR_INTERNAL = 4
} flashsim_status;

typedef struct flashsim_config flashsim_config;
typedef struct flashsim_sim flashsim_sim;

typedef struct flashsim_stats {
  uint64_t total_ios;
  uint64_t app_completed;
  uint64_t app_reads;
  uint64_t app_writes;
  uint64_t app_trims;
  uint64_t failed_reads;
  uint64_t integrity_errors;
  uint64_t lost_mappings;
  uint64_t stale_tags;
  uint64_t gc_migrations;
  uint64_t wl_migrations;
  uint64_t erases;
  uint64_t mapping_ios;
  uint64_t measure_start_ns;
  uint64_t end_ns;
} flashsim_stats;

/* Message for the most recent failure on the calling thread. Never NULL. */
FLASHSIM_API const char* flashsim_last_error(void);
FLASHSIM_API const char* flashsim_version(void);

/* ---- configuration ---- */
FLASHSIM_API flashsim_status flashsim_config_load(const char* path, flashsim_config** out);
FLASHSIM_API flashsim_status flashsim_config_parse(const char* text, flashsim_config** out);
FLASHSIM_API flashsim_status flashsim_config_set(flashsim_config* cfg, const char* key, const char* value);
/* String getters copy up to len-1 bytes plus a terminator into buf and
   report the full length in *needed (either may be NULL/0 to query). */
FLASHSIM_API flashsim_status flashsim_config_get(const flashsim_config* cfg, const char* key, char* buf, size_t len,
                                                 size_t* needed);
FLASHSIM_API flashsim_status flashsim_config_resolved(const flashsim_config* cfg, char* buf, size_t len,
                                                      size_t* needed);
/* Full cross-field validation, as done before a run. */
FLASHSIM_API flashsim_status flashsim_config_validate(const flashsim_config* cfg);
FLASHSIM_API void flashsim_config_free(flashsim_config* cfg);

/* ---- single runs ---- */
/* Runs one simulation writing trace.csv, metrics.csv and config_resolved
   into dir. stats may be NULL. */
FLASHSIM_API flashsim_status flashsim_run_to_dir(const flashsim_config* cfg, uint64_t seed, const char* dir,
                                                 flashsim_stats* stats);

/* In-memory simulation handle. trace_path may be NULL to skip the trace. */
FLASHSIM_API flashsim_status flashsim_sim_create(const flashsim_config* cfg, uint64_t seed, const char* trace_path,
                                                 flashsim_sim** out);
FLASHSIM_API flashsim_status flashsim_sim_run(flashsim_sim* sim);
FLASHSIM_API flashsim_status flashsim_sim_stats(const flashsim_sim* sim, flashsim_stats* out);
/* metrics.csv content of a finished run. */
FLASHSIM_API flashsim_status flashsim_sim_metrics(const flashsim_sim* sim, char* buf, size_t len, size_t* needed);
FLASHSIM_API void flashsim_sim_free(flashsim_sim* sim);

/* ---- sweeps ---- */
/* values is a comma-separated list. Runs <values> x <seeds> cells with seeds
   base_seed, base_seed+1, ... and writes <out>/<name>/sweep.csv. Failed cells
   are counted in *failed_cells (may be NULL) and do not fail the call. */
FLASHSIM_API flashsim_status flashsim_sweep(const flashsim_config* cfg, const char* param, const char* values,
                                            uint64_t seeds, uint64_t base_seed, const char* out,
                                            size_t* failed_cells);

#ifdef __cplusplus
}
#endif

#endif /* FLASHSIM_FLASHSIM_H */
