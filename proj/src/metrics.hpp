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

#ifndef FLASHSIM_METRICS_HPP
#define FLASHSIM_METRICS_HPP

#include <array>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "simulator.hpp"

namespace flashsim {

// Lower nearest-rank: index ceil(num/den * n) - 1 of the sorted sample.
std::size_t percentile_index(std::size_t n, std::uint64_t num, std::uint64_t den);

struct LatencySummary {
  std::uint64_t count = 0;
  double mean = 0;
  double stddev = 0;  // population
  Nanos p50 = 0;
  Nanos p99 = 0;
};
// Sorts `samples` in place.
LatencySummary summarize(std::vector<Nanos>& samples);

std::string format_ratio(double v);

// trace.csv writer; one row per IO in completion order.
class TraceWriter : public IoSink {
 public:
  explicit TraceWriter(std::ostream& out);
  void on_io(const IoRequest& io) override;
  static const char* header();

 private:
  std::ostream& out_;
  std::string line_;
};

// Streams IO completions into metrics.csv values.
class MetricsCollector : public IoSink {
 public:
  explicit MetricsCollector(const Geometry& geo);
  void on_measure_start(Nanos t) override;
  void on_io(const IoRequest& io) override;
  void write(std::ostream& out) const;

  // Headline numbers for sweep summaries.
  struct Summary {
    std::uint64_t app_ios = 0;
    std::string throughput;
    std::string latency_mean;
    std::string latency_p99;
    std::string write_amplification;
    std::uint64_t gc_migrations = 0;
    std::uint64_t wl_migrations = 0;
    std::uint64_t erases = 0;
  };
  Summary summary() const;

 private:
  struct Counters {
    std::uint64_t app_writes = 0;
    std::uint64_t physical_programs = 0;
    std::uint64_t gc_migrations = 0;
    std::uint64_t wl_migrations = 0;
    std::uint64_t erases = 0;
    std::uint64_t mapping_ios = 0;
    void add(const IoRequest& io);
  };
  struct Busy {
    std::vector<Nanos> channel;
    std::vector<Nanos> lun;
  };
  void add_busy(Busy& b, const IoRequest& io) const;

  Geometry geo_;
  bool measuring_ = false;
  Nanos measure_start_ = 0;
  Nanos end_ = 0;
  Nanos app_end_ = 0;
  bool any_measured_ = false;

  // Whole-run totals, used when nothing is measured.
  Counters all_;
  Busy busy_all_;
  // Zero-length rows completed at the latest instant before measurement
  // started. They began at that instant, so they count when it turns out to
  // be the measurement start.
  Nanos bucket_time_ = 0;
  Counters bucket_;
  // Device counters and busy time cover rows that began at or after the
  // measurement start.
  Counters counters_;
  Busy busy_;

  std::vector<std::uint32_t> erase_counts_;
  // Measured application rows per thread and IO type.
  std::map<ThreadId, std::array<std::vector<Nanos>, 3>> latencies_;  // READ, WRITE, TRIM
  std::map<ThreadId, std::array<std::uint64_t, 3>> failed_;
};

}  // namespace flashsim

#endif  // FLASHSIM_METRICS_HPP
