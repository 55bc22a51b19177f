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

#include "metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

namespace flashsim {

std::size_t percentile_index(std::size_t n, std::uint64_t num, std::uint64_t den) {
  if (n == 0) return 0;
  return static_cast<std::size_t>((num * n + den - 1) / den - 1);
}

LatencySummary summarize(std::vector<Nanos>& samples) {
  LatencySummary s;
  s.count = samples.size();
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  std::uint64_t sum = 0;
  unsigned __int128 sumsq = 0;
  for (auto v : samples) {
    sum += v;
    sumsq += static_cast<unsigned __int128>(v) * v;
  }
  const auto n = static_cast<unsigned __int128>(s.count);
  unsigned __int128 num = n * sumsq - static_cast<unsigned __int128>(sum) * sum;
  s.mean = static_cast<double>(sum) / static_cast<double>(s.count);
  s.stddev = std::sqrt(static_cast<double>(num) / (static_cast<double>(s.count) * static_cast<double>(s.count)));
  s.p50 = samples[percentile_index(samples.size(), 50, 100)];
  s.p99 = samples[percentile_index(samples.size(), 99, 100)];
  return s;
}

std::string format_ratio(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// ---- trace ----------------------------------------------------------------

namespace {

void put(std::string& s, std::uint64_t v) {
  char buf[24];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  s.append(buf, r.ptr);
}

void put_signed(std::string& s, std::int64_t v) {
  char buf[24];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  s.append(buf, r.ptr);
}

template <class T>
void put_opt(std::string& s, const std::optional<T>& v) {
  if (v) put(s, static_cast<std::uint64_t>(*v));
}

std::size_t type_index(IoKind k) {
  switch (k) {
    case IoKind::Read: return 0;
    case IoKind::Write: return 1;
    default: return 2;
  }
}

const char* kTypeNames[] = {"READ", "WRITE", "TRIM"};

}  // namespace

const char* TraceWriter::header() {
  return "id,source,thread,kind,lpn,tpage,channel,lun,block,page,dst_block,dst_page,priority,deadline,created,"
         "os_dispatched,ssd_enqueued,exec_started,completed,chan_busy_ns,lun_busy_ns,status,measured,preds";
}

TraceWriter::TraceWriter(std::ostream& out) : out_(out) { out_ << header() << '\n'; }

void TraceWriter::on_io(const IoRequest& io) {
  auto& s = line_;
  s.clear();
  put(s, io.id);
  s += ',';
  s += to_string(io.source);
  s += ',';
  if (io.thread != kNoThread) put_signed(s, io.thread);
  s += ',';
  s += to_string(io.kind);
  s += ',';
  put_opt(s, io.lpn);
  s += ',';
  put_opt(s, io.tpage);
  s += ',';
  if (io.ppa) {
    put(s, io.ppa->channel);
    s += ',';
    if (io.kind != IoKind::Trim) {
      put(s, io.ppa->lun);
      s += ',';
      put(s, io.ppa->block);
      s += ',';
      if (io.kind != IoKind::Erase) put(s, io.ppa->page);
    } else {
      s += ",,";
    }
  } else {
    s += ",,,";
  }
  s += ',';
  if (io.dst) {
    put(s, io.dst->block);
    s += ',';
    put(s, io.dst->page);
  } else {
    s += ',';
  }
  s += ',';
  put_signed(s, io.priority);
  s += ',';
  put_opt(s, io.deadline);
  for (Nanos t : {io.created, io.os_dispatched, io.ssd_enqueued, io.exec_started, io.completed, io.channel_busy,
                  io.lun_busy}) {
    s += ',';
    put(s, t);
  }
  s += ',';
  s += to_string(io.status);
  s += ',';
  s += io.measured ? '1' : '0';
  s += ',';
  for (std::size_t i = 0; i < io.preds.size(); ++i) {
    if (i) s += ';';
    put(s, io.preds[i]);
  }
  s += '\n';
  out_ << s;
}

// ---- metrics --------------------------------------------------------------

void MetricsCollector::Counters::add(const IoRequest& io) {
  if (io.status != IoStatus::Ok) return;
  switch (io.source) {
    case IoSource::App:
      if (io.kind == IoKind::Write) {
        ++app_writes;
        ++physical_programs;
      }
      break;
    case IoSource::Gc:
    case IoSource::Wl:
      if (io.kind == IoKind::Write || io.kind == IoKind::Copyback) {
        ++(io.source == IoSource::Gc ? gc_migrations : wl_migrations);
        if (!io.tpage) ++physical_programs;
      }
      if (io.kind == IoKind::Erase) ++erases;
      break;
    case IoSource::Mapping: ++mapping_ios; break;
  }
}

MetricsCollector::MetricsCollector(const Geometry& geo) : geo_(geo), erase_counts_(geo.total_blocks(), 0) {
  busy_all_.channel.assign(geo.channels, 0);
  busy_all_.lun.assign(geo.total_luns(), 0);
  busy_ = busy_all_;
}

void MetricsCollector::add_busy(Busy& b, const IoRequest& io) const {
  if (!io.ppa) return;
  b.channel[io.ppa->channel] += io.channel_busy;
  if (io.kind != IoKind::Trim) b.lun[geo_.lun_index(io.ppa->channel, io.ppa->lun)] += io.lun_busy;
}

void MetricsCollector::on_measure_start(Nanos t) {
  if (measuring_) return;
  measuring_ = true;
  measure_start_ = t;
  counters_ = bucket_time_ == t ? bucket_ : Counters{};
}

void MetricsCollector::on_io(const IoRequest& io) {
  end_ = std::max(end_, io.completed);
  if (io.kind == IoKind::Erase && io.status == IoStatus::Ok) {
    AddressMap map{geo_};
    ++erase_counts_[map.block_id(*io.ppa)];
  }
  all_.add(io);
  add_busy(busy_all_, io);
  if (measuring_) {
    if (io.exec_started >= measure_start_) {
      counters_.add(io);
      add_busy(busy_, io);
    }
  } else {
    if (io.completed != bucket_time_) {
      bucket_ = Counters{};
      bucket_time_ = io.completed;
    }
    if (io.exec_started == io.completed) bucket_.add(io);
  }
  if (io.source == IoSource::App && io.measured) {
    any_measured_ = true;
    app_end_ = std::max(app_end_, io.completed);
    auto k = type_index(io.kind);
    if (io.status == IoStatus::Ok) latencies_[io.thread][k].push_back(io.completed - io.created);
    else ++failed_[io.thread][k];
  }
}

namespace {

struct Emitter {
  std::ostream& out;
  void row(const std::string& scope, const std::string& id, const std::string& type, const std::string& metric,
           const std::string& value) {
    out << scope << ',' << id << ',' << type << ',' << metric << ',' << value << '\n';
  }
};

void emit_latency_rows(Emitter& e, const std::string& scope, const std::string& id, const std::string& type,
                       std::vector<Nanos> samples, std::uint64_t failed, Nanos window) {
  auto s = summarize(samples);
  e.row(scope, id, type, "count", std::to_string(s.count));
  e.row(scope, id, type, "failed", std::to_string(failed));
  e.row(scope, id, type, "throughput_iops",
        window ? format_ratio(static_cast<double>(s.count) * 1e9 / static_cast<double>(window)) : "");
  if (s.count == 0) return;
  e.row(scope, id, type, "latency_mean_ns", format_ratio(s.mean));
  e.row(scope, id, type, "latency_stddev_ns", format_ratio(s.stddev));
  e.row(scope, id, type, "latency_p50_ns", std::to_string(s.p50));
  e.row(scope, id, type, "latency_p99_ns", std::to_string(s.p99));
}

}  // namespace

void MetricsCollector::write(std::ostream& out) const {
  Emitter e{out};
  out << "scope,id,io_type,metric,value\n";
  const Nanos m = measuring_ ? measure_start_ : 0;
  const Nanos window = any_measured_ ? app_end_ - m : 0;

  std::array<std::vector<Nanos>, 3> all_lat;
  std::array<std::uint64_t, 3> all_failed{0, 0, 0};
  std::set<ThreadId> threads;
  for (const auto& [t, v] : latencies_) threads.insert(t);
  for (const auto& [t, v] : failed_) threads.insert(t);
  for (ThreadId t : threads) {
    static const std::array<std::vector<Nanos>, 3> kNoLat{};
    static const std::array<std::uint64_t, 3> kNoFail{0, 0, 0};
    auto li = latencies_.find(t);
    auto fi = failed_.find(t);
    const auto& lat = li != latencies_.end() ? li->second : kNoLat;
    const auto& fail = fi != failed_.end() ? fi->second : kNoFail;
    std::vector<Nanos> merged;
    std::uint64_t failed = 0;
    auto id = std::to_string(t);
    for (std::size_t k = 0; k < 3; ++k) {
      if (lat[k].empty() && fail[k] == 0) continue;
      emit_latency_rows(e, "thread", id, kTypeNames[k], lat[k], fail[k], window);
      merged.insert(merged.end(), lat[k].begin(), lat[k].end());
      failed += fail[k];
      all_lat[k].insert(all_lat[k].end(), lat[k].begin(), lat[k].end());
      all_failed[k] += fail[k];
    }
    emit_latency_rows(e, "thread", id, "ALL", std::move(merged), failed, window);
  }
  if (!threads.empty()) {
    std::vector<Nanos> merged;
    std::uint64_t failed = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      if (all_lat[k].empty() && all_failed[k] == 0) continue;
      emit_latency_rows(e, "workload", "all", kTypeNames[k], all_lat[k], all_failed[k], window);
      merged.insert(merged.end(), all_lat[k].begin(), all_lat[k].end());
      failed += all_failed[k];
    }
    emit_latency_rows(e, "workload", "all", "ALL", std::move(merged), failed, window);
  }

  const Counters& c = measuring_ ? counters_ : all_;
  const Busy& b = measuring_ ? busy_ : busy_all_;
  e.row("device", "all", "", "app_writes", std::to_string(c.app_writes));
  e.row("device", "all", "", "physical_programs", std::to_string(c.physical_programs));
  e.row("device", "all", "", "write_amplification",
        c.app_writes ? format_ratio(static_cast<double>(c.physical_programs) / static_cast<double>(c.app_writes)) : "");
  e.row("device", "all", "", "gc_migrations", std::to_string(c.gc_migrations));
  e.row("device", "all", "", "wl_migrations", std::to_string(c.wl_migrations));
  e.row("device", "all", "", "erases", std::to_string(c.erases));
  e.row("device", "all", "", "mapping_ios", std::to_string(c.mapping_ios));
  e.row("device", "all", "", "measure_start_ns", std::to_string(m));
  e.row("device", "all", "", "end_ns", std::to_string(end_));

  std::map<std::uint32_t, std::uint64_t> hist;
  for (auto n : erase_counts_) ++hist[n];
  for (const auto& [count, blocks] : hist) e.row("erase_hist", std::to_string(count), "", "blocks", std::to_string(blocks));

  const Nanos span = end_ > m ? end_ - m : 0;
  auto fraction = [&](Nanos busy) {
    return span ? format_ratio(static_cast<double>(busy) / static_cast<double>(span)) : std::string();
  };
  for (std::uint32_t ch = 0; ch < geo_.channels; ++ch)
    e.row("channel", std::to_string(ch), "", "busy_fraction", fraction(b.channel[ch]));
  for (std::uint32_t l = 0; l < geo_.total_luns(); ++l)
    e.row("lun", std::to_string(l), "", "busy_fraction", fraction(b.lun[l]));
}

MetricsCollector::Summary MetricsCollector::summary() const {
  Summary s;
  const Nanos m = measuring_ ? measure_start_ : 0;
  const Nanos window = any_measured_ ? app_end_ - m : 0;
  std::vector<Nanos> all;
  for (const auto& [t, lat] : latencies_)
    for (const auto& v : lat) all.insert(all.end(), v.begin(), v.end());
  auto l = summarize(all);
  s.app_ios = l.count;
  if (window) s.throughput = format_ratio(static_cast<double>(l.count) * 1e9 / static_cast<double>(window));
  if (l.count) {
    s.latency_mean = format_ratio(l.mean);
    s.latency_p99 = std::to_string(l.p99);
  }
  const Counters& c = measuring_ ? counters_ : all_;
  if (c.app_writes)
    s.write_amplification = format_ratio(static_cast<double>(c.physical_programs) / static_cast<double>(c.app_writes));
  s.gc_migrations = c.gc_migrations;
  s.wl_migrations = c.wl_migrations;
  s.erases = c.erases;
  return s;
}

}  // namespace flashsim
