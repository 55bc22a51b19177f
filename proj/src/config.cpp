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

#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace flashsim {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

namespace {

using T = Config::Type;

bool parse_u64(const std::string& s, std::uint64_t& out) {
  if (s.empty()) return false;
  auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

bool parse_i64(const std::string& s, std::int64_t& out) {
  if (s.empty()) return false;
  auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size();
}

bool parse_bool(const std::string& s, bool& out) {
  std::string v = s;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return out = true, true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return out = false, true;
  return false;
}

const char* type_name(T t) {
  switch (t) {
    case T::U64: return "a non-negative integer";
    case T::I64: return "an integer";
    case T::Double: return "a number";
    case T::Bool: return "a boolean";
    case T::Choice: return "one of the listed choices";
    case T::Text: return "text";
    case T::IdList: return "a ';'-separated list of thread indices";
  }
  return "?";
}

// Parses "t<N>.<field>" and returns N.
std::optional<std::uint32_t> thread_index(const std::string& key, std::string* field) {
  if (key.size() < 3 || key[0] != 't') return std::nullopt;
  auto dot = key.find('.');
  if (dot == std::string::npos || dot == 1) return std::nullopt;
  std::uint64_t n = 0;
  if (!parse_u64(key.substr(1, dot - 1), n) || n > 9999) return std::nullopt;
  if (field) *field = key.substr(dot + 1);
  return static_cast<std::uint32_t>(n);
}

}  // namespace

const std::vector<std::string>& Config::sections() {
  static const std::vector<std::string> s{"hardware", "controller", "os", "workload", "experiment"};
  return s;
}

const std::vector<Config::KeySpec>& Config::schema() {
  static const std::vector<KeySpec> s{
      {"hardware", "channels", T::U64, "4", {}},
      {"hardware", "luns_per_channel", T::U64, "2", {}},
      {"hardware", "blocks_per_lun", T::U64, "128", {}},
      {"hardware", "pages_per_block", T::U64, "64", {}},
      {"hardware", "page_size", T::U64, "4096", {}},
      {"hardware", "t_cmd", T::U64, "2000", {}},
      {"hardware", "t_data", T::U64, "100000", {}},
      {"hardware", "t_read", T::U64, "25000", {}},
      {"hardware", "t_prog_fast", T::U64, "200000", {}},
      {"hardware", "t_prog_slow", T::U64, "600000", {}},
      {"hardware", "t_erase", T::U64, "1500000", {}},
      {"hardware", "cell_type", T::Choice, "slc", {"slc", "mlc"}},
      {"hardware", "copyback", T::Bool, "false", {}},
      {"hardware", "pipelined_program", T::Bool, "false", {}},
      {"hardware", "ram_bytes", T::U64, "67108864", {}},
      {"hardware", "bbram_bytes", T::U64, "1048576", {}},

      {"controller", "mapping", T::Choice, "pagemap", {"pagemap", "dftl"}},
      {"controller", "cmt_capacity", T::U64, "4096", {}},
      {"controller", "overprovision", T::Double, "0.10", {}},
      {"controller", "gc_greediness", T::U64, "2", {}},
      {"controller", "gc_copyback", T::Bool, "true", {}},
      {"controller", "wl_enabled", T::Bool, "true", {}},
      {"controller", "wl_staleness", T::Double, "4", {}},
      {"controller", "wl_scan_interval", T::U64, "1024", {}},
      {"controller", "detector_enabled", T::Bool, "true", {}},
      {"controller", "bloom_filters", T::U64, "4", {}},
      {"controller", "bloom_bits", T::U64, "16384", {}},
      {"controller", "bloom_hashes", T::U64, "2", {}},
      {"controller", "bloom_window", T::U64, "4096", {}},
      {"controller", "hot_threshold", T::U64, "2", {}},
      {"controller", "prio_app", T::I64, "2", {}},
      {"controller", "prio_gc", T::I64, "1", {}},
      {"controller", "prio_wl", T::I64, "0", {}},
      {"controller", "prio_mapping", T::I64, "3", {}},
      {"controller", "reads_over_writes", T::Bool, "true", {}},
      {"controller", "deadline_boost", T::Bool, "true", {}},
      {"controller", "greedy_lookahead", T::Bool, "true", {}},
      {"controller", "interleaving", T::Bool, "true", {}},

      {"os", "queue_depth", T::U64, "0", {}},
      {"os", "policy", T::Choice, "fifo", {"fifo", "priority", "fair_share"}},
      {"os", "open_interface", T::Bool, "false", {}},

      {"workload", "precondition", T::Choice, "none", {"none", "sequential", "random", "seq_then_random"}},
      {"workload", "window", T::U64, "16", {}},

      {"experiment", "name", T::Text, "run", {}},
      {"experiment", "seed", T::U64, "1", {}},
      {"experiment", "param", T::Text, "", {}},
      {"experiment", "values", T::Text, "", {}},
      {"experiment", "seeds", T::U64, "1", {}},
  };
  return s;
}

const std::vector<Config::KeySpec>& Config::thread_schema() {
  static const std::vector<KeySpec> s{
      {"workload", "type", T::Choice, "", {"seqwrite", "seqread", "randwrite", "randread", "grace", "extent"}},
      {"workload", "start", T::U64, "0", {}},
      {"workload", "count", T::U64, "0", {}},
      {"workload", "ios", T::U64, "0", {}},
      {"workload", "passes", T::U64, "1", {}},
      {"workload", "hot_fraction", T::Double, "0", {}},
      {"workload", "hot_share", T::Double, "0", {}},
      {"workload", "hint_temperature", T::Bool, "false", {}},
      {"workload", "permutation", T::Bool, "false", {}},
      {"workload", "priority", T::I64, "0", {}},
      {"workload", "deadline_ns", T::U64, "0", {}},
      {"workload", "r_pages", T::U64, "64", {}},
      {"workload", "s_pages", T::U64, "64", {}},
      {"workload", "partitions", T::U64, "4", {}},
      {"workload", "extent_pages", T::U64, "16", {}},
      {"workload", "window", T::U64, "0", {}},
      {"workload", "depends", T::IdList, "", {}},
      {"workload", "measured", T::Bool, "true", {}},
  };
  return s;
}

const Config::KeySpec* Config::find_spec(const std::string& path) {
  auto dot = path.find('.');
  if (dot == std::string::npos) return nullptr;
  auto section = path.substr(0, dot);
  auto key = path.substr(dot + 1);
  if (section == "workload") {
    std::string field;
    if (thread_index(key, &field)) {
      for (const auto& s : thread_schema())
        if (s.key == field) return &s;
      return nullptr;
    }
  }
  for (const auto& s : schema())
    if (s.section == section && s.key == key) return &s;
  return nullptr;
}

bool Config::known_key(const std::string& path) { return find_spec(path) != nullptr; }

void Config::check_value(const KeySpec& spec, const std::string& path, const std::string& v) {
  bool ok = true;
  switch (spec.type) {
    case T::U64: {
      std::uint64_t x;
      ok = parse_u64(v, x);
      break;
    }
    case T::I64: {
      std::int64_t x;
      ok = parse_i64(v, x);
      break;
    }
    case T::Double: {
      double x;
      ok = parse_double(v, x);
      break;
    }
    case T::Bool: {
      bool x;
      ok = parse_bool(v, x);
      break;
    }
    case T::Choice: ok = std::find(spec.choices.begin(), spec.choices.end(), v) != spec.choices.end(); break;
    case T::Text: break;
    case T::IdList:
      if (!v.empty()) {
        for (const auto& part : split(v, ';')) {
          std::uint64_t x;
          if (!parse_u64(part, x)) ok = false;
        }
      }
      break;
  }
  if (!ok) {
    std::string msg = path + ": invalid value '" + v + "', expected " + type_name(spec.type);
    if (spec.type == T::Choice) {
      msg += " (";
      for (std::size_t i = 0; i < spec.choices.size(); ++i) msg += (i ? ", " : "") + spec.choices[i];
      msg += ")";
    }
    throw ConfigError(msg);
  }
}

void Config::set(const std::string& path, const std::string& value) {
  const KeySpec* spec = find_spec(path);
  if (!spec) throw ConfigError(path + ": unknown configuration key");
  auto v = trim(value);
  check_value(*spec, path, v);
  values_[path] = v;
}

std::string Config::get(const std::string& path) const {
  const KeySpec* spec = find_spec(path);
  if (!spec) throw ConfigError(path + ": unknown configuration key");
  auto it = values_.find(path);
  return it != values_.end() ? it->second : spec->default_value;
}

std::uint64_t Config::get_u64(const std::string& path) const {
  std::uint64_t x = 0;
  if (!parse_u64(get(path), x)) throw ConfigError(path + ": expected a non-negative integer");
  return x;
}

std::int64_t Config::get_i64(const std::string& path) const {
  std::int64_t x = 0;
  if (!parse_i64(get(path), x)) throw ConfigError(path + ": expected an integer");
  return x;
}

double Config::get_double(const std::string& path) const {
  double x = 0;
  if (!parse_double(get(path), x)) throw ConfigError(path + ": expected a number");
  return x;
}

bool Config::get_bool(const std::string& path) const {
  bool x = false;
  if (!parse_bool(get(path), x)) throw ConfigError(path + ": expected a boolean");
  return x;
}

std::vector<std::int64_t> Config::get_ids(const std::string& path) const {
  std::vector<std::int64_t> out;
  auto v = get(path);
  if (v.empty()) return out;
  for (const auto& part : split(v, ';')) {
    std::uint64_t x = 0;
    if (!parse_u64(part, x)) throw ConfigError(path + ": expected thread indices");
    out.push_back(static_cast<std::int64_t>(x));
  }
  return out;
}

std::vector<std::uint32_t> Config::thread_indices() const {
  std::vector<std::uint32_t> out;
  for (const auto& [path, v] : values_) {
    if (path.rfind("workload.", 0) != 0) continue;
    if (auto n = thread_index(path.substr(9), nullptr)) out.push_back(*n);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Config Config::parse(std::string_view text, const std::string& origin) {
  Config cfg;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  // An unknown section is reported through its first key, which names the
  // full dotted path; an empty one is reported on its own.
  std::string unknown_section;
  auto check_unknown = [&]() {
    if (!unknown_section.empty()) throw ConfigError(unknown_section);
  };
  while (std::getline(in, raw)) {
    ++lineno;
    auto where = origin + ":" + std::to_string(lineno);
    auto line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      check_unknown();
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (std::find(sections().begin(), sections().end(), section) == sections().end())
        unknown_section = where + ": unknown section [" + section + "]";
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside of any section");
    auto key = trim(std::string_view(line).substr(0, eq));
    auto value = std::string(std::string_view(line).substr(eq + 1));
    if (auto hash = value.find(" #"); hash != std::string::npos) value.resize(hash);
    auto path = section + "." + key;
    if (cfg.has(path)) throw ConfigError(where + ": " + path + " set twice");
    try {
      cfg.set(path, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  check_unknown();
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path);
}

std::string Config::resolved_text() const {
  std::ostringstream out;
  for (const auto& section : sections()) {
    out << "[" << section << "]\n";
    for (const auto& s : schema())
      if (s.section == section) out << s.key << " = " << get(section + "." + s.key) << "\n";
    if (section == "workload") {
      for (auto n : thread_indices()) {
        for (const auto& s : thread_schema()) {
          auto path = "workload.t" + std::to_string(n) + "." + s.key;
          if (has(path)) out << "t" << n << "." << s.key << " = " << get(path) << "\n";
        }
      }
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace flashsim
