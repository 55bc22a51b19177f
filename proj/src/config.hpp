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

#ifndef FLASHSIM_CONFIG_HPP
#define FLASHSIM_CONFIG_HPP

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "types.hpp"

namespace flashsim {

// Flat INI configuration addressed by dotted "section.key" paths. Every key
// is checked against a schema; workload thread keys take the form
// "workload.t<N>.<field>".
class Config {
 public:
  enum class Type : std::uint8_t { U64, I64, Double, Bool, Choice, Text, IdList };

  struct KeySpec {
    std::string section;
    std::string key;
    Type type;
    std::string default_value;
    std::vector<std::string> choices;  // for Choice
  };

  static Config parse(std::string_view text, const std::string& origin = "<config>");
  static Config load(const std::string& path);

  static const std::vector<KeySpec>& schema();
  static const std::vector<KeySpec>& thread_schema();
  static const std::vector<std::string>& sections();

  // Validates the key and value; replaces any previous value.
  void set(const std::string& path, const std::string& value);
  bool has(const std::string& path) const { return values_.count(path) > 0; }
  // Explicit value, or the schema default. Throws ConfigError for unknown
  // keys.
  std::string get(const std::string& path) const;
  std::uint64_t get_u64(const std::string& path) const;
  std::int64_t get_i64(const std::string& path) const;
  double get_double(const std::string& path) const;
  bool get_bool(const std::string& path) const;
  std::vector<std::int64_t> get_ids(const std::string& path) const;

  // Workload thread indices that have at least one key set, ascending.
  std::vector<std::uint32_t> thread_indices() const;
  // Every schema key with its effective value plus all thread keys, as INI.
  std::string resolved_text() const;

  static bool known_key(const std::string& path);

 private:
  static const KeySpec* find_spec(const std::string& path);
  static void check_value(const KeySpec& spec, const std::string& path, const std::string& value);

  std::map<std::string, std::string> values_;
};

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

}  // namespace flashsim

#endif  // FLASHSIM_CONFIG_HPP
