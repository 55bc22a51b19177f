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

#ifndef FLASHSIM_TYPES_HPP
#define FLASHSIM_TYPES_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace flashsim {

// Virtual time and durations, integer nanoseconds.
using Nanos = std::uint64_t;
using IoId = std::uint64_t;
using Lpn = std::uint64_t;
using ThreadId = std::int32_t;

inline constexpr ThreadId kNoThread = -1;

enum class IoSource : std::uint8_t { App, Gc, Wl, Mapping };
enum class IoKind : std::uint8_t { Read, Write, Erase, Copyback, Trim };
enum class IoStatus : std::uint8_t { Pending, Ok, Noop, Failed };
enum class Temperature : std::uint8_t { Hot, Cold };

inline constexpr int kSourceCount = 4;

std::string_view to_string(IoSource s);
std::string_view to_string(IoKind k);
std::string_view to_string(IoStatus s);
std::string_view to_string(Temperature t);

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or inconsistent configuration. Maps to CLI exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Fatal simulation failure (model violation, integrity error, out of space).
// Maps to CLI exit code 2.
class SimulationError : public Error {
 public:
  enum class Kind { ModelViolation, Integrity, OutOfSpace, UnsupportedCommand, SchedulingInPast };
  SimulationError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace flashsim

#endif  // FLASHSIM_TYPES_HPP
