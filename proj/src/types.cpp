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

#include "types.hpp"

namespace flashsim {

std::string_view to_string(IoSource s) {
  switch (s) {
    case IoSource::App: return "APP";
    case IoSource::Gc: return "GC";
    case IoSource::Wl: return "WL";
    case IoSource::Mapping: return "MAPPING";
  }
  return "?";
}

std::string_view to_string(IoKind k) {
  switch (k) {
    case IoKind::Read: return "READ";
    case IoKind::Write: return "WRITE";
    case IoKind::Erase: return "ERASE";
    case IoKind::Copyback: return "COPYBACK";
    case IoKind::Trim: return "TRIM";
  }
  return "?";
}

std::string_view to_string(IoStatus s) {
  switch (s) {
    case IoStatus::Pending: return "PENDING";
    case IoStatus::Ok: return "OK";
    case IoStatus::Noop: return "NOOP";
    case IoStatus::Failed: return "FAILED";
  }
  return "?";
}

std::string_view to_string(Temperature t) { return t == Temperature::Hot ? "HOT" : "COLD"; }

}  // namespace flashsim
