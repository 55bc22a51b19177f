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

#ifndef FLASHSIM_ENGINE_HPP
#define FLASHSIM_ENGINE_HPP

#include <algorithm>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "types.hpp"

namespace flashsim {

using EventId = std::uint64_t;

// Passive discrete-event queue. Callers pull events with advance(); events
// fire in (fire_at, seq) order where seq is the insertion counter.
template <class Payload>
class EventEngine {
 public:
  struct Fired {
    Nanos time;
    EventId id;
    Payload payload;
  };

  EventId schedule(Payload payload, Nanos fire_at) {
    if (fire_at < now_) {
      throw SimulationError(SimulationError::Kind::SchedulingInPast,
                            "event scheduled at " + std::to_string(fire_at) +
                                " ns, before current time " + std::to_string(now_));
    }
    EventId id = next_seq_++;
    heap_.push_back(Entry{fire_at, id, std::move(payload)});
    std::push_heap(heap_.begin(), heap_.end(), Later{});
    live_.insert(id);
    return id;
  }

  // Removes and returns the minimum event; nullopt means the simulation is
  // complete (nothing left to fire).
  std::optional<Fired> advance() {
    drop_cancelled();
    if (heap_.empty()) return std::nullopt;
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    Entry e = std::move(heap_.back());
    heap_.pop_back();
    live_.erase(e.seq);
    now_ = e.time;
    return Fired{e.time, e.seq, std::move(e.payload)};
  }

  bool cancel(EventId id) { return live_.erase(id) > 0; }

  std::optional<Nanos> next_time() {
    drop_cancelled();
    if (heap_.empty()) return std::nullopt;
    return heap_.front().time;
  }

  Nanos now() const { return now_; }
  std::size_t pending() const { return live_.size(); }
  bool empty() const { return live_.empty(); }

 private:
  struct Entry {
    Nanos time;
    EventId seq;
    Payload payload;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  void drop_cancelled() {
    while (!heap_.empty() && !live_.count(heap_.front().seq)) {
      std::pop_heap(heap_.begin(), heap_.end(), Later{});
      heap_.pop_back();
    }
  }

  std::vector<Entry> heap_;
  std::unordered_set<EventId> live_;
  EventId next_seq_ = 0;
  Nanos now_ = 0;
};

}  // namespace flashsim

#endif  // FLASHSIM_ENGINE_HPP
