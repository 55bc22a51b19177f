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

#ifndef FLASHSIM_HOST_OS_HPP
#define FLASHSIM_HOST_OS_HPP

#include <deque>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "types.hpp"

namespace flashsim {

enum class OsPolicy : std::uint8_t { Fifo, Priority, FairShare };

std::string_view to_string(OsPolicy p);
OsPolicy parse_os_policy(std::string_view s);

struct OsConfig {
  std::uint32_t queue_depth = 16;
  OsPolicy policy = OsPolicy::Fifo;
  bool open_interface = false;
};

// Built-in message kinds of the host/device channel.
namespace msg {
inline constexpr const char* kSubmitIo = "SUBMIT_IO";
inline constexpr const char* kTrim = "TRIM";
inline constexpr const char* kTagPriority = "TAG_PRIORITY";
inline constexpr const char* kTagTemperature = "TAG_TEMPERATURE";
inline constexpr const char* kTagLocality = "TAG_LOCALITY";
}  // namespace msg

struct Message {
  std::string kind;
  IoId io = 0;                       // SUBMIT_IO, TRIM, TAG_PRIORITY
  int priority = 0;                  // TAG_PRIORITY
  Lpn first = 0;                     // TAG_TEMPERATURE range start
  Lpn count = 0;                     // TAG_TEMPERATURE range length
  Temperature temperature = Temperature::Cold;
  std::uint32_t group = 0;           // TAG_LOCALITY
  std::vector<Lpn> lpns;             // TAG_LOCALITY members
  std::map<std::string, std::string> fields;  // payload of registered extension kinds
};

// Routes messages by kind. New kinds become valid once registered.
class MessageBus {
 public:
  using Handler = std::function<void(ThreadId, const Message&)>;

  void register_kind(const std::string& kind, Handler h);
  bool known(const std::string& kind) const { return handlers_.count(kind) > 0; }
  // Unregistered kinds are a model violation.
  void deliver(ThreadId from, const Message& m) const;
  std::vector<std::string> kinds() const;

 private:
  std::map<std::string, Handler> handlers_;
};

// Per-thread pending pools and queue-depth-limited forwarding to the SSD.
class HostOs {
 public:
  explicit HostOs(const OsConfig& cfg);

  const OsConfig& config() const { return cfg_; }
  void add_thread(ThreadId t);
  void submit(ThreadId t, IoId id, int priority = 0);
  // Re-prioritises a pooled IO. Returns false (and counts a stale tag) when
  // the IO has already left the pool.
  bool tag_priority(IoId id, int priority);
  // Picks the IOs to forward now, in forwarding order.
  std::vector<IoId> dispatch();
  void on_interrupt(IoId id);

  std::uint32_t outstanding() const { return static_cast<std::uint32_t>(outstanding_.size()); }
  std::size_t pooled() const { return pooled_.size(); }
  std::size_t pooled(ThreadId t) const;
  std::uint64_t stale_tags() const { return stale_tags_; }
  bool is_pooled(IoId id) const { return pooled_.count(id) > 0; }

 private:
  struct Pooled {
    ThreadId thread;
    std::uint64_t seq;
    int priority;
  };
  IoId pop_next();

  OsConfig cfg_;
  std::uint64_t next_seq_ = 0;
  std::unordered_map<IoId, Pooled> pooled_;
  std::set<std::pair<std::uint64_t, IoId>> fifo_;               // (seq, id)
  std::set<std::tuple<int, std::uint64_t, IoId>> by_priority_;  // (-priority, seq, id)
  std::map<ThreadId, std::deque<IoId>> per_thread_;
  ThreadId fair_cursor_ = 0;
  std::unordered_set<IoId> outstanding_;
  std::uint64_t stale_tags_ = 0;
};

}  // namespace flashsim

#endif  // FLASHSIM_HOST_OS_HPP
