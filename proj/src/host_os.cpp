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

#include "host_os.hpp"

#include <tuple>

namespace flashsim {

std::string_view to_string(OsPolicy p) {
  switch (p) {
    case OsPolicy::Fifo: return "fifo";
    case OsPolicy::Priority: return "priority";
    case OsPolicy::FairShare: return "fair_share";
  }
  return "?";
}

OsPolicy parse_os_policy(std::string_view s) {
  if (s == "fifo") return OsPolicy::Fifo;
  if (s == "priority") return OsPolicy::Priority;
  if (s == "fair_share") return OsPolicy::FairShare;
  throw ConfigError("os.policy: unknown policy '" + std::string(s) + "' (fifo, priority, fair_share)");
}

// ---- MessageBus -----------------------------------------------------------

void MessageBus::register_kind(const std::string& kind, Handler h) {
  if (kind.empty()) throw ConfigError("message kind must be non-empty");
  if (!handlers_.emplace(kind, std::move(h)).second) throw ConfigError("message kind registered twice: " + kind);
}

void MessageBus::deliver(ThreadId from, const Message& m) const {
  auto it = handlers_.find(m.kind);
  if (it == handlers_.end())
    throw SimulationError(SimulationError::Kind::ModelViolation, "unknown message kind '" + m.kind + "'");
  it->second(from, m);
}

std::vector<std::string> MessageBus::kinds() const {
  std::vector<std::string> out;
  for (const auto& [k, h] : handlers_) out.push_back(k);
  return out;
}

// ---- HostOs ---------------------------------------------------------------

HostOs::HostOs(const OsConfig& cfg) : cfg_(cfg) {
  if (cfg.queue_depth < 1) throw ConfigError("os.queue_depth must be >= 1");
}

void HostOs::add_thread(ThreadId t) { per_thread_[t]; }

std::size_t HostOs::pooled(ThreadId t) const {
  auto it = per_thread_.find(t);
  if (it == per_thread_.end()) return 0;
  if (cfg_.policy == OsPolicy::FairShare) return it->second.size();
  std::size_t n = 0;
  for (const auto& [id, p] : pooled_) n += p.thread == t ? 1 : 0;
  return n;
}

void HostOs::submit(ThreadId t, IoId id, int priority) {
  if (!per_thread_.count(t))
    throw SimulationError(SimulationError::Kind::ModelViolation, "submit from unregistered thread " + std::to_string(t));
  auto seq = next_seq_++;
  pooled_.emplace(id, Pooled{t, seq, priority});
  switch (cfg_.policy) {
    case OsPolicy::Fifo: fifo_.insert({seq, id}); break;
    case OsPolicy::Priority: by_priority_.insert({-priority, seq, id}); break;
    case OsPolicy::FairShare: per_thread_[t].push_back(id); break;
  }
}

bool HostOs::tag_priority(IoId id, int priority) {
  auto it = pooled_.find(id);
  if (it == pooled_.end()) {
    ++stale_tags_;
    return false;
  }
  if (cfg_.policy == OsPolicy::Priority) {
    by_priority_.erase({-it->second.priority, it->second.seq, id});
    by_priority_.insert({-priority, it->second.seq, id});
  }
  it->second.priority = priority;
  return true;
}

IoId HostOs::pop_next() {
  IoId id = 0;
  switch (cfg_.policy) {
    case OsPolicy::Fifo:
      id = fifo_.begin()->second;
      fifo_.erase(fifo_.begin());
      break;
    case OsPolicy::Priority:
      id = std::get<2>(*by_priority_.begin());
      by_priority_.erase(by_priority_.begin());
      break;
    case OsPolicy::FairShare: {
      // Round-robin over threads in id order, starting at the cursor.
      auto it = per_thread_.lower_bound(fair_cursor_);
      for (std::size_t k = 0; k <= per_thread_.size(); ++k) {
        if (it == per_thread_.end()) it = per_thread_.begin();
        if (!it->second.empty()) break;
        ++it;
      }
      id = it->second.front();
      it->second.pop_front();
      fair_cursor_ = it->first + 1;
      break;
    }
  }
  pooled_.erase(id);
  return id;
}

std::vector<IoId> HostOs::dispatch() {
  std::vector<IoId> out;
  while (outstanding_.size() < cfg_.queue_depth && !pooled_.empty()) {
    IoId id = pop_next();
    outstanding_.insert(id);
    out.push_back(id);
  }
  return out;
}

void HostOs::on_interrupt(IoId id) {
  if (outstanding_.erase(id) == 0)
    throw SimulationError(SimulationError::Kind::ModelViolation, "interrupt for unknown IO " + std::to_string(id));
}

}  // namespace flashsim
