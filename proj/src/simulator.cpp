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

#include "simulator.hpp"

#include <algorithm>

namespace flashsim {

namespace {

SimulationError violation(const std::string& what) {
  return SimulationError(SimulationError::Kind::ModelViolation, what);
}

bool is_migration_write(const IoRequest& io) {
  return io.kind == IoKind::Write && (io.source == IoSource::Gc || io.source == IoSource::Wl);
}

}  // namespace

// ---- thread context -------------------------------------------------------

class Simulator::Context : public ThreadContext {
 public:
  Context(Simulator& sim, ThreadState& t) : sim_(sim), t_(t) {}
  ThreadId id() const override { return t_.id; }
  Nanos now() const override { return sim_.now(); }
  std::uint64_t logical_pages() const override { return sim_.logical_pages(); }
  Rng& rng() override { return *t_.rng; }
  IoId submit_read(Lpn lpn, std::optional<Nanos> deadline) override {
    return sim_.submit_app(t_, IoKind::Read, lpn, deadline);
  }
  IoId submit_write(Lpn lpn) override { return sim_.submit_app(t_, IoKind::Write, lpn, std::nullopt); }
  IoId submit_trim(Lpn lpn) override { return sim_.submit_app(t_, IoKind::Trim, lpn, std::nullopt); }
  void send(const Message& m) override { sim_.bus_.deliver(t_.id, m); }
  void finish() override { sim_.finish_thread(t_); }

 private:
  Simulator& sim_;
  ThreadState& t_;
};

// ---- construction ---------------------------------------------------------

Simulator::Simulator(const SimConfig& cfg)
    : cfg_(cfg),
      dev_(cfg.geometry, cfg.timing, cfg.scheduler.interleaving, cfg.ram_bytes, cfg.bbram_bytes),
      ftl_(std::make_unique<Ftl>(cfg.geometry, cfg.ftl, dev_.ram())),
      pool_(cfg.geometry.total_luns()),
      alloc_(dev_, pool_),
      slots_(cfg.geometry.total_luns()),
      gc_(cfg.gc, dev_, *ftl_, alloc_, slots_),
      wl_(cfg.wl, dev_, *ftl_, alloc_, slots_, cfg.gc.copyback),
      detector_(cfg.detector),
      sched_(cfg.scheduler, cfg.geometry.total_luns()),
      os_(cfg.os) {
  const auto logical = ftl_->logical_pages();
  shadow_.assign(logical, 0);
  hints_.assign(logical, 0);

  auto route = [this](ThreadId from, const Message& m) { handle_message(from, m); };
  for (const char* k : {msg::kSubmitIo, msg::kTrim, msg::kTagPriority, msg::kTagTemperature, msg::kTagLocality})
    bus_.register_kind(k, route);

  for (std::size_t i = 0; i < cfg.threads.size(); ++i) {
    const auto& spec = cfg.threads[i];
    add_thread(make_thread(spec, cfg.window, logical, "workload.t" + std::to_string(i)), spec.depends, spec.measured);
  }

  auto precondition = [&](ThreadId id, bool random, std::vector<ThreadId> deps) {
    ThreadState t;
    t.id = id;
    if (random) {
      RandomWriterParams p;
      p.count = logical;
      p.permutation = true;
      t.impl = std::make_unique<RandomWriter>(p, cfg.window);
    } else {
      t.impl = std::make_unique<SequentialWriter>(0, logical, 1, cfg.window);
    }
    t.depends = std::move(deps);
    t.measured = false;
    t.rng = std::make_unique<Rng>(cfg.seed, id);
    thread_index_[id] = threads_.size();
    threads_.push_back(std::move(t));
    os_.add_thread(id);
  };
  std::optional<ThreadId> last_pre;
  switch (cfg.precondition) {
    case Precondition::None: break;
    case Precondition::Sequential: precondition(kPreconditionThread, false, {}); break;
    case Precondition::Random: precondition(kPreconditionThread, true, {}); break;
    case Precondition::SeqThenRandom:
      precondition(kPreconditionThread, false, {});
      precondition(kPreconditionThread + 1, true, {kPreconditionThread});
      break;
  }
  if (cfg.precondition == Precondition::SeqThenRandom) last_pre = kPreconditionThread + 1;
  else if (cfg.precondition != Precondition::None) last_pre = kPreconditionThread;
  if (last_pre) {
    for (std::size_t i = 0; i < cfg.threads.size(); ++i) threads_[i].depends.push_back(*last_pre);
  }
}

Simulator::~Simulator() = default;

ThreadId Simulator::add_thread(std::unique_ptr<WorkloadThread> impl, std::vector<ThreadId> depends, bool measured) {
  if (ran_) throw violation("threads must be added before run()");
  ThreadId id = 0;
  for (const auto& t : threads_)
    if (t.id < kPreconditionThread) id = std::max(id, t.id + 1);
  ThreadState t;
  t.id = id;
  t.impl = std::move(impl);
  t.depends = std::move(depends);
  t.measured = measured;
  t.rng = std::make_unique<Rng>(cfg_.seed, id);
  // Custom threads also wait for preconditioning.
  for (const auto& other : threads_)
    if (other.id >= kPreconditionThread && std::find(t.depends.begin(), t.depends.end(), other.id) == t.depends.end() &&
        (other.id == kPreconditionThread + 1 || cfg_.precondition != Precondition::SeqThenRandom))
      t.depends.push_back(other.id);
  thread_index_[id] = threads_.size();
  threads_.push_back(std::move(t));
  os_.add_thread(id);
  return id;
}

Simulator::ThreadState& Simulator::thread(ThreadId id) {
  auto it = thread_index_.find(id);
  if (it == thread_index_.end()) throw violation("unknown thread " + std::to_string(id));
  return threads_[it->second];
}

std::optional<Temperature> Simulator::temperature_hint(Lpn lpn) const {
  if (hints_[lpn] == 1) return Temperature::Hot;
  if (hints_[lpn] == 2) return Temperature::Cold;
  return std::nullopt;
}

// ---- threads and messages -------------------------------------------------

void Simulator::start_thread(ThreadState& t) {
  t.state = ThreadState::State::Running;
  Context ctx(*this, t);
  t.impl->init(ctx);
}

void Simulator::finish_thread(ThreadState& t) {
  if (t.state == ThreadState::State::Done) return;
  t.state = ThreadState::State::Done;
  for (ThreadId d : t.dependents) {
    auto& dep = thread(d);
    if (--dep.remaining == 0) start_thread(dep);
  }
}

IoId Simulator::submit_app(ThreadState& t, IoKind kind, Lpn lpn, std::optional<Nanos> deadline) {
  if (t.state != ThreadState::State::Running)
    throw violation("thread " + std::to_string(t.id) + " submitted an IO while not running");
  if (lpn >= ftl_->logical_pages())
    throw violation("thread " + std::to_string(t.id) + " addressed lpn " + std::to_string(lpn) +
                    " beyond the logical space");
  auto& io = new_io(IoSource::App, kind);
  io.thread = t.id;
  io.lpn = lpn;
  io.measured = t.measured;
  if (deadline) io.deadline = io.created + *deadline;
  if (kind == IoKind::Write) io.tag = app_tag(t.id, ++t.write_seq);
  if (io.measured && !stats_.measured) {
    stats_.measured = true;
    stats_.measure_start = io.created;
    for (auto* s : sinks_) s->on_measure_start(io.created);
  }
  os_.submit(t.id, io.id, 0);
  return io.id;
}

void Simulator::handle_message(ThreadId from, const Message& m) {
  if (m.kind == msg::kSubmitIo || m.kind == msg::kTrim) {
    auto& t = thread(from);
    IoKind kind = IoKind::Trim;
    if (m.kind == msg::kSubmitIo) {
      auto op = m.fields.count("op") ? m.fields.at("op") : std::string();
      if (op == "read") kind = IoKind::Read;
      else if (op == "write") kind = IoKind::Write;
      else throw violation("SUBMIT_IO needs op=read|write");
    }
    submit_app(t, kind, m.first, std::nullopt);
    return;
  }
  // Hints are out-of-band and free; without the open interface they are
  // dropped on the floor.
  if (!cfg_.os.open_interface) return;
  const auto logical = ftl_->logical_pages();
  if (m.kind == msg::kTagPriority) {
    if (os_.tag_priority(m.io, m.priority)) ios_.at(m.io).priority = m.priority;
  } else if (m.kind == msg::kTagTemperature) {
    if (m.first > logical || m.count > logical - m.first) throw violation("TAG_TEMPERATURE range out of bounds");
    std::uint8_t v = m.temperature == Temperature::Hot ? 1 : 2;
    std::fill(hints_.begin() + static_cast<std::ptrdiff_t>(m.first),
              hints_.begin() + static_cast<std::ptrdiff_t>(m.first + m.count), v);
  } else if (m.kind == msg::kTagLocality) {
    for (Lpn l : m.lpns) {
      if (l >= logical) throw violation("TAG_LOCALITY lpn out of bounds");
      locality_[l] = m.group;
    }
  }
}

// ---- IO creation ----------------------------------------------------------

IoRequest& Simulator::new_io(IoSource source, IoKind kind) {
  IoId id = next_io_++;
  auto& io = ios_[id];
  io.id = id;
  io.source = source;
  io.kind = kind;
  io.created = now();
  io.os_dispatched = io.created;
  io.ssd_enqueued = io.created;
  return io;
}

IoRequest& Simulator::mapping_io(IoKind kind, std::uint32_t tp) {
  auto& io = new_io(IoSource::Mapping, kind);
  io.tpage = tp;
  io.temperature = Temperature::Cold;
  if (kind == IoKind::Write) io.tag = tpage_tag(tp);
  return io;
}

void Simulator::add_side_ios(IoRequest& io, const TranslationAccess& side) {
  // Side IOs may rehash the table; `io` stays valid (node-based map).
  if (side.writeback_tpage) {
    auto& w = mapping_io(IoKind::Write, *side.writeback_tpage);
    io.preds.push_back(w.id);
    w.succs.push_back(io.id);
    ++io.unresolved;
    make_ready(w);
  }
  if (side.read_tpage) {
    auto& r = mapping_io(IoKind::Read, *side.read_tpage);
    io.preds.push_back(r.id);
    r.succs.push_back(io.id);
    ++io.unresolved;
    make_ready(r);
  }
}

// A relocation updates its cached entry in place; only a dirty eviction
// costs an IO, and nothing waits for it.
void Simulator::relocated(Lpn lpn) {
  // The moved entry turns dirty in the cache; an evicted dirty entry is
  // written back on its own.
  auto side = ftl_->access(lpn, true, false);
  if (side.writeback_tpage) make_ready(mapping_io(IoKind::Write, *side.writeback_tpage));
}

Temperature Simulator::classify(Lpn lpn) const {
  if (hints_[lpn] == 1) return Temperature::Hot;
  if (hints_[lpn] == 2) return Temperature::Cold;
  if (cfg_.detector.enabled) return detector_.classify(lpn);
  return Temperature::Cold;
}

Temperature Simulator::write_temperature(Lpn lpn) {
  if (cfg_.detector.enabled) detector_.record_write(lpn);
  return classify(lpn);
}

// An application IO arriving at the SSD.
void Simulator::admit(IoRequest& io) {
  io.os_dispatched = now();
  io.ssd_enqueued = now();
  Lpn lpn = *io.lpn;
  switch (io.kind) {
    case IoKind::Read: {
      if (!ftl_->lookup(lpn)) {
        if (shadow_[lpn] != 0) ++stats_.lost_mappings;
        resolve_now(io, IoStatus::Failed);
        return;
      }
      add_side_ios(io, ftl_->access(lpn, false));
      break;
    }
    case IoKind::Write: {
      io.temperature = write_temperature(lpn);
      if (auto it = locality_.find(lpn); it != locality_.end()) io.locality_group = it->second;
      // Preconditioning formats the drive: translation pages are known
      // empty, so cache entries are created without loading them.
      add_side_ios(io, ftl_->access(lpn, true, io.thread != kPreconditionThread));
      break;
    }
    case IoKind::Trim: add_side_ios(io, ftl_->access(lpn, true)); break;
    default: throw violation("unsupported application IO kind");
  }
  if (io.unresolved == 0) make_ready(io);
}

void Simulator::make_ready(IoRequest& io) {
  if (io.noop) {
    resolve_now(io, IoStatus::Noop);
    return;
  }
  sched_.enqueue(io, *this);
}

// Completes an IO at the current instant without touching flash.
void Simulator::resolve_now(IoRequest& io, IoStatus status) {
  io.status = status;
  io.noop = status == IoStatus::Noop;
  io.exec_started = now();
  engine_.schedule(Event{Event::Type::Complete, io.id}, now());
}

void Simulator::submit_plan(const RelocationPlan& plan, IoSource source) {
  std::uint64_t job = next_job_++;
  if (source == IoSource::Gc) ++stats_.gc_jobs; else ++stats_.wl_jobs;
  std::vector<IoId> ids;
  ids.reserve(plan.ios.size());
  for (const auto& p : plan.ios) {
    auto& io = new_io(source, p.kind);
    io.job = job;
    io.temperature = p.temperature;
    if (p.owner.kind == PageOwner::Kind::Data) io.lpn = p.owner.id;
    if (p.owner.kind == PageOwner::Kind::Translation) io.tpage = static_cast<std::uint32_t>(p.owner.id);
    if (p.kind == IoKind::Write) io.migrate_from = p.ppa;
    else io.ppa = p.ppa;
    for (auto pi : p.preds) {
      auto& pred = ios_.at(ids[pi]);
      io.preds.push_back(pred.id);
      pred.succs.push_back(io.id);
      ++io.unresolved;
    }
    ids.push_back(io.id);
  }
  for (auto id : ids) {
    auto& io = ios_.at(id);
    if (io.unresolved == 0) make_ready(io);
  }
}

// ---- dispatch -------------------------------------------------------------

std::optional<std::uint32_t> Simulator::target_lun(const IoRequest& io) const {
  switch (io.kind) {
    case IoKind::Read:
      if (io.source == IoSource::App) {
        auto ppa = ftl_->lookup(*io.lpn);
        if (!ppa) return std::nullopt;
        return lun_of(*ppa);
      }
      if (io.source == IoSource::Mapping) {
        auto loc = ftl_->tpage_location(*io.tpage);
        if (!loc) return std::nullopt;
        return lun_of(*loc);
      }
      return lun_of(*io.ppa);
    case IoKind::Write:
      if (io.migrate_from) return lun_of(*io.migrate_from);
      return std::nullopt;
    case IoKind::Copyback:
    case IoKind::Erase: return lun_of(*io.ppa);
    case IoKind::Trim: return std::nullopt;
  }
  return std::nullopt;
}

bool Simulator::lun_blocked(std::uint32_t lun, Nanos now) const { return !dev_.lun_may_start(lun, now); }

void Simulator::schedule_wake(Nanos t) {
  if (t <= now()) return;
  if (wakes_.insert(t).second) engine_.schedule(Event{Event::Type::Wake, 0}, t);
}

void Simulator::started(IoRequest& io, const CommandTiming& ct) {
  io.exec_started = ct.start;
  io.channel_busy = ct.channel_busy;
  io.lun_busy = ct.lun_busy;
  engine_.schedule(Event{Event::Type::Complete, io.id}, ct.complete);
  for (std::uint8_t i = 0; i < ct.wake_count; ++i)
    if (ct.wake_points[i] != ct.complete) schedule_wake(ct.wake_points[i]);
}

TryResult Simulator::try_start(IoRequest& io, Nanos at) {
  const auto& geo = dev_.geometry();
  auto bucket_lun = [&](const std::optional<std::uint32_t>& lun) {
    return lun ? static_cast<std::int32_t>(*lun) : static_cast<std::int32_t>(geo.total_luns());
  };

  switch (io.kind) {
    case IoKind::Read: {
      std::optional<PhysicalAddress> ppa;
      if (io.source == IoSource::App) {
        ppa = ftl_->lookup(*io.lpn);
        if (!ppa) {
          // Trimmed while queued.
          if (shadow_[*io.lpn] != 0) ++stats_.lost_mappings;
          resolve_now(io, IoStatus::Failed);
          return TryResult::Removed;
        }
      } else if (io.source == IoSource::Mapping) {
        ppa = ftl_->tpage_location(*io.tpage);
        if (!ppa) throw violation("translation page " + std::to_string(*io.tpage) + " has no flash copy");
      } else {
        ppa = io.ppa;
        if (!dev_.is_valid(*ppa)) {
          resolve_now(io, IoStatus::Noop);
          return TryResult::Removed;
        }
      }
      auto lun = lun_of(*ppa);
      if (bucket_lun(lun) != io.bucket) return TryResult::Moved;
      if (!dev_.can_start(FlashOp::Read, lun, ppa->page, at)) return TryResult::Blocked;
      io.ppa = ppa;
      io.tag = dev_.read_page(*ppa);
      if (io.source == IoSource::App) {
        if (io.tag != shadow_[*io.lpn]) ++stats_.integrity_errors;
      } else if (io.source == IoSource::Mapping) {
        if (io.tag != tpage_tag(*io.tpage)) ++stats_.integrity_errors;
      }
      started(io, dev_.reserve(FlashOp::Read, lun, ppa->page, at));
      return TryResult::Started;
    }

    case IoKind::Write: {
      PlacementRequest req;
      req.temperature = io.temperature;
      if (io.source == IoSource::App) {
        req.stream = WriteStream::Data;
        req.locality_group = io.locality_group;
      } else if (io.source == IoSource::Mapping) {
        req.stream = WriteStream::Mapping;
      } else {
        req.stream = WriteStream::Relocation;
        req.only_lun = lun_of(*io.migrate_from);
      }
      auto same = [&](const PlacementRequest& r) {
        return r.temperature == req.temperature && r.locality_group == req.locality_group && r.stream == req.stream;
      };
      if (!req.only_lun && std::any_of(failed_placements_.begin(), failed_placements_.end(), same))
        return TryResult::Blocked;
      auto avail = [&](std::uint32_t lun, std::uint32_t page) {
        return dev_.can_start(FlashOp::Program, lun, page, at);
      };
      auto p = alloc_.choose(req, avail);
      if (!p) {
        if (!req.only_lun) failed_placements_.push_back(req);
        return TryResult::Blocked;
      }
      alloc_.commit(*p, req);
      gc_dirty_.insert(p->lun);
      io.ppa = p->addr;
      started(io, dev_.reserve(FlashOp::Program, p->lun, p->addr.page, at));
      return TryResult::Started;
    }

    case IoKind::Copyback: {
      if (!dev_.is_valid(*io.ppa)) {
        resolve_now(io, IoStatus::Noop);
        return TryResult::Removed;
      }
      PlacementRequest req;
      req.temperature = io.temperature;
      req.stream = WriteStream::Relocation;
      req.only_lun = lun_of(*io.ppa);
      auto avail = [&](std::uint32_t lun, std::uint32_t page) {
        return dev_.can_start(FlashOp::Copyback, lun, page, at);
      };
      auto p = alloc_.choose(req, avail);
      if (!p) return TryResult::Blocked;
      alloc_.commit(*p, req);
      gc_dirty_.insert(p->lun);
      io.dst = p->addr;
      started(io, dev_.reserve(FlashOp::Copyback, p->lun, p->addr.page, at));
      return TryResult::Started;
    }

    case IoKind::Erase: {
      auto lun = lun_of(*io.ppa);
      if (!dev_.can_start(FlashOp::Erase, lun, 0, at)) return TryResult::Blocked;
      auto block = dev_.addresses().block_id(*io.ppa);
      if (dev_.block(block).valid_count > 0)
        throw SimulationError(SimulationError::Kind::Integrity,
                              "erase of block " + to_string(*io.ppa) + " with valid pages after migration");
      started(io, dev_.reserve(FlashOp::Erase, lun, 0, at));
      return TryResult::Started;
    }

    case IoKind::Trim: {
      for (std::uint32_t ch = 0; ch < geo.channels; ++ch) {
        if (!dev_.channel_free(ch, at, cfg_.timing.t_cmd)) continue;
        io.ppa = PhysicalAddress{ch, 0, 0, 0};
        started(io, dev_.reserve_channel_command(ch, at));
        return TryResult::Started;
      }
      return TryResult::Blocked;
    }
  }
  return TryResult::Blocked;
}

// ---- completion -----------------------------------------------------------

void Simulator::apply_completion(IoRequest& io) {
  switch (io.kind) {
    case IoKind::Read: break;
    case IoKind::Write: {
      dev_.program_page(*io.ppa, io.tag);
      if (io.source == IoSource::App) {
        auto old = ftl_->bind_write(*io.lpn, *io.ppa, dev_);
        if (old) gc_dirty_.insert(lun_of(*old));
        shadow_[*io.lpn] = io.tag;
        if (++writes_since_scan_ >= cfg_.wl.scan_interval) {
          writes_since_scan_ = 0;
          wl_due_ = cfg_.wl.enabled;
        }
      } else if (io.source == IoSource::Mapping) {
        auto old = ftl_->tpage_location(*io.tpage);
        ftl_->bind_tpage(*io.tpage, *io.ppa, dev_);
        if (old) gc_dirty_.insert(lun_of(*old));
      } else {
        if (io.source == IoSource::Gc) ++stats_.gc_migrations; else ++stats_.wl_migrations;
        if (io.lpn) {
          if (ftl_->relocate(*io.lpn, *io.migrate_from, *io.ppa, dev_)) relocated(*io.lpn);
        } else {
          ftl_->relocate_tpage(*io.tpage, *io.migrate_from, *io.ppa, dev_);
        }
        gc_dirty_.insert(lun_of(*io.ppa));
      }
      break;
    }
    case IoKind::Copyback: {
      io.tag = dev_.peek_page(*io.ppa);
      dev_.program_page(*io.dst, io.tag);
      if (io.source == IoSource::Gc) ++stats_.gc_migrations; else ++stats_.wl_migrations;
      if (io.lpn) {
        if (ftl_->relocate(*io.lpn, *io.ppa, *io.dst, dev_)) relocated(*io.lpn);
      } else {
        ftl_->relocate_tpage(*io.tpage, *io.ppa, *io.dst, dev_);
      }
      gc_dirty_.insert(lun_of(*io.dst));
      break;
    }
    case IoKind::Erase: {
      auto block = dev_.addresses().block_id(*io.ppa);
      Nanos previous = dev_.block(block).last_erase_time;
      bool erased_before = dev_.block(block).erase_count > 0;
      dev_.erase_block(block, now());
      // A block's first erase has no interval to contribute.
      if (erased_before) wl_.on_erase(now(), previous);
      alloc_.on_block_erased(block);
      auto lun = lun_of(*io.ppa);
      slots_.release(lun);
      gc_dirty_.insert(lun);
      // A scan deferred by busy LUNs retries when a job slot frees up.
      if (wl_.deferred()) wl_due_ = true;
      ++stats_.erases;
      break;
    }
    case IoKind::Trim: {
      auto old = ftl_->unmap(*io.lpn, dev_);
      if (old) gc_dirty_.insert(lun_of(*old));
      shadow_[*io.lpn] = 0;
      break;
    }
  }
}

void Simulator::complete(IoId id) {
  auto it = ios_.find(id);
  if (it == ios_.end()) throw violation("completion for unknown IO " + std::to_string(id));
  IoRequest& io = it->second;
  io.completed = now();
  if (io.status == IoStatus::Pending) {
    io.status = IoStatus::Ok;
    apply_completion(io);
  }
  if (io.status == IoStatus::Noop && (io.source == IoSource::Gc || io.source == IoSource::Wl) &&
      io.kind != IoKind::Erase)
    ++stats_.noop_migrations;
  if (io.source == IoSource::Mapping && io.status == IoStatus::Ok) ++stats_.mapping_ios;
  if (io.source == IoSource::App && io.kind == IoKind::Read && io.status == IoStatus::Failed) ++stats_.failed_reads;
  ++stats_.total_ios;

  for (auto* s : sinks_) s->on_io(io);

  for (IoId sid : io.succs) {
    auto& s = ios_.at(sid);
    if (io.kind == IoKind::Read && is_migration_write(s)) {
      if (io.status == IoStatus::Noop) s.noop = true;
      else s.tag = io.tag;
    }
    if (--s.unresolved == 0) make_ready(s);
  }

  if (io.source == IoSource::App) {
    ++stats_.app_completed;
    if (io.status == IoStatus::Ok) {
      if (io.kind == IoKind::Read) ++stats_.app_reads;
      if (io.kind == IoKind::Write) ++stats_.app_writes;
      if (io.kind == IoKind::Trim) ++stats_.app_trims;
    }
    os_.on_interrupt(io.id);
    CompletedIo done;
    done.id = io.id;
    done.kind = io.kind;
    done.lpn = *io.lpn;
    done.status = io.status;
    done.tag = io.tag;
    done.created = io.created;
    done.completed = io.completed;
    auto& t = thread(io.thread);
    ios_.erase(it);
    Context ctx(*this, t);
    t.impl->call_back(ctx, done);
    return;
  }
  ios_.erase(it);
}

// ---- driver ---------------------------------------------------------------

void Simulator::run_background() {
  if (wl_due_) {
    wl_due_ = false;
    auto plan = wl_.static_wl_scan(now());
    if (!plan.empty()) submit_plan(plan, IoSource::Wl);
  }
  while (!gc_dirty_.empty()) {
    auto lun = *gc_dirty_.begin();
    gc_dirty_.erase(gc_dirty_.begin());
    auto plan = gc_.check_gc(lun, now(), [this](Lpn l) { return classify(l); });
    if (!plan.empty()) submit_plan(plan, IoSource::Gc);
  }
}

void Simulator::settle() {
  do {
    run_background();
    for (IoId id : os_.dispatch()) admit(ios_.at(id));
    sched_.dispatch(now(), *this);
  } while (!gc_dirty_.empty() || wl_due_);
}

void Simulator::drain() {
  while (true) {
    settle();
    auto next = engine_.next_time();
    if (!next) break;
    while (engine_.next_time() == next) {
      auto ev = engine_.advance();
      if (ev->payload.type == Event::Type::Wake) wakes_.erase(ev->time);
      else complete(ev->payload.id);
    }
    dev_.prune(now());
  }
}

RunStats Simulator::run() {
  if (ran_) throw violation("run() called twice");
  ran_ = true;

  // Wire dependencies and check that every referenced thread exists.
  for (auto& t : threads_) {
    t.remaining = static_cast<std::uint32_t>(t.depends.size());
    for (ThreadId d : t.depends) thread(d).dependents.push_back(t.id);
  }

  // DFTL keeps the whole map on flash from the start.
  if (ftl_->scheme() == MappingScheme::Dftl) {
    for (std::uint32_t tp = 0; tp < ftl_->tpage_count(); ++tp) make_ready(mapping_io(IoKind::Write, tp));
    drain();
  }
  stats_.bootstrap_end = now();

  for (auto& t : threads_)
    if (t.remaining == 0 && t.state == ThreadState::State::Waiting) start_thread(t);
  drain();

  std::size_t unfinished = 0;
  for (const auto& t : threads_) unfinished += t.state != ThreadState::State::Done ? 1 : 0;
  if (!ios_.empty() || unfinished > 0) {
    throw SimulationError(SimulationError::Kind::OutOfSpace,
                          "simulation stalled at " + std::to_string(now()) + " ns with " +
                              std::to_string(ios_.size()) + " IOs unserved and " + std::to_string(unfinished) +
                              " threads unfinished; the device has no reclaimable space");
  }
  stats_.stale_tags = os_.stale_tags();
  stats_.end_time = now();
  return stats_;
}

}  // namespace flashsim
