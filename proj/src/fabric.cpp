/*
 * Copyright 2026 The cellsort Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cellsort/fabric.hpp"

#include <algorithm>
#include <array>
#include <condition_variable>
#include <deque>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <semaphore>
#include <sstream>
#include <thread>

namespace cellsort {

const char* to_string(Scheduler s) {
  return s == Scheduler::kDeterministic ? "deterministic" : "concurrent";
}

void FabricConfig::validate() const {
  if (p < 1 || p > kMaxCells || !is_power_of_two(static_cast<std::uint64_t>(p))) {
    throw ConfigError("cell count must be a power of two in [1, 1024], got " + std::to_string(p));
  }
  if (chunk_elements <= receive_tolerance) {
    throw ConfigError("chunk_elements must exceed receive_tolerance");
  }
}

std::uint64_t CommStats::total_messages() const {
  return std::accumulate(messages_sent.begin(), messages_sent.end(), std::uint64_t{0});
}

std::uint64_t CommStats::total_bytes() const {
  return std::accumulate(bytes_sent.begin(), bytes_sent.end(), std::uint64_t{0});
}

std::uint64_t CommStats::total_collective_rounds() const {
  std::uint64_t total = 0;
  for (const auto& c : collectives) total += static_cast<std::uint64_t>(c.rounds);
  return total;
}

std::vector<std::size_t> chunk_lengths(std::size_t n, std::size_t chunk, std::size_t tolerance) {
  if (n == 0) return {0};
  std::vector<std::size_t> out(n / chunk, chunk);
  const std::size_t tail = n % chunk;
  if (tail == 0) return out;
  if (tail <= tolerance && !out.empty()) {
    out.back() += tail;
  } else {
    out.push_back(tail);
  }
  return out;
}

namespace detail {

namespace {

struct AbortSignal {};

std::uint64_t digest_of(const Message& m) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ull;
  };
  for (Element e : m.elements) mix(e);
  for (std::int64_t w : m.words) mix(static_cast<std::uint64_t>(w));
  return h;
}

}  // namespace

class Engine {
 public:
  explicit Engine(Fabric& fabric)
      : fabric_(fabric),
        p_(fabric.config_.p),
        deterministic_(fabric.config_.scheduler == Scheduler::kDeterministic),
        boxes_(static_cast<std::size_t>(p_)),
        state_(static_cast<std::size_t>(p_), State::kReady),
        waits_(static_cast<std::size_t>(p_)),
        cvs_(static_cast<std::size_t>(p_)) {
    for (auto& box : boxes_) {
      for (auto& per_src : box.by_src) per_src.resize(static_cast<std::size_t>(p_));
      box.pending.fill(0);
    }
    if (deterministic_) {
      batons_.reserve(static_cast<std::size_t>(p_));
      for (int i = 0; i < p_; ++i) batons_.push_back(std::make_unique<std::binary_semaphore>(0));
    }
    if (fabric.config_.delivery_shuffle_seed) {
      for (int i = 0; i < p_; ++i) {
        rngs_.emplace_back(*fabric.config_.delivery_shuffle_seed ^
                           (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(i + 1)));
      }
    }
  }

  void run(const std::function<void(Cell&)>& program) {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(p_));
    for (int i = 0; i < p_; ++i) {
      threads.emplace_back([this, i, &program] { cell_main(i, program); });
    }
    if (deterministic_) batons_[0]->release();
    for (auto& t : threads) t.join();
    if (fault_) std::rethrow_exception(fault_);
  }

  void post(Message msg) {
    std::lock_guard lock(mu_);
    const auto tag = static_cast<std::size_t>(msg.tag);
    if (fabric_.config_.record_trace) {
      fabric_.trace_.push_back(TraceEvent{seq_, msg.src, msg.dst, msg.tag, msg.elements.size(),
                                          msg.words.size(), digest_of(msg)});
    }
    auto& box = boxes_[static_cast<std::size_t>(msg.dst)];
    const CellId dst = msg.dst;
    box.by_src[tag][static_cast<std::size_t>(msg.src)].push_back(Pending{seq_++, std::move(msg)});
    ++box.pending[tag];
    if (!deterministic_) cvs_[static_cast<std::size_t>(dst)].notify_one();
  }

  Message take(CellId me, Tag tag, std::optional<CellId> src) {
    return deterministic_ ? take_deterministic(me, tag, src) : take_concurrent(me, tag, src);
  }

 private:
  enum class State { kReady, kBlocked, kDone };

  struct Pending {
    std::uint64_t seq;
    Message msg;
  };

  struct Mailbox {
    std::array<std::vector<std::deque<Pending>>, kTagCount> by_src;
    std::array<std::size_t, kTagCount> pending{};
  };

  struct Wait {
    Tag tag = Tag::kUser0;
    std::optional<CellId> src;
  };

  bool available(CellId me, Tag tag, std::optional<CellId> src) const {
    const auto& box = boxes_[static_cast<std::size_t>(me)];
    const auto t = static_cast<std::size_t>(tag);
    if (src) return !box.by_src[t][static_cast<std::size_t>(*src)].empty();
    return box.pending[t] > 0;
  }

  Message pop(CellId me, Tag tag, std::optional<CellId> src) {
    auto& box = boxes_[static_cast<std::size_t>(me)];
    const auto t = static_cast<std::size_t>(tag);
    std::size_t from = 0;
    if (src) {
      from = static_cast<std::size_t>(*src);
    } else if (!rngs_.empty()) {
      std::vector<std::size_t> candidates;
      for (std::size_t s = 0; s < box.by_src[t].size(); ++s) {
        if (!box.by_src[t][s].empty()) candidates.push_back(s);
      }
      std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
      from = candidates[pick(rngs_[static_cast<std::size_t>(me)])];
    } else {
      std::uint64_t best = UINT64_MAX;
      for (std::size_t s = 0; s < box.by_src[t].size(); ++s) {
        const auto& q = box.by_src[t][s];
        if (!q.empty() && q.front().seq < best) {
          best = q.front().seq;
          from = s;
        }
      }
    }
    auto& q = box.by_src[t][from];
    Message m = std::move(q.front().msg);
    q.pop_front();
    --box.pending[t];
    return m;
  }

  bool runnable(int j) const {
    const auto& st = state_[static_cast<std::size_t>(j)];
    if (st == State::kReady) return true;
    if (st == State::kDone) return false;
    const auto& w = waits_[static_cast<std::size_t>(j)];
    return aborted_ || available(j, w.tag, w.src);
  }

  // Round-robin successor of `from` (itself last) that can make progress.
  int pick_next(int from) const {
    for (int i = 1; i <= p_; ++i) {
      const int j = (from + i) % p_;
      if (runnable(j)) return j;
    }
    return -1;
  }

  std::string deadlock_diagnostic() const {
    std::ostringstream os;
    os << "deadlock: every live cell is blocked;";
    for (int j = 0; j < p_; ++j) {
      if (state_[static_cast<std::size_t>(j)] != State::kBlocked) continue;
      const auto& w = waits_[static_cast<std::size_t>(j)];
      os << " cell " << j << " waits on tag " << static_cast<int>(w.tag);
      if (w.src) os << " from " << *w.src;
      os << ';';
    }
    return os.str();
  }

  void raise_deadlock() {
    if (!fault_) fault_ = std::make_exception_ptr(Fault(-1, deadlock_diagnostic()));
    aborted_ = true;
  }

  // Deterministic mode: hand the baton to the next runnable cell and wait for
  // it to come back. Only the baton holder touches engine state.
  void yield(int me) {
    int next = pick_next(me);
    if (next < 0) {
      raise_deadlock();
      next = me;
    }
    if (next == me) return;
    batons_[static_cast<std::size_t>(next)]->release();
    batons_[static_cast<std::size_t>(me)]->acquire();
  }

  Message take_deterministic(CellId me, Tag tag, std::optional<CellId> src) {
    for (;;) {
      if (aborted_) throw AbortSignal{};
      if (available(me, tag, src)) {
        state_[static_cast<std::size_t>(me)] = State::kReady;
        return pop(me, tag, src);
      }
      state_[static_cast<std::size_t>(me)] = State::kBlocked;
      waits_[static_cast<std::size_t>(me)] = Wait{tag, src};
      yield(me);
    }
  }

  bool all_live_stuck() const {
    for (int j = 0; j < p_; ++j) {
      const auto st = state_[static_cast<std::size_t>(j)];
      if (st == State::kReady) return false;
      if (st == State::kBlocked) {
        const auto& w = waits_[static_cast<std::size_t>(j)];
        if (available(j, w.tag, w.src)) return false;
      }
    }
    return true;
  }

  bool all_done() const {
    return std::all_of(state_.begin(), state_.end(), [](State s) { return s == State::kDone; });
  }

  void abort_all_locked() {
    aborted_ = true;
    for (auto& cv : cvs_) cv.notify_all();
  }

  Message take_concurrent(CellId me, Tag tag, std::optional<CellId> src) {
    std::unique_lock lock(mu_);
    for (;;) {
      if (aborted_) throw AbortSignal{};
      if (available(me, tag, src)) {
        state_[static_cast<std::size_t>(me)] = State::kReady;
        return pop(me, tag, src);
      }
      state_[static_cast<std::size_t>(me)] = State::kBlocked;
      waits_[static_cast<std::size_t>(me)] = Wait{tag, src};
      if (all_live_stuck()) {
        raise_deadlock();
        abort_all_locked();
        throw AbortSignal{};
      }
      cvs_[static_cast<std::size_t>(me)].wait(lock);
    }
  }

  void record_fault(CellId me) {
    std::exception_ptr err;
    try {
      throw;
    } catch (const Fault&) {
      err = std::current_exception();
    } catch (const std::exception& e) {
      err = std::make_exception_ptr(Fault(me, e.what()));
    } catch (...) {
      err = std::make_exception_ptr(Fault(me, "unknown exception"));
    }
    std::lock_guard lock(mu_);
    if (!fault_) fault_ = err;
    if (deterministic_) {
      aborted_ = true;
    } else {
      abort_all_locked();
    }
  }

  void finish(int me) {
    if (deterministic_) {
      state_[static_cast<std::size_t>(me)] = State::kDone;
      if (all_done()) return;
      int next = pick_next(me);
      if (next < 0) {
        raise_deadlock();
        next = pick_next(me);
      }
      batons_[static_cast<std::size_t>(next)]->release();
      return;
    }
    std::lock_guard lock(mu_);
    state_[static_cast<std::size_t>(me)] = State::kDone;
    if (!all_done() && all_live_stuck()) {
      raise_deadlock();
      abort_all_locked();
    }
  }

  void cell_main(int me, const std::function<void(Cell&)>& program) {
    if (deterministic_) batons_[static_cast<std::size_t>(me)]->acquire();
    try {
      if (aborted_) throw AbortSignal{};
      Cell cell(fabric_, me);
      program(cell);
    } catch (const AbortSignal&) {
    } catch (...) {
      record_fault(me);
    }
    finish(me);
  }

  Fabric& fabric_;
  const int p_;
  const bool deterministic_;
  std::vector<Mailbox> boxes_;
  std::vector<State> state_;
  std::vector<Wait> waits_;
  std::vector<std::condition_variable> cvs_;
  std::vector<std::unique_ptr<std::binary_semaphore>> batons_;
  std::vector<std::mt19937_64> rngs_;
  std::mutex mu_;
  bool aborted_ = false;
  std::exception_ptr fault_;
  std::uint64_t seq_ = 0;
};

}  // namespace detail

Fabric::Fabric(FabricConfig config) : config_(config) {
  config_.validate();
  stats_.messages_sent.assign(static_cast<std::size_t>(config_.p), 0);
  stats_.bytes_sent.assign(static_cast<std::size_t>(config_.p), 0);
}

Fabric::~Fabric() = default;

void Fabric::run(const std::function<void(Cell&)>& program) {
  engine_ = std::make_unique<detail::Engine>(*this);
  engine_->run(program);
  engine_.reset();
}

int Cell::cell_count() const { return fabric_.config_.p; }

const FabricConfig& Cell::config() const { return fabric_.config_; }

void Cell::fail(const std::string& what) const { throw Fault(id_, "cell " + std::to_string(id_) + ": " + what); }

void Cell::send(CellId dst, Tag tag, ElementArray payload) {
  if (dst < 0 || dst >= cell_count()) fail("send to invalid cell " + std::to_string(dst));
  const auto me = static_cast<std::size_t>(id_);
  fabric_.stats_.messages_sent[me] += 1;
  fabric_.stats_.bytes_sent[me] += payload.size() * sizeof(Element);
  Message m;
  m.src = id_;
  m.dst = dst;
  m.tag = tag;
  m.elements = std::move(payload);
  fabric_.engine_->post(std::move(m));
}

void Cell::send_words(CellId dst, Tag tag, std::vector<std::int64_t> words) {
  if (dst < 0 || dst >= cell_count()) fail("send to invalid cell " + std::to_string(dst));
  const auto me = static_cast<std::size_t>(id_);
  fabric_.stats_.messages_sent[me] += 1;
  fabric_.stats_.bytes_sent[me] += words.size() * sizeof(std::int64_t);
  Message m;
  m.src = id_;
  m.dst = dst;
  m.tag = tag;
  m.words = std::move(words);
  fabric_.engine_->post(std::move(m));
}

Message Cell::recv_any(Tag tag) { return fabric_.engine_->take(id_, tag, std::nullopt); }

Message Cell::recv_from(CellId src, Tag tag) {
  if (src < 0 || src >= cell_count()) fail("receive from invalid cell " + std::to_string(src));
  return fabric_.engine_->take(id_, tag, src);
}

void Cell::record_collective(CollectiveKind kind, int rounds) {
  if (id_ == 0) fabric_.stats_.collectives.push_back(CollectiveRecord{kind, rounds});
}

std::vector<std::int64_t> Cell::broadcast_all_gather(std::int64_t value) {
  const int p = cell_count();
  std::vector<std::int64_t> out(static_cast<std::size_t>(p));
  out[static_cast<std::size_t>(id_)] = value;
  for (int j = 0; j < p; ++j) {
    if (j != id_) send_words(j, Tag::kGather, {value});
  }
  for (int j = 0; j < p; ++j) {
    if (j == id_) continue;
    Message m = recv_from(j, Tag::kGather);
    if (m.words.size() != 1) fail("malformed gather contribution");
    out[static_cast<std::size_t>(j)] = m.words[0];
  }
  record_collective(CollectiveKind::kGather, p > 1 ? 1 : 0);
  return out;
}

namespace {

std::vector<std::int64_t> butterfly_sum(Cell& cell, Tag tag, std::vector<std::int64_t> vec) {
  const int p = cell.cell_count();
  for (int bit = 1; bit < p; bit <<= 1) {
    const CellId partner = cell.id() ^ bit;
    cell.send_words(partner, tag, vec);
    Message m = cell.recv_from(partner, tag);
    if (m.words.size() != vec.size()) {
      cell.fail("vector length mismatch in global sum: " + std::to_string(vec.size()) + " vs " +
                std::to_string(m.words.size()) + " from cell " + std::to_string(partner));
    }
    for (std::size_t i = 0; i < vec.size(); ++i) vec[i] += m.words[i];
  }
  return vec;
}

}  // namespace

std::int64_t Cell::global_int_sum(std::int64_t value) {
  auto out = butterfly_sum(*this, Tag::kSum, {value});
  record_collective(CollectiveKind::kIntSum, log2_exact(static_cast<std::uint64_t>(cell_count())));
  return out[0];
}

std::vector<std::int64_t> Cell::hypercube_vector_sum(std::vector<std::int64_t> vec) {
  auto out = butterfly_sum(*this, Tag::kHypercube, std::move(vec));
  record_collective(CollectiveKind::kVectorSum, log2_exact(static_cast<std::uint64_t>(cell_count())));
  return out;
}

void Cell::big_send(CellId dst, Tag tag, std::span<const Element> payload) {
  const auto& cfg = config();
  std::size_t offset = 0;
  for (std::size_t len : chunk_lengths(payload.size(), cfg.chunk_elements, cfg.receive_tolerance)) {
    auto part = payload.subspan(offset, len);
    send(dst, tag, ElementArray(part.begin(), part.end()));
    offset += len;
  }
}

}  // namespace cellsort
