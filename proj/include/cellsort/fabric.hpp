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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cellsort/types.hpp"

namespace cellsort {

/// Message stream discriminator. Each phase owns its tags so interleaved
/// phases cannot cross-deliver.
enum class Tag : std::uint8_t {
  kUser0,
  kUser1,
  kUser2,
  kBalance,
  kBucket,
  kPostBalance,
  kSelect,
  kBoundary,
  kMerge,
  kGather,
  kSum,
  kHypercube,
};
inline constexpr std::size_t kTagCount = 12;

enum class Scheduler { kDeterministic, kConcurrent };

const char* to_string(Scheduler s);

struct FabricConfig {
  int p = 2;
  std::size_t chunk_elements = 64000;
  std::size_t receive_tolerance = 128;
  Scheduler scheduler = Scheduler::kDeterministic;
  /// When set, the deterministic scheduler's recv_any picks among pending
  /// senders with a PRNG seeded from this value instead of arrival order.
  std::optional<std::uint64_t> delivery_shuffle_seed;
  bool record_trace = false;

  void validate() const;
};

struct Message {
  CellId src = 0;
  CellId dst = 0;
  Tag tag = Tag::kUser0;
  ElementArray elements;
  std::vector<std::int64_t> words;

  bool is_null() const { return elements.empty() && words.empty(); }
};

enum class CollectiveKind { kGather, kIntSum, kVectorSum };

struct CollectiveRecord {
  CollectiveKind kind;
  int rounds;
};

/// Counters are per sending cell. Collective records are appended by cell 0
/// once per collective invocation.
struct CommStats {
  std::vector<std::uint64_t> messages_sent;
  std::vector<std::uint64_t> bytes_sent;
  std::vector<CollectiveRecord> collectives;

  std::uint64_t total_messages() const;
  std::uint64_t total_bytes() const;
  std::uint64_t total_collective_rounds() const;
};

struct TraceEvent {
  std::uint64_t seq;
  CellId src;
  CellId dst;
  Tag tag;
  std::size_t elements;
  std::size_t words;
  std::uint64_t digest;

  bool operator==(const TraceEvent&) const = default;
};

/// Lengths of the component messages big_send emits for a payload of `n`
/// elements. The last chunk of a multi-chunk send is always longer than
/// `tolerance`; a short natural tail is folded into the previous chunk.
std::vector<std::size_t> chunk_lengths(std::size_t n, std::size_t chunk, std::size_t tolerance);

namespace detail {
class Engine;
}

class Cell;

/// Simulated P-cell distributed-memory machine. `run` executes one program
/// per cell and returns once every cell has finished; a fault raised on any
/// cell aborts the others and is rethrown.
class Fabric {
 public:
  explicit Fabric(FabricConfig config);
  ~Fabric();

  Fabric(const Fabric&) = delete;
  Fabric& operator=(const Fabric&) = delete;

  void run(const std::function<void(Cell&)>& program);

  int size() const { return config_.p; }
  const FabricConfig& config() const { return config_; }
  const CommStats& stats() const { return stats_; }
  const std::vector<TraceEvent>& trace() const { return trace_; }

 private:
  friend class Cell;
  friend class detail::Engine;

  FabricConfig config_;
  CommStats stats_;
  std::vector<TraceEvent> trace_;
  std::unique_ptr<detail::Engine> engine_;
};

/// A cell's view of the machine. Only valid inside Fabric::run.
class Cell {
 public:
  CellId id() const { return id_; }
  int cell_count() const;
  const FabricConfig& config() const;

  void send(CellId dst, Tag tag, ElementArray payload);
  void send_words(CellId dst, Tag tag, std::vector<std::int64_t> words);

  /// Any pending message for `tag`, from any sender.
  Message recv_any(Tag tag);
  /// Next message on the (src, me, tag) stream.
  Message recv_from(CellId src, Tag tag);

  std::vector<std::int64_t> broadcast_all_gather(std::int64_t value);
  std::int64_t global_int_sum(std::int64_t value);
  /// Elementwise sum over all cells in log2(P) pairwise exchange rounds.
  std::vector<std::int64_t> hypercube_vector_sum(std::vector<std::int64_t> vec);

  void big_send(CellId dst, Tag tag, std::span<const Element> payload);

  [[noreturn]] void fail(const std::string& what) const;

 private:
  friend class detail::Engine;
  Cell(Fabric& fabric, CellId id) : fabric_(fabric), id_(id) {}

  void record_collective(CollectiveKind kind, int rounds);

  Fabric& fabric_;
  CellId id_;
};

}  // namespace cellsort
