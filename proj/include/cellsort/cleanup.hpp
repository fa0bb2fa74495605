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
#include <span>
#include <utility>
#include <vector>

#include "cellsort/block_merge.hpp"
#include "cellsort/fabric.hpp"

namespace cellsort {

inline constexpr std::size_t kDefaultSamplePoints = 1000;
inline constexpr double kDefaultOverlapThreshold = 0.65;

struct SampleVector {
  std::vector<Element> values;     // ascending
  std::vector<std::size_t> positions;
  std::size_t stride = 0;
  std::size_t source_length = 0;
};

/// min(length, points) evenly spaced samples of a sorted array.
SampleVector take_samples(std::span<const Element> sorted, std::size_t points);

struct Comparator {
  CellId low;
  CellId high;

  bool operator==(const Comparator&) const = default;
};

using ComparatorRound = std::vector<Comparator>;

/// Batcher's odd-even merge sort network over cell indices; comparators
/// within a round are disjoint.
std::vector<ComparatorRound> batcher_schedule(int p);

enum class CleanupMode { kLinear, kBatcher };
enum class MergeVariant { kExact, kRebalancing };

const char* to_string(CleanupMode m);

struct CleanupOptions {
  std::size_t sample_points = kDefaultSamplePoints;
  double overlap_threshold = kDefaultOverlapThreshold;
  std::size_t block_size = kDefaultBlockSize;
  int iteration_cap = 0;  // 0 means 4 * P
  MergeVariant variant = MergeVariant::kExact;
};

/// Collective. Fraction of this cell's samples strictly below the left
/// neighbour's maximum; cell 0 reports 0.
double overlap_fraction(Cell& cell, std::span<const Element> sorted, std::size_t sample_points);

/// Collective. Batcher when more than two cells report overlap at or above
/// the threshold.
CleanupMode select_cleanup(Cell& cell, double overlap, double threshold);

/// Split index for an exact merge-exchange: the number of boundary elements
/// the pair must swap, found by a distributed binary search exchanging one
/// boundary value per round. `rounds` receives the number of probes.
std::size_t negotiate_exact_split(Cell& cell, CellId partner, std::span<const Element> sorted, int* rounds = nullptr);

/// Equal-length pair; the low cell keeps the smallest half, both stay sorted.
void merge_exchange_exact(Cell& cell, CellId partner, ElementArray& elements, std::size_t block_size);

/// Conservative sample-based send counts for the rebalancing variant:
/// (elements the low cell sends, elements the high cell sends).
std::pair<std::size_t, std::size_t> rebalancing_send_counts(const SampleVector& low, const SampleVector& high);

/// Any lengths; afterwards the low cell holds ceil(total/2) smallest and the
/// high cell floor(total/2) largest elements.
void merge_exchange_rebalancing(Cell& cell, CellId partner, ElementArray& elements, std::size_t sample_points);

struct CleanupResult {
  CleanupMode mode = CleanupMode::kLinear;
  int iterations = 0;
  std::size_t merges = 0;
};

CleanupResult cleanup_linear(Cell& cell, ElementArray& elements, const CleanupOptions& options);
CleanupResult cleanup_batcher(Cell& cell, ElementArray& elements, const CleanupOptions& options);

}  // namespace cellsort
