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

#include <cstdint>
#include <vector>

#include "cellsort/fabric.hpp"

namespace cellsort {

struct DeltaEntry {
  CellId cell;
  std::int64_t delta;

  bool operator==(const DeltaEntry&) const = default;
};

/// Every cell's surplus (positive) or shortfall (negative) against the
/// target size. `entries` is ascending by delta, ties by cell id, so the
/// biggest shortfall comes first and the largest excess last.
struct DeltaTable {
  std::vector<DeltaEntry> entries;
  std::vector<std::int64_t> by_cell;
  std::int64_t local_delta = 0;
  std::int64_t target = 0;
};

/// Pure form used by the collective: deltas from every cell's size.
DeltaTable make_delta_table(const std::vector<std::int64_t>& sizes, std::int64_t n_total, CellId me);

/// Collective. Gathers sizes with broadcast_all_gather.
DeltaTable compute_deltas(Cell& cell, std::size_t current_size, std::int64_t n_total);

/// Destinations of this cell's excess as (cell, count) pairs, in send
/// order. Larger excesses are matched against larger shortfalls first, so
/// this cell only serves what remains once every bigger excess is spent.
std::vector<std::pair<CellId, std::int64_t>> excess_destinations(const DeltaTable& table, CellId me);

/// Moves every element at most once, directly to a cell with a shortfall.
/// Outgoing elements come from the tail of the local array.
ElementArray pre_balance(Cell& cell, ElementArray elements, const DeltaTable& table);

/// Ripple balance: surplus flows through neighbours via array ends, so a
/// locally sorted, globally ordered machine stays that way. With
/// `sorted_mode` the input must be locally sorted.
ElementArray post_balance(Cell& cell, ElementArray elements, const DeltaTable& table, bool sorted_mode);

}  // namespace cellsort
