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

#include <array>
#include <cstdint>
#include <vector>

#include "cellsort/keygen.hpp"

namespace cellsort {

struct VerifyReport {
  std::vector<bool> locally_sorted;
  bool globally_ordered = false;
  bool balanced = false;
  bool multiset_ok = false;
  bool exact_multiset_checked = false;
  std::int64_t max_cell_deviation = 0;

  bool all_sorted() const;
  bool accepted() const { return all_sorted() && globally_ordered && balanced && multiset_ok; }
};

/// Order-independent 128-bit multiset fingerprint (two independent 64-bit
/// mixes summed). Equal multisets always match; unequal ones collide with
/// negligible probability.
std::array<std::uint64_t, 2> multiset_hash(const std::vector<ElementArray>& cells);

/// With `exact`, multiset equality is decided by sorting both sides;
/// otherwise by the hash alone.
VerifyReport verify(const InitialDistribution& initial, const std::vector<ElementArray>& final_cells,
                    std::size_t n_total, int p, bool exact = true);

}  // namespace cellsort
