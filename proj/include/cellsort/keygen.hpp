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
#include <filesystem>
#include <string_view>
#include <vector>

#include "cellsort/types.hpp"

namespace cellsort {

/// Name and version of the generator recorded in run reports. Bump the
/// version whenever any generated value changes.
inline constexpr std::string_view kGeneratorName = "splitmix64-position";
inline constexpr int kGeneratorVersion = 1;

struct KeySpec {
  int key_id = 1;
  std::size_t n_total = 0;
  int p = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct InitialDistribution {
  std::vector<ElementArray> per_cell;

  std::size_t total() const;
};

/// Per-cell element counts for a key (the "balance" column of the contest
/// table).
std::vector<std::size_t> initial_counts(const KeySpec& spec);

/// Deterministic in `spec`; element values depend only on the seed and the
/// element's global position.
///
///   key 1: uniform values, equal counts
///   key 2: uniform values, counts geometric in the cell id (ratio 0.88)
///   key 3: every value 2^30, equal counts
///   key 4: half uniform, half in 8 windows of width 2^20; counts +-10%
///   key 5: a quarter packed into [0, 2^18), the rest uniform above 2^24
InitialDistribution generate(const KeySpec& spec);

/// Writes `cell<id>.u32` (little-endian uint32) per cell into `dir`.
void dump_raw(const InitialDistribution& dist, const std::filesystem::path& dir);

}  // namespace cellsort
