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

#include "cellsort/types.hpp"

namespace cellsort {

inline constexpr std::size_t kDefaultBlockSize = 1024;

struct BlockMergeStats {
  std::size_t peak_scratch = 0;  // elements
  std::size_t staged_merges = 0;
  std::size_t rotations = 0;
};

/// Merges the sorted runs data[0, mid) and data[mid, n) in place using at
/// most 3 * block_size elements of scratch: two staging blocks and one
/// target block. Runs too long to stage are first split around a
/// binary-searched cut and rotated until one side of every piece fits.
void block_merge(std::span<Element> data, std::size_t mid, std::size_t block_size,
                 BlockMergeStats* stats = nullptr);

}  // namespace cellsort
