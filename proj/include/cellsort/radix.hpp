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

#include <span>
#include <vector>

#include "cellsort/types.hpp"

namespace cellsort {

struct RadixPass {
  int shift;
  int width;

  bool operator==(const RadixPass&) const = default;
};

/// Counting-sort passes, low bits first.
struct RadixPlan {
  std::vector<RadixPass> passes;
  int total_bits = kKeyBits;
};

/// Bit width of the largest element (0 for an empty or all-zero input).
int detect_width(std::span<const Element> elements);

/// Two passes splitting `width` bits as ceil/floor halves; zero-width passes
/// are dropped.
RadixPlan default_plan(int width);

/// LSD radix sort; every pass is a stable counting sort on its bit field.
ElementArray radix_sort(ElementArray elements, const RadixPlan& plan);

/// In-place convenience: detects the width when `narrow` is set, otherwise
/// sorts on all 31 bits.
void radix_sort_inplace(ElementArray& elements, bool narrow);

}  // namespace cellsort
