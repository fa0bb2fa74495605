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

#include "cellsort/radix.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace cellsort {

int detect_width(std::span<const Element> elements) {
  Element acc = 0;
  for (Element v : elements) acc |= v;
  return std::bit_width(acc);
}

RadixPlan default_plan(int width) {
  if (width < 0 || width > kKeyBits) {
    throw std::invalid_argument("radix width must be in [0, 31], got " + std::to_string(width));
  }
  RadixPlan plan;
  plan.total_bits = width;
  const int low = (width + 1) / 2;
  if (low > 0) plan.passes.push_back(RadixPass{0, low});
  if (width - low > 0) plan.passes.push_back(RadixPass{low, width - low});
  return plan;
}

ElementArray radix_sort(ElementArray elements, const RadixPlan& plan) {
  if (elements.size() < 2 || plan.passes.empty()) return elements;
  ElementArray buffer(elements.size());
  std::vector<std::size_t> offsets;
  for (const RadixPass& pass : plan.passes) {
    const std::size_t radix = std::size_t{1} << pass.width;
    const Element mask = static_cast<Element>(radix - 1);
    offsets.assign(radix + 1, 0);
    for (Element v : elements) ++offsets[((v >> pass.shift) & mask) + 1];
    for (std::size_t d = 1; d <= radix; ++d) offsets[d] += offsets[d - 1];
    for (Element v : elements) buffer[offsets[(v >> pass.shift) & mask]++] = v;
    elements.swap(buffer);
  }
  return elements;
}

void radix_sort_inplace(ElementArray& elements, bool narrow) {
  const int width = narrow ? detect_width(elements) : kKeyBits;
  elements = radix_sort(std::move(elements), default_plan(width));
}

}  // namespace cellsort
