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

#include "cellsort/verify.hpp"

#include <algorithm>
#include <cstdlib>

namespace cellsort {

namespace {

constexpr std::uint64_t mix(std::uint64_t x, std::uint64_t salt) {
  x ^= salt;
  x = (x ^ (x >> 33)) * 0xff51afd7ed558ccdull;
  x = (x ^ (x >> 33)) * 0xc4ceb9fe1a85ec53ull;
  return x ^ (x >> 33);
}

ElementArray flatten_sorted(const std::vector<ElementArray>& cells) {
  ElementArray all;
  for (const auto& c : cells) all.insert(all.end(), c.begin(), c.end());
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

bool VerifyReport::all_sorted() const {
  return std::all_of(locally_sorted.begin(), locally_sorted.end(), [](bool b) { return b; });
}

std::array<std::uint64_t, 2> multiset_hash(const std::vector<ElementArray>& cells) {
  std::array<std::uint64_t, 2> h{0, 0};
  for (const auto& c : cells) {
    for (Element v : c) {
      h[0] += mix(v, 0x243f6a8885a308d3ull);
      h[1] += mix(v, 0x13198a2e03707344ull);
    }
  }
  return h;
}

VerifyReport verify(const InitialDistribution& initial, const std::vector<ElementArray>& final_cells,
                    std::size_t n_total, int p, bool exact) {
  VerifyReport r;
  for (const auto& c : final_cells) r.locally_sorted.push_back(std::is_sorted(c.begin(), c.end()));

  const auto target = static_cast<std::int64_t>(n_total / static_cast<std::size_t>(p));
  r.balanced = final_cells.size() == static_cast<std::size_t>(p) && n_total % static_cast<std::size_t>(p) == 0;
  for (const auto& c : final_cells) {
    const std::int64_t dev = static_cast<std::int64_t>(c.size()) - target;
    r.max_cell_deviation = std::max(r.max_cell_deviation, dev < 0 ? -dev : dev);
    if (dev != 0) r.balanced = false;
  }

  r.globally_ordered = true;
  const ElementArray* prev = nullptr;
  for (const auto& c : final_cells) {
    if (c.empty()) continue;
    if (prev && prev->back() > c.front()) r.globally_ordered = false;
    prev = &c;
  }

  r.multiset_ok = multiset_hash(initial.per_cell) == multiset_hash(final_cells);
  if (exact) {
    r.exact_multiset_checked = true;
    r.multiset_ok = r.multiset_ok && flatten_sorted(initial.per_cell) == flatten_sorted(final_cells);
  }
  return r;
}

}  // namespace cellsort
