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

#include <algorithm>

#include "cellsort/verify.hpp"
#include "doctest.h"

using namespace cellsort;

namespace {

std::vector<ElementArray> oracle(const InitialDistribution& d, int p) {
  ElementArray all;
  for (const auto& c : d.per_cell) all.insert(all.end(), c.begin(), c.end());
  std::sort(all.begin(), all.end());
  std::vector<ElementArray> out;
  const std::size_t each = all.size() / static_cast<std::size_t>(p);
  for (int i = 0; i < p; ++i) out.emplace_back(all.begin() + i * each, all.begin() + (i + 1) * each);
  return out;
}

}  // namespace

TEST_CASE("sort oracle output is accepted for every key") {
  for (int key = 1; key <= 5; ++key) {
    auto d = generate(KeySpec{key, 4096, 8, 2});
    auto r = verify(d, oracle(d, 8), 4096, 8);
    CHECK(r.accepted());
    CHECK(r.exact_multiset_checked);
    CHECK(r.max_cell_deviation == 0);
  }
}

TEST_CASE("injected faults are caught") {
  auto d = generate(KeySpec{1, 4096, 4, 3});
  auto good = oracle(d, 4);

  auto swapped = good;
  std::swap(swapped[0].back(), swapped[3].front());
  std::sort(swapped[0].begin(), swapped[0].end());
  std::sort(swapped[3].begin(), swapped[3].end());
  auto r = verify(d, swapped, 4096, 4);
  CHECK(!r.globally_ordered);
  CHECK(r.multiset_ok);
  CHECK(!r.accepted());

  auto dropped = good;
  dropped[2].pop_back();
  r = verify(d, dropped, 4096, 4);
  CHECK(!r.multiset_ok);
  CHECK(!r.balanced);
  CHECK(r.max_cell_deviation == 1);

  auto unsorted = good;
  std::swap(unsorted[1][0], unsorted[1][1000]);
  r = verify(d, unsorted, 4096, 4);
  CHECK(!r.all_sorted());
  CHECK(!r.locally_sorted[1]);
  CHECK(r.locally_sorted[0]);

  auto changed = good;
  changed[1][5] += 1;
  std::sort(changed[1].begin(), changed[1].end());
  r = verify(d, changed, 4096, 4, false);
  CHECK(!r.multiset_ok);
  CHECK(!r.exact_multiset_checked);
}

TEST_CASE("multiset hash ignores placement") {
  std::vector<ElementArray> a{{1, 2}, {3}}, b{{3, 2, 1}, {}};
  CHECK(multiset_hash(a) == multiset_hash(b));
  std::vector<ElementArray> c{{1, 2}, {4}};
  CHECK(multiset_hash(a) != multiset_hash(c));
}
