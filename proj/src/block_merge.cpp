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

#include "cellsort/block_merge.hpp"

#include <algorithm>
#include <functional>
#include <iterator>
#include <stdexcept>
#include <vector>

namespace cellsort {

namespace {

struct Scratch {
  std::vector<Element> small;    // the whole short run
  std::vector<Element> staging;  // current block of the long run
  std::vector<Element> target;
};

// [first, mid) has at most block_size elements. Every output block lands
// in a region already emptied into staging, because the short run is staged
// whole and the long run is staged ahead of the write cursor.
template <typename It, typename Less>
void staged_merge(It first, It mid, It last, std::size_t block_size, Less less, Scratch& s) {
  const auto n1 = static_cast<std::size_t>(std::distance(first, mid));
  s.small.assign(first, mid);
  s.staging.clear();
  s.target.clear();

  std::size_t i1 = 0;
  std::size_t i2 = 0;
  It next2 = mid;
  It out = first;

  auto refill = [&] {
    const auto left = static_cast<std::size_t>(std::distance(next2, last));
    const std::size_t take = std::min(block_size, left);
    s.staging.assign(next2, next2 + static_cast<std::ptrdiff_t>(take));
    next2 += static_cast<std::ptrdiff_t>(take);
    i2 = 0;
  };
  auto flush = [&] {
    out = std::copy(s.target.begin(), s.target.end(), out);
    s.target.clear();
  };

  refill();
  while (i1 < n1) {
    if (i2 == s.staging.size()) {
      if (next2 == last) break;
      refill();
    }
    if (less(s.staging[i2], s.small[i1])) {
      s.target.push_back(s.staging[i2++]);
    } else {
      s.target.push_back(s.small[i1++]);
    }
    if (s.target.size() == block_size) flush();
  }
  flush();
  if (i1 < n1) {
    std::copy(s.small.begin() + static_cast<std::ptrdiff_t>(i1), s.small.end(), out);
    return;
  }
  // The short run is exhausted: the rest of the staged block goes directly
  // in front of the unstaged tail, which is already in its final place.
  std::copy(s.staging.begin() + static_cast<std::ptrdiff_t>(i2), s.staging.end(), out);
}

void merge_rec(Element* data, std::size_t n, std::size_t mid, std::size_t block_size, Scratch& s,
               BlockMergeStats& stats) {
  const std::size_t n1 = mid;
  const std::size_t n2 = n - mid;
  if (n1 == 0 || n2 == 0 || data[mid - 1] <= data[mid]) return;

  if (n1 <= block_size) {
    staged_merge(data, data + mid, data + n, block_size, std::less<Element>{}, s);
    stats.peak_scratch = std::max(stats.peak_scratch, n1 + 2 * block_size);
    ++stats.staged_merges;
    return;
  }
  if (n2 <= block_size) {
    using Rev = std::reverse_iterator<Element*>;
    staged_merge(Rev(data + n), Rev(data + mid), Rev(data), block_size, std::greater<Element>{}, s);
    stats.peak_scratch = std::max(stats.peak_scratch, n2 + 2 * block_size);
    ++stats.staged_merges;
    return;
  }

  std::size_t cut1;
  std::size_t cut2;
  if (n1 >= n2) {
    cut1 = n1 / 2;
    cut2 = static_cast<std::size_t>(std::lower_bound(data + mid, data + n, data[cut1]) - data);
  } else {
    cut2 = mid + n2 / 2;
    cut1 = static_cast<std::size_t>(std::upper_bound(data, data + mid, data[cut2]) - data);
  }
  std::rotate(data + cut1, data + mid, data + cut2);
  ++stats.rotations;
  const std::size_t new_mid = cut1 + (cut2 - mid);
  merge_rec(data, new_mid, cut1, block_size, s, stats);
  merge_rec(data + new_mid, n - new_mid, mid - cut1, block_size, s, stats);
}

}  // namespace

void block_merge(std::span<Element> data, std::size_t mid, std::size_t block_size, BlockMergeStats* stats) {
  if (block_size == 0) throw std::invalid_argument("block_size must be at least 1");
  if (mid > data.size()) throw std::invalid_argument("run boundary beyond array end");
  Scratch s;
  s.small.reserve(block_size);
  s.staging.reserve(block_size);
  s.target.reserve(block_size);
  BlockMergeStats local;
  merge_rec(data.data(), data.size(), mid, block_size, s, local);
  if (stats) *stats = local;
}

}  // namespace cellsort
