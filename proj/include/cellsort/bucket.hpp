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
#include <span>
#include <vector>

#include "cellsort/fabric.hpp"

namespace cellsort {

inline constexpr std::size_t kDefaultBuckets = 8192;

/// Top log2(b) bits of the 31-bit key range.
std::size_t bucket_index(Element v, std::size_t buckets);

struct BucketTotals {
  std::size_t buckets = 0;
  std::vector<std::int64_t> counts;
  std::vector<std::int64_t> local_cum;   // inclusive prefix of counts
  std::vector<std::int64_t> global_cum;  // machine-wide local_cum, filled by global_totals

  std::int64_t global_count(std::size_t k) const {
    return global_cum[k] - (k == 0 ? 0 : global_cum[k - 1]);
  }
  std::int64_t largest_global_bucket() const;
};

BucketTotals histogram(std::span<const Element> elements, std::size_t buckets);

/// Collective: hypercube-sums the local cumulative totals into global_cum.
void global_totals(Cell& cell, BucketTotals& totals);

/// Stable counting scatter grouping elements by bucket, buckets ascending.
ElementArray partial_sort(std::span<const Element> elements, const BucketTotals& totals);

struct Segment {
  std::size_t offset = 0;
  std::size_t length = 0;

  bool operator==(const Segment&) const = default;
};

/// Which local run goes to which cell. Bucket k belongs to the cell whose
/// target range (d*n/p, (d+1)*n/p] contains global_cum[k]; buckets are
/// never split, so `expected[d]` is exactly what cell d will receive.
struct SendPlan {
  std::vector<Segment> segments;
  std::vector<int> owner;               // per bucket
  std::vector<std::int64_t> expected;   // per destination cell
};

SendPlan make_send_plan(const BucketTotals& totals, int p);

struct DistributeResult {
  ElementArray elements;
  std::size_t sources_heard = 0;
  std::size_t messages_received = 0;
};

/// All-to-all redistribution. Sends go self first, then up through the cell
/// ids modulo P, with a NULL message for an empty segment. Receiving stops
/// once every source has been heard from and the count is within the
/// fabric's receive tolerance of the expected total.
DistributeResult distribute(Cell& cell, std::span<const Element> sorted_by_bucket, const SendPlan& plan);

struct BucketPhaseResult {
  ElementArray elements;
  std::int64_t deviation = 0;        // received - n_total / p
  std::int64_t largest_bucket = 0;   // machine-wide
};

/// histogram -> global totals -> partial sort -> plan -> distribute.
BucketPhaseResult bucket_and_distribute(Cell& cell, std::span<const Element> elements, std::size_t buckets);

}  // namespace cellsort
