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
#include <random>

#include "cellsort/bucket.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cellsort;
using cellsort::testing::concat;
using cellsort::testing::on_cells;

TEST_CASE("bucket index uses the high bits") {
  CHECK(bucket_index(0, 4096) == 0);
  CHECK(bucket_index(kMaxElement, 4096) == 4095);
  CHECK(bucket_index(Element{1} << 30, 4096) == 2048);
  CHECK_THROWS_AS(bucket_index(0, 3000), std::invalid_argument);
  CHECK_THROWS_AS(bucket_index(Element{1} << 31, 4096), std::out_of_range);
}

TEST_CASE("histogram") {
  auto empty = histogram({}, 16);
  CHECK(std::all_of(empty.counts.begin(), empty.counts.end(), [](auto c) { return c == 0; }));
  ElementArray constant(100, Element{1} << 30);
  auto h = histogram(constant, 4096);
  CHECK(h.counts[2048] == 100);
  CHECK(h.local_cum.back() == 100);
  CHECK(h.local_cum[2047] == 0);
}

TEST_CASE("global totals and partial sort") {
  auto sums = on_cells<std::vector<std::int64_t>>(2, [](Cell& c) {
    BucketTotals t;
    t.local_cum = c.id() == 0 ? std::vector<std::int64_t>{1, 3} : std::vector<std::int64_t>{2, 5};
    global_totals(c, t);
    return t.global_cum;
  });
  CHECK(sums[0] == std::vector<std::int64_t>{3, 8});
  CHECK(sums[1] == std::vector<std::int64_t>{3, 8});

  std::mt19937_64 rng(3);
  ElementArray v(5000);
  for (auto& x : v) x = static_cast<Element>(rng() & kMaxElement);
  auto t = histogram(v, 256);
  auto grouped = partial_sort(v, t);
  for (std::size_t i = 1; i < grouped.size(); ++i) {
    CHECK(bucket_index(grouped[i - 1], 256) <= bucket_index(grouped[i], 256));
  }
  std::sort(v.begin(), v.end());
  std::sort(grouped.begin(), grouped.end());
  CHECK(v == grouped);
}

TEST_CASE("send plan assigns whole buckets by their endpoint") {
  BucketTotals t;
  t.buckets = 4;
  t.counts = {1, 2, 3, 4};
  t.local_cum = {1, 3, 6, 10};
  t.global_cum = {5, 10, 15, 20};
  auto plan = make_send_plan(t, 2);
  CHECK(plan.owner == std::vector<int>{0, 0, 1, 1});
  CHECK(plan.expected == std::vector<std::int64_t>{10, 10});
  CHECK(plan.segments == std::vector<Segment>{{0, 3}, {3, 7}});

  t.global_cum = {0, 20, 20, 20};
  plan = make_send_plan(t, 4);
  CHECK(plan.expected == std::vector<std::int64_t>{0, 0, 0, 20});
  std::size_t covered = 0;
  for (const auto& s : plan.segments) covered += s.length;
  CHECK(covered == 10);
}

namespace {

void check_distribution(int p, const std::vector<ElementArray>& input, std::size_t buckets, Scheduler sched) {
  auto out = on_cells<BucketPhaseResult>(
      p, [&](Cell& c) { return bucket_and_distribute(c, input[c.id()], buckets); }, sched);
  auto all = concat(input);
  std::sort(all.begin(), all.end());
  std::vector<ElementArray> got;
  for (const auto& r : out) got.push_back(r.elements);
  auto flat = concat(got);
  std::sort(flat.begin(), flat.end());
  CHECK(flat == all);
  // Cross-cell bucket order.
  std::size_t prev_max = 0;
  bool have = false;
  for (const auto& c : got) {
    if (c.empty()) continue;
    std::size_t lo = buckets, hi = 0;
    for (Element v : c) {
      lo = std::min(lo, bucket_index(v, buckets));
      hi = std::max(hi, bucket_index(v, buckets));
    }
    if (have) CHECK(prev_max < lo);
    prev_max = hi;
    have = true;
  }
  for (const auto& r : out) CHECK(std::abs(r.deviation) <= std::max<std::int64_t>(r.largest_bucket, 0));
}

}  // namespace

TEST_CASE("distribute preserves the multiset and bucket order") {
  std::mt19937_64 rng(77);
  for (int p : {1, 2, 16}) {
    std::vector<ElementArray> input(static_cast<std::size_t>(p));
    for (auto& c : input) {
      c.resize(rng() % 3000);
      for (auto& x : c) x = static_cast<Element>(rng() & kMaxElement);
    }
    check_distribution(p, input, 1024, Scheduler::kDeterministic);
    check_distribution(p, input, 1024, Scheduler::kConcurrent);
  }
}

TEST_CASE("two cells with disjoint ranges end up split low and high") {
  std::vector<ElementArray> input{{kMaxElement, 5, kMaxElement - 1, 6}, {7, kMaxElement - 2, 8, kMaxElement - 3}};
  auto out = on_cells<BucketPhaseResult>(2, [&](Cell& c) { return bucket_and_distribute(c, input[c.id()], 64); });
  auto lo = out[0].elements, hi = out[1].elements;
  std::sort(lo.begin(), lo.end());
  std::sort(hi.begin(), hi.end());
  CHECK(lo == ElementArray{5, 6, 7, 8});
  CHECK(hi == ElementArray{kMaxElement - 3, kMaxElement - 2, kMaxElement - 1, kMaxElement});
}

TEST_CASE("distribution over many chunks with a shuffled delivery order") {
  std::mt19937_64 rng(99);
  std::vector<ElementArray> input(4);
  for (auto& c : input) {
    c.resize(20000);
    for (auto& x : c) x = static_cast<Element>(rng() & kMaxElement);
  }
  FabricConfig cfg;
  cfg.p = 4;
  cfg.chunk_elements = 700;
  cfg.receive_tolerance = 64;
  cfg.delivery_shuffle_seed = 5;
  Fabric fabric(cfg);
  std::vector<ElementArray> got(4);
  fabric.run([&](Cell& c) { got[c.id()] = bucket_and_distribute(c, input[c.id()], 8192).elements; });
  auto all = concat(input), flat = concat(got);
  std::sort(all.begin(), all.end());
  std::sort(flat.begin(), flat.end());
  CHECK(flat == all);
}
