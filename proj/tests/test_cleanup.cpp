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

#include "cellsort/cleanup.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cellsort;
using cellsort::testing::concat;
using cellsort::testing::on_cells;
using cellsort::testing::sorted_random;

namespace {

std::pair<ElementArray, ElementArray> exact_pair(ElementArray lo, ElementArray hi) {
  auto out = on_cells<ElementArray>(2, [&](Cell& c) {
    ElementArray mine = c.id() == 0 ? lo : hi;
    merge_exchange_exact(c, 1 - c.id(), mine, 2);
    return mine;
  });
  return {out[0], out[1]};
}

std::pair<ElementArray, ElementArray> rebalancing_pair(ElementArray lo, ElementArray hi, std::size_t samples) {
  auto out = on_cells<ElementArray>(2, [&](Cell& c) {
    ElementArray mine = c.id() == 0 ? lo : hi;
    merge_exchange_rebalancing(c, 1 - c.id(), mine, samples);
    return mine;
  });
  return {out[0], out[1]};
}

std::pair<ElementArray, ElementArray> oracle_split(const ElementArray& a, const ElementArray& b) {
  ElementArray all = a;
  all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  const auto keep = static_cast<std::ptrdiff_t>((all.size() + 1) / 2);
  return {ElementArray(all.begin(), all.begin() + keep), ElementArray(all.begin() + keep, all.end())};
}

}  // namespace

TEST_CASE("samples") {
  ElementArray v(2500);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<Element>(i);
  auto s = take_samples(v, 1000);
  CHECK(s.values.size() == 1000);
  CHECK(s.values.size() * s.stride >= v.size());
  CHECK(std::is_sorted(s.values.begin(), s.values.end()));
  auto small = take_samples(ElementArray{1, 2, 3}, 1000);
  CHECK(small.values == ElementArray{1, 2, 3});
  CHECK(take_samples({}, 1000).values.empty());
}

TEST_CASE("overlap measurement") {
  auto disjoint = on_cells<double>(4, [](Cell& c) {
    ElementArray v{Element(c.id() * 10), Element(c.id() * 10 + 1)};
    return overlap_fraction(c, v, 1000);
  });
  CHECK(disjoint == std::vector<double>{0, 0, 0, 0});
  auto constant = on_cells<double>(4, [](Cell& c) { return overlap_fraction(c, ElementArray(8, 5), 1000); });
  CHECK(constant == std::vector<double>{0, 0, 0, 0});
  auto total = on_cells<double>(2, [](Cell& c) {
    return overlap_fraction(c, c.id() == 0 ? ElementArray{100} : ElementArray{1, 2, 3}, 1000);
  });
  CHECK(total == std::vector<double>{0, 1.0});
  auto after_empty = on_cells<double>(4, [](Cell& c) {
    const std::vector<ElementArray> in{{100}, {}, {1}, {200}};
    return overlap_fraction(c, in[c.id()], 1000);
  });
  CHECK(after_empty == std::vector<double>{0, 0, 0, 0});
}

TEST_CASE("selection needs more than two flagged cells") {
  auto pick = [](std::vector<double> overlaps) {
    const int p = static_cast<int>(overlaps.size());
    auto modes = on_cells<CleanupMode>(p, [&](Cell& c) { return select_cleanup(c, overlaps[c.id()], 0.65); });
    for (auto m : modes) CHECK(m == modes[0]);
    return modes[0];
  };
  CHECK(pick({0, 0, 0, 0}) == CleanupMode::kLinear);
  CHECK(pick({0, 0.7, 0.7, 0.7}) == CleanupMode::kBatcher);
  CHECK(pick({0, 0.99, 0.99, 0}) == CleanupMode::kLinear);
  CHECK(pick({0, 0.65, 0.65, 0.65, 0, 0, 0, 0}) == CleanupMode::kBatcher);
}

TEST_CASE("exact merge-exchange examples") {
  CHECK(exact_pair({1, 3, 5}, {2, 4, 6}) == std::pair<ElementArray, ElementArray>{{1, 2, 3}, {4, 5, 6}});
  CHECK(exact_pair({4, 5, 6}, {1, 2, 3}) == std::pair<ElementArray, ElementArray>{{1, 2, 3}, {4, 5, 6}});
  CHECK(exact_pair({}, {}) == std::pair<ElementArray, ElementArray>{{}, {}});
  CHECK(exact_pair({7, 7}, {7, 7}) == std::pair<ElementArray, ElementArray>{{7, 7}, {7, 7}});

  // An ordered pair only negotiates.
  FabricConfig cfg;
  cfg.p = 2;
  cfg.record_trace = true;
  Fabric fabric(cfg);
  fabric.run([](Cell& c) {
    ElementArray v = c.id() == 0 ? ElementArray{1, 2, 3} : ElementArray{4, 5, 6};
    merge_exchange_exact(c, 1 - c.id(), v, 16);
  });
  for (const auto& e : fabric.trace()) CHECK(e.elements == 0);
}

TEST_CASE("exact negotiation takes a logarithmic number of rounds") {
  std::mt19937_64 rng(8);
  for (std::size_t m : {1u, 2u, 7u, 100u, 4096u}) {
    auto lo = sorted_random(rng, m, 1000), hi = sorted_random(rng, m, 1000);
    auto rounds = on_cells<std::pair<std::size_t, int>>(2, [&](Cell& c) {
      int r = 0;
      auto k = negotiate_exact_split(c, 1 - c.id(), c.id() == 0 ? lo : hi, &r);
      return std::pair{k, r};
    });
    CHECK(rounds[0].first == rounds[1].first);
    CHECK(rounds[0].second <= static_cast<int>(std::ceil(std::log2(double(m)))) + 1);
  }
}

TEST_CASE("exact merge-exchange equals sort and split") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = rng() % 3000;
    const Element hi = trial % 2 ? 50 : kMaxElement;
    auto a = sorted_random(rng, m, hi), b = sorted_random(rng, m, hi);
    CHECK(exact_pair(a, b) == oracle_split(a, b));
  }
}

TEST_CASE("rebalancing merge-exchange") {
  CHECK(rebalancing_pair({1, 2, 3, 4}, {5}, 1000) == std::pair<ElementArray, ElementArray>{{1, 2, 3}, {4, 5}});
  CHECK(rebalancing_pair({1, 2}, {3, 4}, 1000) == std::pair<ElementArray, ElementArray>{{1, 2}, {3, 4}});
  CHECK(rebalancing_pair({}, {3, 4, 1}, 1000).first.size() == 2);
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 60; ++trial) {
    const Element hi = trial % 2 ? 100 : kMaxElement;
    auto a = sorted_random(rng, rng() % 5000, hi), b = sorted_random(rng, rng() % 5000, hi);
    const std::size_t samples = trial % 3 == 0 ? 7 : 1000;
    auto got = rebalancing_pair(a, b, samples);
    CHECK(got == oracle_split(a, b));
    CHECK(got.first.size() == (a.size() + b.size() + 1) / 2);
  }
}

TEST_CASE("rebalancing send counts never under-send") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = sorted_random(rng, rng() % 2000, 500), b = sorted_random(rng, rng() % 2000, 500);
    const auto [from_low, from_high] = rebalancing_send_counts(take_samples(a, 50), take_samples(b, 50));
    const std::size_t keep = (a.size() + b.size() + 1) / 2;
    // Elements of a that do not belong to the low result, with ties going to a.
    std::size_t stays = 0, ib = 0;
    for (std::size_t ia = 0; ia < a.size() && stays + ib < keep;) {
      if (ib < b.size() && b[ib] < a[ia]) ++ib;
      else ++ia, ++stays;
    }
    while (stays + ib < keep) ++ib;
    CHECK(from_low >= a.size() - stays);
    CHECK(from_high >= ib);
    CHECK(from_low <= a.size());
    CHECK(from_high <= b.size());
  }
}

TEST_CASE("block merge examples") {
  ElementArray v{1, 3, 5, 2, 4, 6};
  block_merge(v, 3, 2);
  CHECK(v == ElementArray{1, 2, 3, 4, 5, 6});
  ElementArray same{1, 2, 3};
  block_merge(same, 3, 2);
  CHECK(same == ElementArray{1, 2, 3});
  ElementArray uneven{1, 4, 6, 8, 10, 12, 14, 2, 3, 13};
  block_merge(uneven, 7, 4);
  CHECK(std::is_sorted(uneven.begin(), uneven.end()));
  CHECK_THROWS(block_merge(v, 3, 0));
  CHECK_THROWS(block_merge(v, 7, 2));
}

TEST_CASE("block merge equals std::merge within bounded scratch") {
  std::mt19937_64 rng(31);
  for (std::size_t bs : {1u, 2u, 3u, 16u, 1024u}) {
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t n1 = trial == 0 ? 10000 : rng() % (trial % 4 == 0 ? 10000 : 300);
      const std::size_t n2 = trial == 1 ? 10000 : rng() % (trial % 5 == 0 ? 10000 : 300);
      const Element hi = trial % 2 ? 20 : kMaxElement;
      auto a = sorted_random(rng, n1, hi), b = sorted_random(rng, n2, hi);
      ElementArray want(n1 + n2);
      std::merge(a.begin(), a.end(), b.begin(), b.end(), want.begin());
      ElementArray v = a;
      v.insert(v.end(), b.begin(), b.end());
      BlockMergeStats stats;
      block_merge(v, n1, bs, &stats);
      CHECK(v == want);
      CHECK(stats.peak_scratch <= 3 * bs);
    }
  }
}

TEST_CASE("Batcher schedule") {
  const std::vector<ComparatorRound> four{{{0, 1}, {2, 3}}, {{0, 2}, {1, 3}}, {{1, 2}}};
  CHECK(batcher_schedule(4) == four);
  CHECK(batcher_schedule(1).empty());
  CHECK(batcher_schedule(2) == std::vector<ComparatorRound>{{{0, 1}}});
  CHECK_THROWS_AS(batcher_schedule(6), std::invalid_argument);
  for (int p : {8, 16, 64}) {
    for (const auto& round : batcher_schedule(p)) {
      std::vector<int> seen;
      for (auto c : round) {
        CHECK(c.low < c.high);
        seen.push_back(c.low);
        seen.push_back(c.high);
      }
      std::sort(seen.begin(), seen.end());
      CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
    }
  }
}

TEST_CASE("Batcher cleanup sorts every 0/1 placement") {
  for (auto [p, m] : {std::pair{2, 4}, std::pair{4, 3}}) {
    const int bits = p * m;
    for (std::uint32_t mask = 0; mask < (1u << bits); ++mask) {
      std::vector<ElementArray> in(static_cast<std::size_t>(p));
      for (int i = 0; i < p; ++i) {
        for (int j = 0; j < m; ++j) in[i].push_back((mask >> (i * m + j)) & 1);
        std::sort(in[i].begin(), in[i].end());
      }
      auto out = on_cells<ElementArray>(p, [&](Cell& c) {
        ElementArray v = in[c.id()];
        cleanup_batcher(c, v, CleanupOptions{});
        return v;
      });
      auto flat = concat(out);
      REQUIRE(std::is_sorted(flat.begin(), flat.end()));
      REQUIRE(static_cast<int>(std::count(flat.begin(), flat.end(), 1u)) == __builtin_popcount(mask));
    }
  }
}

TEST_CASE("Batcher cleanup on adversarial data") {
  std::mt19937_64 rng(41);
  std::vector<ElementArray> in(16);
  for (int i = 0; i < 16; ++i) in[i] = sorted_random(rng, 500, i < 8 ? 100 : kMaxElement);
  std::reverse(in.begin(), in.end());
  auto out = on_cells<ElementArray>(16, [&](Cell& c) {
    ElementArray v = in[c.id()];
    cleanup_batcher(c, v, CleanupOptions{});
    return v;
  });
  auto flat = concat(out), want = concat(in);
  std::sort(want.begin(), want.end());
  CHECK(flat == want);
  for (const auto& c : out) CHECK(c.size() == 500);
}

namespace {

std::vector<CleanupResult> linear_on(std::vector<ElementArray>& cells, int cap = 0) {
  const int p = static_cast<int>(cells.size());
  CleanupOptions opt;
  opt.iteration_cap = cap;
  std::mutex mu;
  return on_cells<CleanupResult>(p, [&](Cell& c) {
    ElementArray v = cells[c.id()];
    auto r = cleanup_linear(c, v, opt);
    std::lock_guard<std::mutex> lock(mu);
    cells[c.id()] = std::move(v);
    return r;
  });
}

}  // namespace

TEST_CASE("linear cleanup on a sorted machine is one quiet iteration") {
  std::vector<ElementArray> cells;
  for (Element i = 0; i < 8; ++i) cells.push_back({i * 10, i * 10 + 1});
  auto r = linear_on(cells);
  CHECK(r[0].iterations == 1);
  for (const auto& x : r) CHECK(x.merges == 0);
}

TEST_CASE("one element out by a single cell settles in two iterations") {
  std::vector<ElementArray> cells{{1, 2, 3, 4}, {0, 12, 13, 14}, {21, 22, 23, 24}, {31, 32, 33, 34}};
  auto r = linear_on(cells);
  CHECK(r[0].iterations <= 2);
  CHECK(cells[0] == ElementArray{0, 1, 2, 3});
  CHECK(cells[1] == ElementArray{4, 12, 13, 14});
}

TEST_CASE("a displaced element travels one neighbour per exchange") {
  for (int k : {2, 4, 7}) {
    std::vector<ElementArray> cells;
    for (Element i = 0; i < 8; ++i) cells.push_back({i * 10 + 1, i * 10 + 2, i * 10 + 3});
    cells[static_cast<std::size_t>(k)][0] = 0;
    std::sort(cells[static_cast<std::size_t>(k)].begin(), cells[static_cast<std::size_t>(k)].end());
    auto want = concat(cells);
    std::sort(want.begin(), want.end());
    auto r = linear_on(cells);
    CHECK(concat(cells) == want);
    // Each iteration runs two pairings, so the value can cross two boundaries.
    CHECK(r[0].iterations >= (k + 1) / 2);
  }
}

TEST_CASE("linear cleanup faults when it hits the iteration cap") {
  std::vector<ElementArray> cells;
  for (Element i = 0; i < 8; ++i) cells.push_back({(7 - i) * 10, (7 - i) * 10 + 1});
  CHECK_THROWS_AS(linear_on(cells, 1), Fault);
}

TEST_CASE("linear cleanup with unequal counts uses the rebalancing merge") {
  std::mt19937_64 rng(51);
  std::vector<ElementArray> cells;
  for (int i = 0; i < 8; ++i) cells.push_back(sorted_random(rng, 10 + rng() % 300, kMaxElement));
  auto want = concat(cells);
  std::sort(want.begin(), want.end());
  CleanupOptions opt;
  opt.variant = MergeVariant::kRebalancing;
  opt.iteration_cap = 1000;
  std::mutex mu;
  on_cells<int>(8, [&](Cell& c) {
    ElementArray v = cells[c.id()];
    cleanup_linear(c, v, opt);
    std::lock_guard<std::mutex> lock(mu);
    cells[c.id()] = std::move(v);
    return 0;
  });
  CHECK(concat(cells) == want);
}
