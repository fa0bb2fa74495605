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

#include "cellsort/bucket.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace cellsort {

namespace {

int bucket_shift(std::size_t buckets) {
  if (!is_power_of_two(buckets) || buckets > (std::size_t{1} << kKeyBits)) {
    throw std::invalid_argument("bucket count must be a power of two <= 2^31, got " + std::to_string(buckets));
  }
  return kKeyBits - log2_exact(buckets);
}

}  // namespace

std::size_t bucket_index(Element v, std::size_t buckets) {
  const int shift = bucket_shift(buckets);
  if (v > kMaxElement) throw std::out_of_range("key " + std::to_string(v) + " exceeds 2^31 - 1");
  return static_cast<std::size_t>(v >> shift);
}

std::int64_t BucketTotals::largest_global_bucket() const {
  std::int64_t best = 0;
  for (std::size_t k = 0; k < global_cum.size(); ++k) best = std::max(best, global_count(k));
  return best;
}

BucketTotals histogram(std::span<const Element> elements, std::size_t buckets) {
  const int shift = bucket_shift(buckets);
  BucketTotals t;
  t.buckets = buckets;
  t.counts.assign(buckets, 0);
  for (Element v : elements) {
    if (v > kMaxElement) throw std::out_of_range("key " + std::to_string(v) + " exceeds 2^31 - 1");
    ++t.counts[v >> shift];
  }
  t.local_cum.resize(buckets);
  std::int64_t run = 0;
  for (std::size_t k = 0; k < buckets; ++k) {
    run += t.counts[k];
    t.local_cum[k] = run;
  }
  return t;
}

void global_totals(Cell& cell, BucketTotals& totals) {
  totals.global_cum = cell.hypercube_vector_sum(totals.local_cum);
}

ElementArray partial_sort(std::span<const Element> elements, const BucketTotals& totals) {
  const int shift = bucket_shift(totals.buckets);
  std::vector<std::size_t> next(totals.buckets);
  for (std::size_t k = 0; k < totals.buckets; ++k) {
    next[k] = static_cast<std::size_t>(totals.local_cum[k] - totals.counts[k]);
  }
  ElementArray out(elements.size());
  for (Element v : elements) out[next[v >> shift]++] = v;
  return out;
}

SendPlan make_send_plan(const BucketTotals& totals, int p) {
  const std::size_t b = totals.buckets;
  const std::int64_t n = b == 0 ? 0 : totals.global_cum[b - 1];
  SendPlan plan;
  plan.owner.resize(b);
  plan.segments.assign(static_cast<std::size_t>(p), Segment{});
  plan.expected.assign(static_cast<std::size_t>(p), 0);

  for (std::size_t k = 0; k < b; ++k) {
    const std::int64_t end = totals.global_cum[k];
    // ceil(end * p / n) - 1, i.e. the cell whose range (d n/p, (d+1) n/p] holds end.
    const std::int64_t d = (end == 0 || n == 0) ? 0 : (end * p - 1) / n;
    plan.owner[k] = static_cast<int>(d);
    plan.expected[static_cast<std::size_t>(d)] += totals.global_count(k);
  }

  // Owners are non-decreasing in k, so each destination's buckets form one
  // contiguous local run.
  std::size_t offset = 0;
  for (std::size_t k = 0; k < b; ++k) {
    auto& seg = plan.segments[static_cast<std::size_t>(plan.owner[k])];
    if (seg.length == 0) seg.offset = offset;
    const auto c = static_cast<std::size_t>(totals.counts[k]);
    seg.length += c;
    offset += c;
  }
  std::size_t running = 0;
  for (auto& seg : plan.segments) {
    if (seg.length == 0) seg.offset = running;
    running = seg.offset + seg.length;
  }
  return plan;
}

DistributeResult distribute(Cell& cell, std::span<const Element> sorted_by_bucket, const SendPlan& plan) {
  const int p = cell.cell_count();
  const CellId me = cell.id();
  for (int step = 0; step < p; ++step) {
    const CellId dst = (me + step) % p;
    const Segment& seg = plan.segments[static_cast<std::size_t>(dst)];
    cell.big_send(dst, Tag::kBucket, sorted_by_bucket.subspan(seg.offset, seg.length));
  }

  const std::int64_t expected = plan.expected[static_cast<std::size_t>(me)];
  const auto tolerance = static_cast<std::int64_t>(cell.config().receive_tolerance);
  std::vector<char> heard(static_cast<std::size_t>(p), 0);
  DistributeResult r;
  r.elements.reserve(static_cast<std::size_t>(expected));
  for (;;) {
    const auto got = static_cast<std::int64_t>(r.elements.size());
    if (r.sources_heard == static_cast<std::size_t>(p) && (got > expected ? got - expected : expected - got) <= tolerance) break;
    Message m = cell.recv_any(Tag::kBucket);
    ++r.messages_received;
    auto& h = heard[static_cast<std::size_t>(m.src)];
    if (!h) {
      h = 1;
      ++r.sources_heard;
    }
    r.elements.insert(r.elements.end(), m.elements.begin(), m.elements.end());
  }
  if (static_cast<std::int64_t>(r.elements.size()) != expected) {
    cell.fail("distribution stopped at " + std::to_string(r.elements.size()) + " elements, plan says " +
              std::to_string(expected));
  }
  return r;
}

BucketPhaseResult bucket_and_distribute(Cell& cell, std::span<const Element> elements, std::size_t buckets) {
  BucketTotals totals = histogram(elements, buckets);
  global_totals(cell, totals);
  const ElementArray grouped = partial_sort(elements, totals);
  const SendPlan plan = make_send_plan(totals, cell.cell_count());
  DistributeResult d = distribute(cell, grouped, plan);

  BucketPhaseResult out;
  const std::int64_t n = totals.global_cum.empty() ? 0 : totals.global_cum.back();
  out.deviation = static_cast<std::int64_t>(d.elements.size()) - n / cell.cell_count();
  out.largest_bucket = totals.largest_global_bucket();
  out.elements = std::move(d.elements);
  return out;
}

}  // namespace cellsort
