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

#include "cellsort/cleanup.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace cellsort {

const char* to_string(CleanupMode m) { return m == CleanupMode::kLinear ? "linear" : "batcher"; }

SampleVector take_samples(std::span<const Element> sorted, std::size_t points) {
  SampleVector s;
  s.source_length = sorted.size();
  const std::size_t count = std::min(sorted.size(), points);
  if (count == 0) return s;
  s.stride = (sorted.size() + count - 1) / count;
  s.values.reserve(count);
  s.positions.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t pos = i * sorted.size() / count;
    s.positions.push_back(pos);
    s.values.push_back(sorted[pos]);
  }
  return s;
}

std::vector<ComparatorRound> batcher_schedule(int p) {
  if (p < 1 || !is_power_of_two(static_cast<std::uint64_t>(p))) {
    throw std::invalid_argument("Batcher schedule needs a power-of-two cell count, got " + std::to_string(p));
  }
  std::vector<ComparatorRound> rounds;
  for (int span = 1; span < p; span <<= 1) {
    for (int k = span; k >= 1; k >>= 1) {
      ComparatorRound round;
      for (int j = k % span; j + k < p; j += 2 * k) {
        for (int i = 0; i < k && i + j + k < p; ++i) {
          if ((i + j) / (2 * span) == (i + j + k) / (2 * span)) round.push_back(Comparator{i + j, i + j + k});
        }
      }
      if (!round.empty()) rounds.push_back(std::move(round));
    }
  }
  return rounds;
}

double overlap_fraction(Cell& cell, std::span<const Element> sorted, std::size_t sample_points) {
  const CellId me = cell.id();
  if (!std::is_sorted(sorted.begin(), sorted.end())) cell.fail("overlap measurement needs a sorted array");
  if (me + 1 < cell.cell_count()) {
    std::vector<std::int64_t> max;
    if (!sorted.empty()) max.push_back(sorted.back());
    cell.send_words(me + 1, Tag::kSelect, std::move(max));
  }
  if (me == 0) return 0.0;
  const Message left = cell.recv_from(me - 1, Tag::kSelect);
  if (left.words.empty() || sorted.empty()) return 0.0;
  const auto left_max = left.words[0];
  const SampleVector s = take_samples(sorted, sample_points);
  const auto below = std::count_if(s.values.begin(), s.values.end(),
                                   [left_max](Element v) { return static_cast<std::int64_t>(v) < left_max; });
  return static_cast<double>(below) / static_cast<double>(s.values.size());
}

CleanupMode select_cleanup(Cell& cell, double overlap, double threshold) {
  const std::int64_t flagged = cell.global_int_sum(overlap >= threshold ? 1 : 0);
  return flagged > 2 ? CleanupMode::kBatcher : CleanupMode::kLinear;
}

namespace {

std::int64_t exchange_word(Cell& cell, CellId partner, std::int64_t mine) {
  cell.send_words(partner, Tag::kMerge, {mine});
  const Message m = cell.recv_from(partner, Tag::kMerge);
  if (m.words.size() != 1) cell.fail("malformed merge-exchange negotiation message");
  return m.words[0];
}

ElementArray receive_elements(Cell& cell, CellId partner, std::size_t count) {
  ElementArray out;
  out.reserve(count);
  // big_send emits a null message for an empty payload, so always take one.
  do {
    Message m = cell.recv_from(partner, Tag::kMerge);
    if (out.size() + m.elements.size() > count) cell.fail("merge-exchange over-delivery");
    out.insert(out.end(), m.elements.begin(), m.elements.end());
  } while (out.size() < count);
  return out;
}

}  // namespace

std::size_t negotiate_exact_split(Cell& cell, CellId partner, std::span<const Element> sorted, int* rounds) {
  const bool low = cell.id() < partner;
  const std::size_t m = sorted.size();
  std::size_t lo = 0;
  std::size_t hi = m;
  int probes = 0;
  // Smallest k with low[m-k-1] <= high[k]; the predicate is monotone in k.
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const auto mine = static_cast<std::int64_t>(low ? sorted[m - mid - 1] : sorted[mid]);
    const std::int64_t theirs = exchange_word(cell, partner, mine);
    ++probes;
    const bool ordered = low ? mine <= theirs : theirs <= mine;
    if (ordered) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  if (rounds) *rounds = probes;
  return lo;
}

void merge_exchange_exact(Cell& cell, CellId partner, ElementArray& elements, std::size_t block_size) {
  const std::int64_t partner_len = exchange_word(cell, partner, static_cast<std::int64_t>(elements.size()));
  if (partner_len != static_cast<std::int64_t>(elements.size())) {
    cell.fail("exact merge-exchange needs equal lengths: " + std::to_string(elements.size()) + " vs " +
              std::to_string(partner_len) + " on cell " + std::to_string(partner));
  }
  const std::size_t k = negotiate_exact_split(cell, partner, elements);
  if (k == 0) return;
  const std::size_t m = elements.size();
  const bool low = cell.id() < partner;
  const std::size_t at = low ? m - k : 0;
  cell.big_send(partner, Tag::kMerge, std::span<const Element>(elements.data() + at, k));
  const ElementArray got = receive_elements(cell, partner, k);
  std::copy(got.begin(), got.end(), elements.begin() + static_cast<std::ptrdiff_t>(at));
  block_merge(elements, low ? m - k : k, block_size);
}

std::pair<std::size_t, std::size_t> rebalancing_send_counts(const SampleVector& low, const SampleVector& high) {
  const std::size_t n_low = low.source_length;
  const std::size_t n_high = high.source_length;
  const std::size_t keep_low = (n_low + n_high + 1) / 2;

  // Certified lower bound on how many low-cell elements stay low: A[pos] is
  // inside the smallest keep_low when pos + #(high < A[pos]) < keep_low, and
  // that count is bounded by the first high sample not below A[pos].
  std::size_t stays = keep_low > n_high ? keep_low - n_high : 0;
  std::size_t q = 0;
  for (std::size_t i = 0; i < low.values.size(); ++i) {
    const Element v = low.values[i];
    while (q < high.values.size() && high.values[q] < v) ++q;
    const std::size_t bound = q < high.values.size() ? high.positions[q] : n_high;
    if (low.positions[i] + 1 + bound > keep_low) break;
    stays = std::max(stays, low.positions[i] + 1);
  }
  const std::size_t low_sends = n_low - stays;
  const std::size_t high_sends = std::min(n_high, keep_low - stays);
  return {low_sends, high_sends};
}

void merge_exchange_rebalancing(Cell& cell, CellId partner, ElementArray& elements, std::size_t sample_points) {
  const bool low = cell.id() < partner;
  const SampleVector mine = take_samples(elements, sample_points);

  std::vector<std::int64_t> packed{static_cast<std::int64_t>(elements.size())};
  packed.insert(packed.end(), mine.values.begin(), mine.values.end());
  cell.send_words(partner, Tag::kMerge, std::move(packed));
  const Message reply = cell.recv_from(partner, Tag::kMerge);
  if (reply.words.empty()) cell.fail("malformed merge-exchange sample");

  // Positions follow from the length, so only values travel.
  const auto their_len = static_cast<std::size_t>(reply.words[0]);
  const std::size_t count = std::min(their_len, sample_points);
  if (reply.words.size() != count + 1) cell.fail("merge-exchange sample has the wrong size");
  SampleVector theirs;
  theirs.source_length = their_len;
  theirs.stride = count == 0 ? 0 : (their_len + count - 1) / count;
  for (std::size_t i = 0; i < count; ++i) {
    theirs.positions.push_back(i * their_len / count);
    theirs.values.push_back(static_cast<Element>(reply.words[i + 1]));
  }

  const auto [low_sends, high_sends] = low ? rebalancing_send_counts(mine, theirs) : rebalancing_send_counts(theirs, mine);
  const std::size_t total = elements.size() + their_len;
  const std::size_t keep_low = (total + 1) / 2;

  if (low) {
    cell.big_send(partner, Tag::kMerge,
                  std::span<const Element>(elements.data() + elements.size() - low_sends, low_sends));
    const ElementArray got = receive_elements(cell, partner, high_sends);
    ElementArray target(keep_low);
    std::size_t i = 0;
    std::size_t j = 0;
    for (auto& slot : target) {
      if (j == got.size() || (i < elements.size() && elements[i] <= got[j])) {
        slot = elements[i++];
      } else {
        slot = got[j++];
      }
    }
    elements = std::move(target);
  } else {
    cell.big_send(partner, Tag::kMerge, std::span<const Element>(elements.data(), high_sends));
    const ElementArray got = receive_elements(cell, partner, low_sends);
    ElementArray target(total - keep_low);
    std::size_t i = got.size();
    std::size_t j = elements.size();
    for (auto slot = target.rbegin(); slot != target.rend(); ++slot) {
      if (i == 0 || (j > 0 && elements[j - 1] >= got[i - 1])) {
        *slot = elements[--j];
      } else {
        *slot = got[--i];
      }
    }
    elements = std::move(target);
  }
}

namespace {

void merge_with(Cell& cell, CellId partner, ElementArray& elements, const CleanupOptions& options,
                MergeVariant variant) {
  if (variant == MergeVariant::kExact) {
    merge_exchange_exact(cell, partner, elements, options.block_size);
  } else {
    merge_exchange_rebalancing(cell, partner, elements, options.sample_points);
  }
}

}  // namespace

CleanupResult cleanup_linear(Cell& cell, ElementArray& elements, const CleanupOptions& options) {
  const int p = cell.cell_count();
  const CellId me = cell.id();
  const int cap = options.iteration_cap > 0 ? options.iteration_cap : 4 * p;
  const int first = me % 2 == 0 ? 1 : -1;

  CleanupResult r;
  r.mode = CleanupMode::kLinear;
  for (int iter = 1; iter <= cap; ++iter) {
    bool merged = false;
    for (int side : {first, -first}) {
      const CellId partner = me + side;
      if (partner < 0 || partner >= p) continue;
      const bool low = me < partner;
      std::vector<std::int64_t> edge;
      if (!elements.empty()) edge.push_back(low ? elements.back() : elements.front());
      cell.send_words(partner, Tag::kBoundary, std::move(edge));
      const Message theirs = cell.recv_from(partner, Tag::kBoundary);
      if (elements.empty() || theirs.words.empty()) continue;
      const auto mine = static_cast<std::int64_t>(low ? elements.back() : elements.front());
      const bool overlap = low ? mine > theirs.words[0] : theirs.words[0] > mine;
      if (!overlap) continue;
      merge_with(cell, partner, elements, options, options.variant);
      merged = true;
      ++r.merges;
    }
    if (cell.global_int_sum(merged ? 0 : 1) == p) {
      r.iterations = iter;
      return r;
    }
  }
  cell.fail("linear cleanup did not settle within " + std::to_string(cap) + " iterations");
}

CleanupResult cleanup_batcher(Cell& cell, ElementArray& elements, const CleanupOptions& options) {
  const int p = cell.cell_count();
  const CellId me = cell.id();
  if (!is_power_of_two(static_cast<std::uint64_t>(p))) cell.fail("Batcher cleanup needs a power-of-two cell count");

  const auto sizes = cell.broadcast_all_gather(static_cast<std::int64_t>(elements.size()));
  const bool equal = std::all_of(sizes.begin(), sizes.end(), [&](std::int64_t s) { return s == sizes[0]; });
  const MergeVariant variant = equal ? options.variant : MergeVariant::kRebalancing;

  CleanupResult r;
  r.mode = CleanupMode::kBatcher;
  for (const ComparatorRound& round : batcher_schedule(p)) {
    ++r.iterations;
    for (const Comparator& c : round) {
      if (c.low != me && c.high != me) continue;
      merge_with(cell, c.low == me ? c.high : c.low, elements, options, variant);
      ++r.merges;
      break;
    }
  }
  if (!equal) {
    // Merge-split networks only guarantee a sort for equal block sizes.
    CleanupOptions repair = options;
    repair.variant = MergeVariant::kRebalancing;
    const CleanupResult tail = cleanup_linear(cell, elements, repair);
    r.iterations += tail.iterations;
    r.merges += tail.merges;
  }
  return r;
}

}  // namespace cellsort
