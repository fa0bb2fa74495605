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

#include "cellsort/balance.hpp"

#include <algorithm>
#include <span>
#include <string>

namespace cellsort {

DeltaTable make_delta_table(const std::vector<std::int64_t>& sizes, std::int64_t n_total, CellId me) {
  const auto p = static_cast<std::int64_t>(sizes.size());
  if (p == 0 || n_total % p != 0) {
    throw ConfigError("n_total " + std::to_string(n_total) + " is not divisible by " + std::to_string(p));
  }
  DeltaTable t;
  t.target = n_total / p;
  t.by_cell.resize(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    t.by_cell[i] = sizes[i] - t.target;
    t.entries.push_back(DeltaEntry{static_cast<CellId>(i), t.by_cell[i]});
  }
  std::sort(t.entries.begin(), t.entries.end(), [](const DeltaEntry& a, const DeltaEntry& b) {
    return a.delta != b.delta ? a.delta < b.delta : a.cell < b.cell;
  });
  t.local_delta = t.by_cell[static_cast<std::size_t>(me)];
  return t;
}

DeltaTable compute_deltas(Cell& cell, std::size_t current_size, std::int64_t n_total) {
  const auto sizes = cell.broadcast_all_gather(static_cast<std::int64_t>(current_size));
  return make_delta_table(sizes, n_total, cell.id());
}

std::vector<std::pair<CellId, std::int64_t>> excess_destinations(const DeltaTable& table, CellId me) {
  std::vector<std::pair<CellId, std::int64_t>> out;
  std::int64_t local = table.by_cell.at(static_cast<std::size_t>(me));
  if (local <= 0) return out;

  const auto& e = table.entries;
  std::size_t bottom = 0;
  std::size_t top = e.size() - 1;
  std::int64_t bottom_delta = e[bottom].delta;
  std::int64_t top_delta = e[top].delta;

  // Spend every larger excess against the biggest remaining shortfalls.
  while (e[top].cell != me) {
    top_delta += bottom_delta;
    if (top_delta < 0) {
      bottom_delta = top_delta;
      --top;
      top_delta = e[top].delta;
    } else {
      ++bottom;
      bottom_delta = e[bottom].delta;
      if (top_delta == 0) {
        --top;
        top_delta = e[top].delta;
      }
    }
  }

  while (local > 0) {
    if (bottom >= e.size() || bottom_delta >= 0) {
      throw Fault(me, "delta table exhausted with " + std::to_string(local) + " excess left");
    }
    const std::int64_t size = std::min(local, -bottom_delta);
    out.emplace_back(e[bottom].cell, size);
    local -= size;
    ++bottom;
    if (bottom < e.size()) bottom_delta = e[bottom].delta;
  }
  return out;
}

ElementArray pre_balance(Cell& cell, ElementArray elements, const DeltaTable& table) {
  const std::int64_t delta = table.local_delta;
  if (delta > 0) {
    for (const auto& [dst, count] : excess_destinations(table, cell.id())) {
      const auto n = static_cast<std::size_t>(count);
      std::span<const Element> tail(elements.data() + elements.size() - n, n);
      cell.big_send(dst, Tag::kBalance, tail);
      elements.resize(elements.size() - n);
    }
  } else if (delta < 0) {
    std::int64_t missing = -delta;
    while (missing > 0) {
      Message m = cell.recv_any(Tag::kBalance);
      const auto got = static_cast<std::int64_t>(m.elements.size());
      if (got > missing) {
        cell.fail("pre-balance received " + std::to_string(got) + " elements with shortfall " +
                  std::to_string(missing));
      }
      elements.insert(elements.end(), m.elements.begin(), m.elements.end());
      missing -= got;
    }
  }
  return elements;
}

namespace {

enum class Side { kLeft, kRight };

struct Transfer {
  Side side;
  std::int64_t amount;  // > 0 receive, < 0 send
};

void receive_exact(Cell& cell, CellId from, std::size_t amount, ElementArray& into, bool at_front) {
  ElementArray got;
  got.reserve(amount);
  while (got.size() < amount) {
    Message m = cell.recv_from(from, Tag::kPostBalance);
    if (got.size() + m.elements.size() > amount) cell.fail("post-balance over-delivery from " + std::to_string(from));
    got.insert(got.end(), m.elements.begin(), m.elements.end());
  }
  if (at_front) {
    into.insert(into.begin(), got.begin(), got.end());
  } else {
    into.insert(into.end(), got.begin(), got.end());
  }
}

}  // namespace

ElementArray post_balance(Cell& cell, ElementArray elements, const DeltaTable& table, bool sorted_mode) {
  const CellId me = cell.id();
  if (sorted_mode && !std::is_sorted(elements.begin(), elements.end())) {
    cell.fail("post-balance in sorted mode needs a locally sorted array");
  }
  std::int64_t left = 0;
  std::int64_t right = 0;
  for (std::size_t j = 0; j < table.by_cell.size(); ++j) {
    if (static_cast<CellId>(j) < me) left += table.by_cell[j];
    if (static_cast<CellId>(j) > me) right += table.by_cell[j];
  }

  // A positive side sum is a surplus we receive; a negative one a deficit we
  // supply from the matching end.
  Transfer first{Side::kRight, right};
  Transfer second{Side::kLeft, left};
  if (me % 2 == 1) std::swap(first, second);
  const auto held = static_cast<std::int64_t>(elements.size());
  if (first.amount < 0 && -first.amount > held && second.amount > 0) std::swap(first, second);

  for (const Transfer& t : {first, second}) {
    if (t.amount == 0) continue;
    const CellId neighbour = t.side == Side::kLeft ? me - 1 : me + 1;
    if (t.amount > 0) {
      receive_exact(cell, neighbour, static_cast<std::size_t>(t.amount), elements, t.side == Side::kLeft);
      continue;
    }
    const auto n = static_cast<std::size_t>(-t.amount);
    if (n > elements.size()) {
      cell.fail("post-balance asked to supply " + std::to_string(n) + " elements but holds " +
                std::to_string(elements.size()));
    }
    if (t.side == Side::kLeft) {
      cell.big_send(neighbour, Tag::kPostBalance, std::span<const Element>(elements.data(), n));
      elements.erase(elements.begin(), elements.begin() + static_cast<std::ptrdiff_t>(n));
    } else {
      cell.big_send(neighbour, Tag::kPostBalance,
                    std::span<const Element>(elements.data() + elements.size() - n, n));
      elements.resize(elements.size() - n);
    }
  }
  if (static_cast<std::int64_t>(elements.size()) != table.target) {
    cell.fail("post-balance ended with " + std::to_string(elements.size()) + " elements, target " +
              std::to_string(table.target));
  }
  return elements;
}

}  // namespace cellsort
