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

#include <algorithm>
#include <cstdint>
#include <mutex>
#include <random>
#include <vector>

#include "cellsort/fabric.hpp"

namespace cellsort::testing {

// Runs fn on every cell and collects each cell's return value by id.
template <class R, class F>
std::vector<R> on_cells(int p, F fn, Scheduler sched = Scheduler::kDeterministic,
                        std::size_t chunk = 64000, std::size_t tolerance = 128) {
  FabricConfig cfg;
  cfg.p = p;
  cfg.scheduler = sched;
  cfg.chunk_elements = chunk;
  cfg.receive_tolerance = tolerance;
  Fabric fabric(cfg);
  std::vector<R> out(static_cast<std::size_t>(p));
  std::mutex mu;
  fabric.run([&](Cell& c) {
    R r = fn(c);
    std::lock_guard<std::mutex> lock(mu);
    out[static_cast<std::size_t>(c.id())] = std::move(r);
  });
  return out;
}

inline ElementArray sorted_random(std::mt19937_64& rng, std::size_t n, Element hi) {
  std::uniform_int_distribution<Element> d(0, hi);
  ElementArray v(n);
  for (auto& x : v) x = d(rng);
  std::sort(v.begin(), v.end());
  return v;
}

inline ElementArray concat(const std::vector<ElementArray>& cells) {
  ElementArray all;
  for (const auto& c : cells) all.insert(all.end(), c.begin(), c.end());
  return all;
}

}  // namespace cellsort::testing
