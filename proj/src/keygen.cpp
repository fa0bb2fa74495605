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

#include "cellsort/keygen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>

namespace cellsort {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Independent stream per (seed, purpose, position).
std::uint64_t draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(seed ^ splitmix64(stream)) + index);
}

// Uniform integer in [lo, hi).
Element uniform_in(std::uint64_t bits, std::uint64_t lo, std::uint64_t hi) {
  const std::uint64_t span = hi - lo;
  return static_cast<Element>(lo + (((bits >> 32) * span) >> 32));
}

constexpr std::uint64_t kFull = std::uint64_t{1} << kKeyBits;
constexpr Element kKey3Value = Element{1} << 30;
constexpr std::uint64_t kClusterWidth = std::uint64_t{1} << 20;
constexpr int kClusterCount = 8;
constexpr std::uint64_t kKey5Window = std::uint64_t{1} << 18;
constexpr std::uint64_t kKey5Floor = std::uint64_t{1} << 24;
constexpr double kKey2Ratio = 0.88;

enum Stream : std::uint64_t { kValues = 1, kClusterPick = 2, kCenters = 3 };

// Largest-remainder apportionment of `n` over `weights`, each share >= 1.
std::vector<std::size_t> apportion(std::size_t n, const std::vector<double>& weights) {
  const std::size_t p = weights.size();
  std::vector<std::size_t> out(p, 1);
  const std::size_t rest = n - p;
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t given = 0;
  for (std::size_t i = 0; i < p; ++i) {
    const double exact = static_cast<double>(rest) * weights[i] / total;
    const auto whole = static_cast<std::size_t>(std::floor(exact));
    out[i] += whole;
    given += whole;
    remainders.emplace_back(exact - static_cast<double>(whole), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; given < rest; ++k, ++given) out[remainders[k % p].second] += 1;
  return out;
}

}  // namespace

void KeySpec::validate() const {
  if (key_id < 1 || key_id > 5) throw ConfigError("unknown key id " + std::to_string(key_id));
  if (p < 1 || p > kMaxCells) throw ConfigError("cell count out of range");
  if (n_total < static_cast<std::size_t>(p)) throw ConfigError("n_total must be at least the cell count");
}

std::size_t InitialDistribution::total() const {
  std::size_t n = 0;
  for (const auto& c : per_cell) n += c.size();
  return n;
}

std::vector<std::size_t> initial_counts(const KeySpec& spec) {
  spec.validate();
  const auto p = static_cast<std::size_t>(spec.p);
  std::vector<double> weights(p, 1.0);
  if (spec.key_id == 2) {
    for (std::size_t i = 0; i < p; ++i) weights[i] = std::pow(kKey2Ratio, static_cast<double>(i));
  } else if (spec.key_id == 4) {
    for (std::size_t i = 0; i < p; ++i) weights[i] = (i % 2 == 0) ? 1.1 : 0.9;
  }
  return apportion(spec.n_total, weights);
}

InitialDistribution generate(const KeySpec& spec) {
  const auto counts = initial_counts(spec);
  const std::uint64_t seed = spec.seed;

  std::array<std::uint64_t, kClusterCount> centers{};
  for (int c = 0; c < kClusterCount; ++c) {
    centers[static_cast<std::size_t>(c)] =
        uniform_in(draw(seed, kCenters, static_cast<std::uint64_t>(c)), 0, kFull - kClusterWidth);
  }

  auto value_at = [&](std::uint64_t g) -> Element {
    const std::uint64_t bits = draw(seed, kValues, g);
    switch (spec.key_id) {
      case 1:
      case 2:
        return uniform_in(bits, 0, kFull);
      case 3:
        return kKey3Value;
      case 4: {
        if (g % 2 == 0) return uniform_in(bits, 0, kFull);
        const auto c = draw(seed, kClusterPick, g) % kClusterCount;
        const auto lo = centers[c];
        return uniform_in(bits, lo, lo + kClusterWidth);
      }
      default:
        if (g % 4 == 0) return uniform_in(bits, 0, kKey5Window);
        return uniform_in(bits, kKey5Floor, kFull);
    }
  };

  InitialDistribution dist;
  dist.per_cell.resize(counts.size());
  std::uint64_t g = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    auto& cell = dist.per_cell[i];
    cell.resize(counts[i]);
    for (auto& v : cell) v = value_at(g++);
  }
  return dist;
}

void dump_raw(const InitialDistribution& dist, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < dist.per_cell.size(); ++i) {
    const auto path = dir / ("cell" + std::to_string(i) + ".u32");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (Element v : dist.per_cell[i]) {
      const unsigned char bytes[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                      static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
      out.write(reinterpret_cast<const char*>(bytes), 4);
    }
  }
}

}  // namespace cellsort
