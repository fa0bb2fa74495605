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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cellsort {

/// Keys are positive integers in the 31-bit range [0, 2^31 - 1].
using Element = std::uint32_t;
using ElementArray = std::vector<Element>;

using CellId = int;

inline constexpr Element kMaxElement = 0x7fffffffu;
inline constexpr int kKeyBits = 31;
inline constexpr int kMaxCells = 1024;

/// Raised when a cell program violates a protocol or the fabric detects a
/// deadlock. Carries the cell that raised it (-1 when machine-wide).
class Fault : public std::runtime_error {
 public:
  Fault(CellId cell, const std::string& what)
      : std::runtime_error(what), cell_(cell) {}

  CellId cell() const noexcept { return cell_; }

 private:
  CellId cell_;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

constexpr bool is_power_of_two(std::uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

constexpr int log2_exact(std::uint64_t x) {
  int r = 0;
  while (x > 1) {
    x >>= 1;
    ++r;
  }
  return r;
}

}  // namespace cellsort
