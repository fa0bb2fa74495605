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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cellsort/bucket.hpp"
#include "cellsort/cleanup.hpp"
#include "cellsort/fabric.hpp"
#include "cellsort/keygen.hpp"
#include "cellsort/verify.hpp"

namespace cellsort {

enum class CleanupChoice { kAuto, kLinear, kBatcher };
enum class PhaseOrder { kInitial, kRevised };

const char* to_string(CleanupChoice c);
const char* to_string(PhaseOrder o);

struct RunConfig {
  int key_id = 1;
  std::size_t n_total = std::size_t{1} << 20;
  int p = 16;
  std::uint64_t seed = 1;
  std::size_t buckets = kDefaultBuckets;
  std::size_t chunk_elements = 64000;
  std::size_t receive_tolerance = 128;
  std::size_t sample_points = kDefaultSamplePoints;
  double overlap_threshold = kDefaultOverlapThreshold;
  std::size_t block_size = kDefaultBlockSize;
  CleanupChoice cleanup = CleanupChoice::kAuto;
  PhaseOrder order = PhaseOrder::kRevised;
  bool narrow_keys = true;
  Scheduler scheduler = Scheduler::kDeterministic;
  std::optional<std::uint64_t> delivery_shuffle_seed;
  bool exact_verify = false;
  std::optional<std::filesystem::path> report_path;

  /// Throws ConfigError before any work is done.
  void validate() const;
};

struct PhaseRecord {
  std::string name;
  double seconds = 0.0;
  std::uint64_t messages = 0;
  std::uint64_t bytes = 0;
  std::uint64_t rounds = 0;
};

struct RunReport {
  RunConfig config;
  std::string generator;
  std::vector<PhaseRecord> phases;  // executed order
  CleanupMode cleanup_mode = CleanupMode::kLinear;
  int overlapping_cells = 0;
  std::vector<double> overlap;  // per cell, measured when selection ran
  int cleanup_iterations = 0;
  std::size_t cleanup_merges = 0;
  std::int64_t max_distribution_deviation = 0;
  std::int64_t largest_bucket = 0;
  std::vector<std::int64_t> distribution_deviation;  // per cell
  VerifyReport verify;
  std::vector<ElementArray> final_cells;
};

/// Runs the full sort. Faults propagate as cellsort::Fault with the phase
/// name prefixed.
RunReport run(const RunConfig& config);

/// Same, on a caller-supplied initial distribution.
RunReport run_on(const RunConfig& config, const InitialDistribution& initial);

/// CSV rows: phase,seconds,msgs,bytes,rounds plus a summary row.
std::string report_csv(const RunReport& report);
/// Full report minus the element arrays.
std::string report_json(const RunReport& report, bool include_timing = true);

/// Writes the CSV to `path` and the JSON sidecar next to it (.json).
void emit_report(const RunReport& report, const std::filesystem::path& path);

}  // namespace cellsort
