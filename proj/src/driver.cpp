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

#include "cellsort/driver.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "cellsort/balance.hpp"
#include "cellsort/radix.hpp"

namespace cellsort {

const char* to_string(CleanupChoice c) {
  switch (c) {
    case CleanupChoice::kAuto:
      return "auto";
    case CleanupChoice::kLinear:
      return "linear";
    default:
      return "batcher";
  }
}

const char* to_string(PhaseOrder o) { return o == PhaseOrder::kInitial ? "initial" : "revised"; }

void RunConfig::validate() const {
  if (key_id < 1 || key_id > 5) throw ConfigError("--key must be 1..5");
  if (p < 1 || p > kMaxCells || !is_power_of_two(static_cast<std::uint64_t>(p))) {
    throw ConfigError("--cells must be a power of two in [1, 1024]");
  }
  if (n_total < static_cast<std::size_t>(p)) throw ConfigError("--n must be at least --cells");
  if (n_total % static_cast<std::size_t>(p) != 0) {
    throw ConfigError("--n (" + std::to_string(n_total) + ") must be divisible by --cells (" + std::to_string(p) + ")");
  }
  if (!is_power_of_two(buckets) || buckets > (std::size_t{1} << kKeyBits)) {
    throw ConfigError("--buckets must be a power of two");
  }
  if (chunk_elements <= receive_tolerance) throw ConfigError("--chunk must exceed the receive tolerance");
  if (sample_points == 0) throw ConfigError("--sample must be positive");
  if (!(overlap_threshold >= 0.0 && overlap_threshold <= 1.0)) throw ConfigError("--overlap-threshold must be in [0, 1]");
  if (block_size == 0) throw ConfigError("block size must be positive");
}

namespace {

struct Snapshot {
  std::uint64_t messages;
  std::uint64_t bytes;
  std::uint64_t rounds;
};

Snapshot snapshot(const Fabric& f) {
  return {f.stats().total_messages(), f.stats().total_bytes(), f.stats().total_collective_rounds()};
}

}  // namespace

RunReport run(const RunConfig& config) {
  config.validate();
  const InitialDistribution initial = generate(KeySpec{config.key_id, config.n_total, config.p, config.seed});
  return run_on(config, initial);
}

RunReport run_on(const RunConfig& config, const InitialDistribution& initial) {
  config.validate();
  if (initial.per_cell.size() != static_cast<std::size_t>(config.p) || initial.total() != config.n_total) {
    throw ConfigError("initial distribution does not match --n/--cells");
  }

  FabricConfig fc;
  fc.p = config.p;
  fc.chunk_elements = config.chunk_elements;
  fc.receive_tolerance = config.receive_tolerance;
  fc.scheduler = config.scheduler;
  fc.delivery_shuffle_seed = config.delivery_shuffle_seed;
  Fabric fabric(fc);

  const auto p = static_cast<std::size_t>(config.p);
  const auto n = static_cast<std::int64_t>(config.n_total);
  const bool revised = config.order == PhaseOrder::kRevised;

  RunReport report;
  report.config = config;
  report.generator = std::string(kGeneratorName) + " v" + std::to_string(kGeneratorVersion);
  report.distribution_deviation.assign(p, 0);
  report.overlap.assign(p, 0.0);

  std::vector<ElementArray> cells = initial.per_cell;
  std::vector<std::int64_t> largest(p, 0);
  std::vector<int> modes(p, 0);
  std::vector<CleanupResult> cleanup_results(p);

  auto phase = [&](const std::string& name, const std::function<void(Cell&)>& body) {
    const Snapshot before = snapshot(fabric);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fabric.run(body);
    } catch (const Fault& f) {
      throw Fault(f.cell(), name + ": " + f.what());
    }
    const auto t1 = std::chrono::steady_clock::now();
    const Snapshot after = snapshot(fabric);
    report.phases.push_back(PhaseRecord{name, std::chrono::duration<double>(t1 - t0).count(),
                                        after.messages - before.messages, after.bytes - before.bytes,
                                        after.rounds - before.rounds});
  };

  auto pre = [&](Cell& cell) {
    auto& mine = cells[static_cast<std::size_t>(cell.id())];
    const DeltaTable table = compute_deltas(cell, mine.size(), n);
    mine = pre_balance(cell, std::move(mine), table);
  };
  auto bucketing = [&](Cell& cell) {
    const auto me = static_cast<std::size_t>(cell.id());
    BucketPhaseResult r = bucket_and_distribute(cell, cells[me], config.buckets);
    cells[me] = std::move(r.elements);
    report.distribution_deviation[me] = r.deviation;
    largest[me] = r.largest_bucket;
  };
  auto post = [&](Cell& cell) {
    auto& mine = cells[static_cast<std::size_t>(cell.id())];
    const DeltaTable table = compute_deltas(cell, mine.size(), n);
    mine = post_balance(cell, std::move(mine), table, !revised);
  };
  auto local_sort = [&](Cell& cell) {
    radix_sort_inplace(cells[static_cast<std::size_t>(cell.id())], config.narrow_keys);
  };
  auto cleanup = [&](Cell& cell) {
    const auto me = static_cast<std::size_t>(cell.id());
    auto& mine = cells[me];
    CleanupOptions opt;
    opt.sample_points = config.sample_points;
    opt.overlap_threshold = config.overlap_threshold;
    opt.block_size = config.block_size;
    opt.variant = revised ? MergeVariant::kExact : MergeVariant::kRebalancing;

    CleanupMode mode = config.cleanup == CleanupChoice::kBatcher ? CleanupMode::kBatcher : CleanupMode::kLinear;
    if (config.cleanup == CleanupChoice::kAuto) {
      report.overlap[me] = overlap_fraction(cell, mine, config.sample_points);
      mode = select_cleanup(cell, report.overlap[me], config.overlap_threshold);
    }
    modes[me] = static_cast<int>(mode);
    cleanup_results[me] =
        mode == CleanupMode::kBatcher ? cleanup_batcher(cell, mine, opt) : cleanup_linear(cell, mine, opt);
  };

  phase("pre-balance", pre);
  phase("bucketing", bucketing);
  if (revised) {
    phase("post-balance", post);
    phase("radix-sort", local_sort);
    phase("cleanup", cleanup);
  } else {
    phase("local-sort", local_sort);
    phase("cleanup", cleanup);
    phase("post-balance", post);
  }

  for (std::size_t i = 1; i < p; ++i) {
    if (modes[i] != modes[0]) throw Fault(static_cast<CellId>(i), "cleanup: cells disagree on the cleanup verdict");
  }
  report.cleanup_mode = static_cast<CleanupMode>(modes[0]);
  report.cleanup_iterations = cleanup_results[0].iterations;
  for (const auto& r : cleanup_results) report.cleanup_merges += r.merges;
  for (double o : report.overlap) report.overlapping_cells += o >= config.overlap_threshold ? 1 : 0;
  for (std::int64_t d : report.distribution_deviation) {
    report.max_distribution_deviation = std::max(report.max_distribution_deviation, d < 0 ? -d : d);
  }
  report.largest_bucket = largest[0];

  report.verify = verify(initial, cells, config.n_total, config.p, config.exact_verify);
  report.final_cells = std::move(cells);
  return report;
}

std::string report_csv(const RunReport& report) {
  std::ostringstream os;
  os << "phase,seconds,msgs,bytes,rounds\n";
  PhaseRecord total{"total"};
  for (const auto& ph : report.phases) {
    os << ph.name << ',' << std::fixed << std::setprecision(6) << ph.seconds << ',' << ph.messages << ','
       << ph.bytes << ',' << ph.rounds << '\n';
    total.seconds += ph.seconds;
    total.messages += ph.messages;
    total.bytes += ph.bytes;
    total.rounds += ph.rounds;
  }
  os << total.name << ',' << std::fixed << std::setprecision(6) << total.seconds << ',' << total.messages << ','
     << total.bytes << ',' << total.rounds << '\n';
  return os.str();
}

std::string report_json(const RunReport& report, bool include_timing) {
  using nlohmann::ordered_json;
  const RunConfig& c = report.config;
  ordered_json j;
  j["config"] = {
      {"key", c.key_id},
      {"n", c.n_total},
      {"cells", c.p},
      {"seed", c.seed},
      {"buckets", c.buckets},
      {"chunk", c.chunk_elements},
      {"receive_tolerance", c.receive_tolerance},
      {"sample", c.sample_points},
      {"overlap_threshold", c.overlap_threshold},
      {"block_size", c.block_size},
      {"cleanup", to_string(c.cleanup)},
      {"order", to_string(c.order)},
      {"narrow_keys", c.narrow_keys ? "auto" : "off"},
      {"scheduler", to_string(c.scheduler)},
  };
  j["generator"] = report.generator;
  ordered_json phases = ordered_json::array();
  for (const auto& ph : report.phases) {
    ordered_json row = {{"phase", ph.name}};
    if (include_timing) row["seconds"] = ph.seconds;
    row["msgs"] = ph.messages;
    row["bytes"] = ph.bytes;
    row["rounds"] = ph.rounds;
    phases.push_back(std::move(row));
  }
  j["phases"] = std::move(phases);
  j["cleanup_mode"] = to_string(report.cleanup_mode);
  j["overlapping_cells"] = report.overlapping_cells;
  j["overlap"] = report.overlap;
  j["cleanup_iterations"] = report.cleanup_iterations;
  j["cleanup_merges"] = report.cleanup_merges;
  j["largest_bucket"] = report.largest_bucket;
  j["max_distribution_deviation"] = report.max_distribution_deviation;
  j["distribution_deviation"] = report.distribution_deviation;
  const VerifyReport& v = report.verify;
  j["verify"] = {
      {"accepted", v.accepted()},
      {"locally_sorted", v.all_sorted()},
      {"globally_ordered", v.globally_ordered},
      {"balanced", v.balanced},
      {"multiset_ok", v.multiset_ok},
      {"exact_multiset", v.exact_multiset_checked},
      {"max_cell_deviation", v.max_cell_deviation},
  };
  return j.dump(2);
}

void emit_report(const RunReport& report, const std::filesystem::path& path) {
  std::filesystem::path sidecar = path;
  sidecar.replace_extension(".json");
  if (sidecar == path) sidecar += ".report.json";
  {
    std::ofstream csv(path);
    if (!csv) throw std::runtime_error("cannot write report " + path.string());
    csv << report_csv(report);
  }
  std::ofstream json(sidecar);
  if (!json) throw std::runtime_error("cannot write report " + sidecar.string());
  json << report_json(report) << '\n';
}

}  // namespace cellsort
