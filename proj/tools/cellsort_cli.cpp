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

// Command-line front end: generate a key distribution, sort it on the
// simulated machine, verify, and write the phase report.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "cellsort/driver.hpp"

namespace {

constexpr int kExitVerified = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitFault = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace cellsort;

  CLI::App app{"Five-phase parallel integer sort on a simulated P-cell machine"};
  RunConfig cfg;
  std::string cleanup = "auto";
  std::string order = "revised";
  std::string narrow = "auto";
  std::string scheduler = "deterministic";
  std::string report;
  std::string dump_dir;
  bool exact = false;

  app.add_option("--key", cfg.key_id, "Key distribution 1..5")->check(CLI::Range(1, 5));
  app.add_option("--n", cfg.n_total, "Total element count");
  app.add_option("--cells", cfg.p, "Cell count (power of two)");
  app.add_option("--seed", cfg.seed, "Generator seed");
  app.add_option("--buckets", cfg.buckets, "Bucket count (power of two)");
  app.add_option("--chunk", cfg.chunk_elements, "Elements per big_send chunk");
  app.add_option("--sample", cfg.sample_points, "Sample points for overlap measurement");
  app.add_option("--overlap-threshold", cfg.overlap_threshold, "Overlap fraction that flags a cell");
  app.add_option("--cleanup", cleanup, "auto|linear|batcher")->check(CLI::IsMember({"auto", "linear", "batcher"}));
  app.add_option("--order", order, "initial|revised")->check(CLI::IsMember({"initial", "revised"}));
  app.add_option("--narrow-keys", narrow, "auto|off")->check(CLI::IsMember({"auto", "off"}));
  app.add_option("--scheduler", scheduler, "deterministic|concurrent")
      ->check(CLI::IsMember({"deterministic", "concurrent"}));
  app.add_option("--report", report, "CSV report path; a .json sidecar is written next to it");
  app.add_flag("--verify", exact, "Exact multiset comparison in addition to the hash check");
  app.add_option("--dump", dump_dir, "Write the generated cell<id>.u32 files to this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  const std::map<std::string, CleanupChoice> cleanups{
      {"auto", CleanupChoice::kAuto}, {"linear", CleanupChoice::kLinear}, {"batcher", CleanupChoice::kBatcher}};
  cfg.cleanup = cleanups.at(cleanup);
  cfg.order = order == "initial" ? PhaseOrder::kInitial : PhaseOrder::kRevised;
  cfg.narrow_keys = narrow == "auto";
  cfg.scheduler = scheduler == "concurrent" ? Scheduler::kConcurrent : Scheduler::kDeterministic;
  cfg.exact_verify = exact;

  RunReport result;
  try {
    cfg.validate();
    const InitialDistribution initial = generate(KeySpec{cfg.key_id, cfg.n_total, cfg.p, cfg.seed});
    if (!dump_dir.empty()) dump_raw(initial, dump_dir);
    result = run_on(cfg, initial);
    if (!report.empty()) emit_report(result, report);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Fault& e) {
    std::cerr << "fault";
    if (e.cell() >= 0) std::cerr << " on cell " << e.cell();
    std::cerr << ": " << e.what() << '\n';
    return kExitFault;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFault;
  }

  std::cout << report_csv(result);
  std::cout << "cleanup=" << to_string(result.cleanup_mode) << " overlapping_cells=" << result.overlapping_cells
            << " max_deviation=" << result.max_distribution_deviation << " largest_bucket=" << result.largest_bucket
            << '\n';
  std::cout << "verify=" << (result.verify.accepted() ? "ok" : "FAILED") << '\n';
  return result.verify.accepted() ? kExitVerified : kExitVerifyFailed;
}
