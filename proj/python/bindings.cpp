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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "cellsort/cleanup.hpp"
#include "cellsort/driver.hpp"
#include "cellsort/fabric.hpp"
#include "cellsort/keygen.hpp"
#include "cellsort/radix.hpp"

namespace py = pybind11;
using namespace cellsort;

namespace {

using U32Array = py::array_t<Element, py::array::c_style | py::array::forcecast>;

ElementArray to_elements(const U32Array& a) {
  auto view = a.unchecked<1>();
  ElementArray out(static_cast<std::size_t>(view.shape(0)));
  for (py::ssize_t i = 0; i < view.shape(0); ++i) out[static_cast<std::size_t>(i)] = view(i);
  return out;
}

U32Array to_numpy(const ElementArray& v) {
  U32Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

CleanupChoice parse_cleanup(const std::string& s) {
  if (s == "auto") return CleanupChoice::kAuto;
  if (s == "linear") return CleanupChoice::kLinear;
  if (s == "batcher") return CleanupChoice::kBatcher;
  throw ConfigError("cleanup must be auto|linear|batcher");
}

py::tuple run_sort(int key, std::size_t n, int cells, std::uint64_t seed, std::size_t buckets, std::size_t chunk,
                   std::size_t sample, double overlap_threshold, const std::string& cleanup,
                   const std::string& order, bool narrow_keys, const std::string& scheduler, bool verify) {
  RunConfig cfg;
  cfg.key_id = key;
  cfg.n_total = n;
  cfg.p = cells;
  cfg.seed = seed;
  cfg.buckets = buckets;
  cfg.chunk_elements = chunk;
  cfg.sample_points = sample;
  cfg.overlap_threshold = overlap_threshold;
  cfg.cleanup = parse_cleanup(cleanup);
  if (order != "initial" && order != "revised") throw ConfigError("order must be initial|revised");
  cfg.order = order == "initial" ? PhaseOrder::kInitial : PhaseOrder::kRevised;
  cfg.narrow_keys = narrow_keys;
  if (scheduler != "deterministic" && scheduler != "concurrent") {
    throw ConfigError("scheduler must be deterministic|concurrent");
  }
  cfg.scheduler = scheduler == "concurrent" ? Scheduler::kConcurrent : Scheduler::kDeterministic;
  cfg.exact_verify = verify;

  RunReport report;
  {
    py::gil_scoped_release release;
    report = run(cfg);
  }
  py::list final_cells;
  for (const auto& c : report.final_cells) final_cells.append(to_numpy(c));
  return py::make_tuple(report_json(report), final_cells);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Five-phase parallel integer sort on a simulated distributed-memory machine.";

  py::register_exception<Fault>(m, "Fault", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def(
      "generate",
      [](int key, std::size_t n, int cells, std::uint64_t seed) {
        const auto dist = generate(KeySpec{key, n, cells, seed});
        py::list out;
        for (const auto& c : dist.per_cell) out.append(to_numpy(c));
        return out;
      },
      py::arg("key"), py::arg("n"), py::arg("cells"), py::arg("seed") = 1);

  m.def(
      "radix_sort",
      [](const U32Array& a, bool narrow) {
        ElementArray v = to_elements(a);
        radix_sort_inplace(v, narrow);
        return to_numpy(v);
      },
      py::arg("values"), py::arg("narrow") = true);

  m.def("detect_width", [](const U32Array& a) { return detect_width(to_elements(a)); }, py::arg("values"));
  m.def("bucket_index", &bucket_index, py::arg("value"), py::arg("buckets") = kDefaultBuckets);
  m.def("chunk_lengths", &chunk_lengths, py::arg("n"), py::arg("chunk") = 64000, py::arg("tolerance") = 128);

  m.def(
      "batcher_schedule",
      [](int p) {
        std::vector<std::vector<std::pair<int, int>>> out;
        for (const auto& round : batcher_schedule(p)) {
          auto& r = out.emplace_back();
          for (const auto& c : round) r.emplace_back(c.low, c.high);
        }
        return out;
      },
      py::arg("cells"));

  m.def(
      "block_merge",
      [](const U32Array& a, std::size_t mid, std::size_t block_size) {
        ElementArray v = to_elements(a);
        block_merge(v, mid, block_size);
        return to_numpy(v);
      },
      py::arg("values"), py::arg("mid"), py::arg("block_size") = kDefaultBlockSize);

  m.def("run", &run_sort, py::arg("key") = 1, py::arg("n") = std::size_t{1} << 16, py::arg("cells") = 16,
        py::arg("seed") = 1, py::arg("buckets") = kDefaultBuckets, py::arg("chunk") = 64000,
        py::arg("sample") = kDefaultSamplePoints, py::arg("overlap_threshold") = kDefaultOverlapThreshold,
        py::arg("cleanup") = "auto", py::arg("order") = "revised", py::arg("narrow_keys") = true,
        py::arg("scheduler") = "deterministic", py::arg("verify") = true,
        "Runs the sort; returns (report_json, final_cells).");
}
