// Copyright 2026 The castbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Structured values cross the boundary as JSON text; the Python package decodes them.

#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "castbench/commands.hpp"
#include "castbench/error.hpp"
#include "castbench/prompts.hpp"
#include "castbench/stats.hpp"
#include "castbench/summary_metrics.hpp"
#include "castbench/tagging_metrics.hpp"

namespace py = pybind11;
using namespace castbench;

namespace {

SummaryOutput summary_from_text(const std::string& text) {
  const ParsedOutput p = parse_structured_output(text, Task::kSummarize);
  if (const auto* e = p.error()) throw Error(e->kind, e->error);
  return *p.summary();
}

std::string parse_to_json(const std::string& raw, const std::string& task, std::size_t expected_items,
                          bool require_intermediates) {
  const ParsedOutput p = parse_structured_output(raw, parse_task(task), expected_items, require_intermediates);
  Json j;
  j["ok"] = p.ok();
  if (const auto* s = p.summary()) {
    j["document"] = serialize_summary(*s);
  } else if (const auto* t = p.tags()) {
    Json tags = Json::array();
    for (const auto& cell : t->tags) tags.push_back(cell ? Json(*cell) : Json(nullptr));
    j["document"] = Json{{"Tags", tags}};
  } else {
    j["document"] = serialize_error(*p.error());
    j["error_kind"] = std::string(error_code_name(p.error()->kind));
  }
  j["intermediates"] = serialize_intermediates(p.intermediates);
  return j.dump();
}

std::string cast_t_json(const std::vector<std::vector<std::string>>& cells) {
  TagRunSet runs;
  runs.n_runs = cells.empty() ? 0 : cells.front().size();
  for (std::size_t i = 0; i < cells.size(); ++i) runs.items.push_back({std::to_string(i), cells[i], std::nullopt});
  return to_json(cast_t(runs)).dump();
}

}  // namespace

PYBIND11_MODULE(_castbench, m) {
  m.doc() = "castbench native core";

  static py::exception<Error> error_type(m, "CastbenchError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error_type.ptr(), (std::string(error_code_name(e.code())) + ": " + e.what()).c_str());
    }
  });

  m.def("kendall_tau", [](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    return stats::kendall_tau(a, b);
  });
  m.def("kendall_p_value", &stats::kendall_p_value, py::arg("m"), py::arg("tau"));
  m.def("positional_score", &stats::positional_score);
  m.def("shannon_entropy", [](const std::vector<std::string>& outcomes) {
    return stats::shannon_entropy(stats::EmpiricalDistribution::from_outcomes(outcomes));
  });
  m.def(
      "pearson",
      [](const std::vector<double>& xs, const std::vector<double>& ys, std::size_t permutations, std::uint64_t seed) {
        const auto c = stats::pearson(xs, ys, permutations, seed);
        return py::make_tuple(c.r, c.p);
      },
      py::arg("xs"), py::arg("ys"), py::arg("permutations") = stats::kDefaultPermutations,
      py::arg("seed") = stats::kDefaultPermutationSeed);
  m.def("majority_ratio", [](const std::vector<std::size_t>& sizes, std::size_t n) {
    return stats::majority_ratio(sizes, n);
  });
  m.def("mean_std", [](const std::vector<double>& v) {
    const auto s = stats::mean_std(v);
    return py::make_tuple(s.mean, s.std);
  });

  m.def("_parse_structured_output", &parse_to_json, py::arg("raw"), py::arg("task") = "summarize",
        py::arg("expected_items") = 0, py::arg("require_intermediates") = false);
  m.def(
      "_cast_s",
      [](const std::string& left, const std::string& right, double alpha) {
        return to_json(cast_s(summary_from_text(left), summary_from_text(right), alpha)).dump();
      },
      py::arg("left"), py::arg("right"), py::arg("alpha") = kDefaultAlpha);
  m.def("_cast_t", &cast_t_json, py::arg("cells"));
  m.def("decompose_query", [](const std::string& q) {
    const QueryConstraints c = decompose_query(q);
    py::dict d;
    d["max_bullets"] = c.max_bullets ? py::cast(*c.max_bullets) : py::none();
    d["min_bullets"] = c.min_bullets ? py::cast(*c.min_bullets) : py::none();
    d["tone"] = c.tone ? py::cast(*c.tone) : py::none();
    d["perspective"] = c.perspective ? py::cast(*c.perspective) : py::none();
    d["output_language"] = c.output_language ? py::cast(*c.output_language) : py::none();
    return d;
  });

  m.def(
      "mock_demo",
      [](const std::string& out, std::uint64_t seed, std::size_t n_runs, double p_reorder) {
        MockStudyOptions o;
        o.out = out;
        o.seed = seed;
        o.n_runs = n_runs;
        o.p_reorder = p_reorder;
        std::ostringstream log;
        const int code = cmd_mock_demo(o, log);
        return py::make_tuple(code, log.str());
      },
      py::arg("out"), py::arg("seed") = 42, py::arg("n_runs") = 10, py::arg("p_reorder") = 0.5);
  m.def(
      "run",
      [](const std::string& config) {
        std::ostringstream log;
        const int code = cmd_run(config, {}, log);
        return py::make_tuple(code, log.str());
      },
      py::arg("config"));
  m.def(
      "report",
      [](const std::string& root, const std::string& format) {
        if (format != "csv" && format != "markdown") {
          throw Error(ErrorCode::kConfig, "format must be 'markdown' or 'csv'");
        }
        std::ostringstream log;
        const int code = cmd_report(root, format == "csv" ? ReportFormat::kCsv : ReportFormat::kMarkdown, log);
        return py::make_tuple(code, log.str());
      },
      py::arg("root"), py::arg("format") = "markdown");
}
