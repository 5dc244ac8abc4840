// Copyright 2026 The ktune Authors.
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

// Thin Python bindings. Structured values cross the boundary as JSON so the
// Python side sees plain dicts and lists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ktune/asmstats.hpp"
#include "ktune/configspace.hpp"
#include "ktune/digest.hpp"
#include "ktune/error.hpp"
#include "ktune/report.hpp"
#include "ktune/search.hpp"
#include "ktune/synthetic.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

json to_json(const py::handle& obj) {
  auto dumps = py::module_::import("json").attr("dumps");
  return json::parse(dumps(obj).cast<std::string>());
}

py::object to_py(const json& j) {
  auto loads = py::module_::import("json").attr("loads");
  return loads(j.dump());
}

// Accepts a dict or a JSON string.
json document(const py::object& obj) {
  if (py::isinstance<py::str>(obj)) return json::parse(obj.cast<std::string>());
  return to_json(obj);
}

ktune::SearchStrategy strategy_of(const std::string& name, std::uint64_t seed,
                                  std::uint64_t n) {
  if (name == "exhaustive") return ktune::Exhaustive{};
  if (name == "random") return ktune::RandomSample{seed, n};
  if (name == "halving") {
    ktune::Halving h;
    h.seed = seed;
    return h;
  }
  throw ktune::Error("unknown strategy `" + name + "`");
}

ktune::report::BenchmarkTable table_of(const py::object& obj) {
  if (py::isinstance<py::str>(obj)) {
    return ktune::report::BenchmarkTable::from_csv(obj.cast<std::string>());
  }
  std::vector<ktune::report::BenchmarkRow> rows;
  for (const auto& r : obj) {
    auto d = r.cast<py::dict>();
    rows.push_back({d["impl"].cast<std::string>(), ktune::ShapeKey::from_json(to_json(d["shape"])),
                    d["median_ms"].cast<double>()});
  }
  return ktune::report::BenchmarkTable(std::move(rows));
}

}  // namespace

PYBIND11_MODULE(_ktune, m) {
  m.doc() = "Configuration spaces, synthetic search and report arithmetic.";
  m.attr("__version__") = ktune::kFrameworkVersion;

  auto base = py::register_exception<ktune::Error>(m, "KtuneError");
  py::register_exception<ktune::ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ktune::EvalError>(m, "EvalError", base.ptr());
  py::register_exception<ktune::SearchError>(m, "SearchError", base.ptr());

  py::class_<ktune::ConfigSpace>(m, "ConfigSpace")
      .def_property_readonly("name", &ktune::ConfigSpace::name)
      .def_property_readonly("digest", &ktune::ConfigSpace::digest)
      .def_property_readonly("params",
                             [](const ktune::ConfigSpace& s) {
                               std::vector<std::string> out;
                               for (const auto& p : s.params()) out.push_back(p.name());
                               return out;
                             })
      .def("to_dict", [](const ktune::ConfigSpace& s) { return to_py(s.to_json()); })
      .def("cardinality",
           [](const ktune::ConfigSpace& s) {
             auto c = ktune::cardinality(s);
             return py::make_tuple(c.raw, c.valid);
           })
      .def(
          "enumerate",
          [](const ktune::ConfigSpace& s, std::size_t limit) {
            py::list out;
            ktune::ConfigCursor cursor(s);
            while (limit == 0 || out.size() < limit) {
              auto c = cursor.next();
              if (!c) break;
              out.append(to_py(c->to_json()));
            }
            return out;
          },
          py::arg("limit") = 0)
      .def("validate", [](const ktune::ConfigSpace& s, const py::dict& config) {
        auto r = ktune::validate(s, ktune::KernelConfig::from_json(to_json(config)));
        return py::make_tuple(r.valid, r.violations);
      });

  m.def(
      "parse_space",
      [](const py::object& doc) { return ktune::ConfigSpace::from_json(document(doc)); },
      py::arg("doc"), "Space from a dict or a JSON string.");
  m.def("load_space", &ktune::load_space, py::arg("path"));

  m.def(
      "synthetic_latency",
      [](const py::object& profile, const py::dict& config, const py::dict& shape) {
        return ktune::synthetic_latency_noise_free(
            ktune::CostProfile::from_json(document(profile)),
            ktune::KernelConfig::from_json(to_json(config)),
            ktune::ShapeKey::from_json(to_json(shape)));
      },
      py::arg("profile"), py::arg("config"), py::arg("shape"));

  m.def(
      "tune_synthetic",
      [](const ktune::ConfigSpace& space, const py::object& profile, const py::dict& shape,
         const std::string& strategy, std::uint64_t seed, std::uint64_t n,
         std::optional<std::uint64_t> max_evaluations, int warmups, int reps) {
        ktune::SyntheticEvaluator ev(ktune::CostProfile::from_json(document(profile)), space);
        ktune::SearchBudget budget;
        budget.max_evaluations = max_evaluations;
        ktune::EvalPlan plan;
        plan.warmups = warmups;
        plan.reps = reps;
        auto r = ktune::run_search(space, ktune::ShapeKey::from_json(to_json(shape)),
                                   strategy_of(strategy, seed, n), budget, ev, plan);
        return to_py(r.to_json());
      },
      py::arg("space"), py::arg("profile"), py::arg("shape"), py::arg("strategy") = "exhaustive",
      py::arg("seed") = 0, py::arg("n") = 16, py::arg("max_evaluations") = py::none(),
      py::arg("warmups") = 0, py::arg("reps") = 3,
      "Searches with the synthetic cost model; returns the tuning result as a dict.");

  m.def(
      "parse_asm",
      [](const std::string& text) { return ktune::asmstats::parse_asm(text).mnemonics; },
      py::arg("text"));
  m.def(
      "asm_stats",
      [](const std::string& text, const std::string& source_id) {
        auto s = ktune::asmstats::stats({source_id, text});
        py::dict out;
        out["source_id"] = s.source_id;
        out["unique"] = s.unique_mnemonics;
        out["total"] = s.total_instructions;
        out["histogram"] = s.histogram;
        return out;
      },
      py::arg("text"), py::arg("source_id") = "");

  m.def(
      "normalize",
      [](const py::object& table, const std::string& baseline, const std::string& x_key,
         const std::vector<std::string>& group_keys, const std::string& anchor) {
        ktune::report::NormalizeOptions opt;
        opt.x_key = x_key;
        opt.group_keys = group_keys;
        if (anchor == "global") {
          opt.anchor = ktune::report::Anchor::kGlobal;
        } else if (anchor != "per-group") {
          throw ktune::Error("anchor must be per-group or global");
        }
        py::list out;
        for (const auto& r : ktune::report::normalize(table_of(table), baseline, opt)) {
          py::dict d;
          d["impl"] = r.row.impl;
          d["shape"] = to_py(r.row.shape.to_json());
          d["median_ms"] = r.row.median_ms;
          d["normalized"] = r.normalized;
          out.append(d);
        }
        return out;
      },
      py::arg("table"), py::arg("baseline"), py::arg("x_key") = "batch_size",
      py::arg("group_keys") = std::vector<std::string>{}, py::arg("anchor") = "per-group",
      "Table is CSV text or a list of {impl, shape, median_ms} dicts.");
  m.def(
      "relative_cdf",
      [](const py::object& table, const std::string& baseline, const std::string& candidate) {
        auto t = table_of(table);
        std::vector<ktune::report::BenchmarkRow> base, cand;
        for (const auto& r : t.rows()) {
          if (r.impl == baseline) base.push_back(r);
          if (r.impl == candidate) cand.push_back(r);
        }
        return to_py(ktune::report::relative_cdf(cand, base).to_json());
      },
      py::arg("table"), py::arg("baseline"), py::arg("candidate"));
}
