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

#include <iostream>
#include <memory>

#include "cli.hpp"
#include "commands.hpp"
#include "ktune/cache.hpp"
#include "ktune/error.hpp"
#include "ktune/report.hpp"
#include "ktune/runner.hpp"
#include "ktune/synthetic.hpp"

namespace ktune::cli {
namespace {

struct ReportFlags {
  std::string table;
  std::string baseline;
  std::string candidate;
  std::string x_key = "batch_size";
  std::vector<std::string> group_keys;
  std::string anchor = "per-group";
  std::vector<std::string> from;
  std::vector<std::string> to;
  std::string space;
  std::string runner;
  std::string synthetic;
  int warmups = 3;
  int reps = 10;
  int timeout_ms = 2000;
  std::string output;
  bool json = false;
};

void emit(const ReportFlags& f, const std::string& text) {
  if (f.output.empty() || f.output == "-") {
    std::cout << text;
  } else {
    write_text(f.output, text);
  }
}

std::vector<report::BenchmarkRow> rows_of(const report::BenchmarkTable& table,
                                          const std::string& impl) {
  std::vector<report::BenchmarkRow> out;
  for (const auto& r : table.rows()) {
    if (r.impl == impl) out.push_back(r);
  }
  if (out.empty()) throw UsageError("no rows for implementation `" + impl + "`");
  return out;
}

// A file holds either one cache entry or an exported bundle.
std::vector<TuningResult> load_results(const std::vector<std::string>& files) {
  std::vector<TuningResult> out;
  for (const auto& file : files) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_text(file));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(e.what(), file);
    }
    if (j.is_object() && j.contains("entries")) {
      for (const auto& e : j.at("entries")) out.push_back(CacheEntry::from_json(e).result);
    } else {
      out.push_back(CacheEntry::from_json(j).result);
    }
  }
  return out;
}

int run_normalize(const ReportFlags& f) {
  auto table = report::BenchmarkTable::load_csv(f.table);
  report::NormalizeOptions opts;
  opts.x_key = f.x_key;
  opts.group_keys = f.group_keys;
  opts.anchor = f.anchor == "global" ? report::Anchor::kGlobal : report::Anchor::kPerGroup;
  auto rows = report::normalize(table, f.baseline, opts);
  emit(f, report::normalized_csv(rows, table.dims()));
  return kExitOk;
}

int run_cdf(const ReportFlags& f) {
  auto table = report::BenchmarkTable::load_csv(f.table);
  auto cdf = report::relative_cdf(rows_of(table, f.candidate), rows_of(table, f.baseline));
  emit(f, f.json ? cdf.to_json().dump(2) + "\n" : cdf.to_csv());
  return kExitOk;
}

int run_transfer(const ReportFlags& f) {
  if (f.runner.empty() == f.synthetic.empty()) {
    throw UsageError("transfer needs exactly one of --runner or --synthetic");
  }
  ConfigSpace space = load_space(f.space);
  auto from = load_results(f.from);
  auto to = load_results(f.to);
  std::unique_ptr<Evaluator> target;
  if (!f.synthetic.empty()) {
    target = std::make_unique<SyntheticEvaluator>(CostProfile::load(f.synthetic), space);
  } else {
    target = std::make_unique<RunnerEvaluator>(f.runner, space.digest());
  }
  EvalPlan plan;
  plan.warmups = f.warmups;
  plan.reps = f.reps;
  plan.timeout_ms = f.timeout_ms;
  auto cells = report::transfer_analysis(from, space, *target, to, plan);
  emit(f, f.json ? report::transfer_json(cells).dump(2) + "\n" : report::transfer_csv(cells));
  return kExitOk;
}

}  // namespace

void add_report_command(CLI::App& app, int& exit_code) {
  auto flags = std::make_shared<ReportFlags>();
  auto* rep = app.add_subcommand("report", "Normalize benchmarks and compare platforms");
  rep->require_subcommand(1);

  auto* norm = rep->add_subcommand("normalize", "Scale medians by the baseline's anchor row");
  norm->add_option("table", flags->table, "Benchmark CSV (impl,<dims>...,median_ms)")
      ->required()
      ->check(CLI::ExistingFile);
  norm->add_option("--baseline", flags->baseline, "Baseline implementation")->required();
  norm->add_option("--x-key", flags->x_key, "Dimension on the x axis");
  norm->add_option("--group-key", flags->group_keys, "Grouping dimension (repeatable)");
  norm->add_option("--anchor", flags->anchor, "per-group|global")
      ->check(CLI::IsMember({"per-group", "global"}));
  norm->add_option("-o,--output", flags->output, "Output file (default stdout)");
  norm->callback([flags, &exit_code] { exit_code = run_normalize(*flags); });

  auto* cdf = rep->add_subcommand("cdf", "Distribution of baseline/candidate latency ratios");
  cdf->add_option("table", flags->table, "Benchmark CSV")->required()->check(CLI::ExistingFile);
  cdf->add_option("--baseline", flags->baseline, "Baseline implementation")->required();
  cdf->add_option("--candidate", flags->candidate, "Candidate implementation")->required();
  cdf->add_flag("--json", flags->json, "JSON output with summary");
  cdf->add_option("-o,--output", flags->output, "Output file (default stdout)");
  cdf->callback([flags, &exit_code] { exit_code = run_cdf(*flags); });

  auto* tr = rep->add_subcommand("transfer", "Evaluate one platform's best configs on another");
  tr->add_option("--from", flags->from, "Source results (entry or bundle files)")
      ->required()
      ->check(CLI::ExistingFile);
  tr->add_option("--to", flags->to, "Target-native results (entry or bundle files)")
      ->required()
      ->check(CLI::ExistingFile);
  tr->add_option("--space", flags->space, "Space definition file")->required()->check(CLI::ExistingFile);
  tr->add_option("--runner", flags->runner, "Runner command for the target platform");
  tr->add_option("--synthetic", flags->synthetic, "Synthetic profile for the target platform");
  tr->add_option("--warmups", flags->warmups, "Warm-up runs per evaluation");
  tr->add_option("--reps", flags->reps, "Timed repetitions per evaluation");
  tr->add_option("--timeout-ms", flags->timeout_ms, "Timeout per evaluation");
  tr->add_flag("--json", flags->json, "JSON output");
  tr->add_option("-o,--output", flags->output, "Output file (default stdout)");
  tr->callback([flags, &exit_code] { exit_code = run_transfer(*flags); });
}

}  // namespace ktune::cli
