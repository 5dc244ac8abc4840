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

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ktune/configspace.hpp"
#include "ktune/executor.hpp"
#include "ktune/search.hpp"

namespace ktune::report {

struct BenchmarkRow {
  std::string impl;
  ShapeKey shape;
  double median_ms;
};

// Benchmark records. (impl, shape) pairs are unique and medians positive.
//
// CSV form: header `impl,<dim>...,median_ms`, one row per record. Dimension
// cells are parsed as integers or booleans where possible, else strings.
class BenchmarkTable {
 public:
  explicit BenchmarkTable(std::vector<BenchmarkRow> rows);
  static BenchmarkTable from_csv(std::string_view text);
  static BenchmarkTable load_csv(const std::string& path);

  const std::vector<BenchmarkRow>& rows() const { return rows_; }
  // Union of shape dimension names, sorted.
  std::vector<std::string> dims() const;
  std::string to_csv() const;

 private:
  std::vector<BenchmarkRow> rows_;
};

enum class Anchor {
  kPerGroup,  // baseline at the smallest x of each group
  kGlobal,    // one baseline row (smallest x overall) for the whole table
};

struct NormalizeOptions {
  std::string x_key = "batch_size";
  // Empty: every shape dimension except x_key.
  std::vector<std::string> group_keys;
  Anchor anchor = Anchor::kPerGroup;
};

struct NormalizedRow {
  BenchmarkRow row;
  double normalized;
};

// Divides every median by the baseline's median at the leftmost x of its
// group. Rows keep input order. Throws ktune::Error naming the group when a
// group has no baseline row.
std::vector<NormalizedRow> normalize(const BenchmarkTable& table,
                                     const std::string& baseline_impl,
                                     const NormalizeOptions& options = {});
std::string normalized_csv(std::span<const NormalizedRow> rows,
                           const std::vector<std::string>& dims);

struct RatioPoint {
  ShapeKey shape;
  double ratio;  // baseline / candidate, > 1 means the candidate is faster
};

struct CdfSummary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double frac_ge_1 = 0.0;
};

struct RelativeCdf {
  std::vector<RatioPoint> points;  // ascending by ratio
  CdfSummary summary;

  // Columns: rank,ratio,cdf,shape
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

// Shapes must match one-to-one; otherwise throws ktune::Error listing the
// unmatched shapes.
RelativeCdf relative_cdf(std::span<const BenchmarkRow> candidate,
                         std::span<const BenchmarkRow> baseline);

struct TransferCell {
  std::string source_platform;  // fingerprint digests
  std::string target_platform;
  ShapeKey shape;
  std::optional<std::string> config_digest;
  std::optional<double> native_best_ms;
  std::optional<double> transferred_ms;
  // Set when the foreign config failed validation or evaluation on the
  // target; such cells carry no transferred_ms.
  std::optional<std::string> invalid_reason;
  // native_best_ms / transferred_ms
  std::optional<double> relative_perf;

  bool invalid() const { return invalid_reason.has_value(); }
};

// Runs each shape's best config from platform A on platform B and compares
// it with B's own best. Results are matched by shape; all must share one
// space digest.
std::vector<TransferCell> transfer_analysis(std::span<const TuningResult> from,
                                            const ConfigSpace& space,
                                            Evaluator& target,
                                            std::span<const TuningResult> to,
                                            const EvalPlan& plan = {});

// Columns: shape,source_platform,target_platform,config,native_best_ms,
// transferred_ms,relative_perf,status,reason
std::string transfer_csv(std::span<const TransferCell> cells);
nlohmann::json transfer_json(std::span<const TransferCell> cells);

}  // namespace ktune::report
