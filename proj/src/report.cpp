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

#include "ktune/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ktune/error.hpp"

namespace ktune::report {
namespace {

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string shape_cell(const ShapeKey& shape) {
  std::string out;
  for (const auto& [k, v] : shape.values()) {
    if (!out.empty()) out += ';';
    out += k + "=" + to_string(v);
  }
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  for (auto& cell : out) {
    auto b = cell.find_first_not_of(" \t");
    auto e = cell.find_last_not_of(" \t");
    cell = b == std::string::npos ? std::string() : cell.substr(b, e - b + 1);
  }
  return out;
}

// Orders x-axis values; ints numerically, strings lexicographically.
bool x_less(const Value& a, const Value& b, const std::string& key) {
  if (type_of(a) != type_of(b)) {
    throw Error("x-axis `" + key + "` mixes value types");
  }
  return a < b;
}

std::string group_name(const std::vector<std::string>& keys, const ShapeKey& shape) {
  std::string out;
  for (const auto& k : keys) {
    if (!out.empty()) out += ",";
    const Value* v = shape.find(k);
    out += k + "=" + (v ? to_string(*v) : std::string("?"));
  }
  return out.empty() ? "<all>" : out;
}

}  // namespace

BenchmarkTable::BenchmarkTable(std::vector<BenchmarkRow> rows) : rows_(std::move(rows)) {
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : rows_) {
    if (!(r.median_ms > 0.0)) {
      throw Error("median_ms must be positive for " + r.impl + " " + r.shape.describe());
    }
    if (!seen.emplace(r.impl, r.shape.digest()).second) {
      throw Error("duplicate row for " + r.impl + " " + r.shape.describe());
    }
  }
}

BenchmarkTable BenchmarkTable::from_csv(std::string_view text) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(line);
  }
  if (lines.empty()) throw ParseError("empty benchmark CSV");
  auto header = split_csv_line(lines[0]);
  auto col = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError("benchmark CSV has no `" + name + "` column");
    return static_cast<std::size_t>(it - header.begin());
  };
  std::size_t impl_col = col("impl");
  std::size_t median_col = col("median_ms");
  std::vector<BenchmarkRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto cells = split_csv_line(lines[i]);
    if (cells.size() != header.size()) {
      throw ParseError("row has " + std::to_string(cells.size()) + " cells, header has " +
                       std::to_string(header.size()), "line " + std::to_string(i + 1));
    }
    ScalarMap::Map dims;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == impl_col || c == median_col || cells[c].empty()) continue;
      dims.emplace(header[c], parse_scalar(cells[c]));
    }
    double median = 0.0;
    const auto& m = cells[median_col];
    auto [ptr, ec] = std::from_chars(m.data(), m.data() + m.size(), median);
    if (ec != std::errc() || ptr != m.data() + m.size()) {
      throw ParseError("bad median_ms `" + m + "`", "line " + std::to_string(i + 1));
    }
    rows.push_back({cells[impl_col], ShapeKey(std::move(dims)), median});
  }
  return BenchmarkTable(std::move(rows));
}

BenchmarkTable BenchmarkTable::load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return from_csv(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.bare_message(), e.context(), e.position());
  }
}

std::vector<std::string> BenchmarkTable::dims() const {
  std::set<std::string> names;
  for (const auto& r : rows_) {
    for (const auto& [k, v] : r.shape.values()) names.insert(k);
  }
  return {names.begin(), names.end()};
}

std::string BenchmarkTable::to_csv() const {
  auto names = dims();
  std::ostringstream os;
  os << "impl";
  for (const auto& d : names) os << ',' << d;
  os << ",median_ms\n";
  for (const auto& r : rows_) {
    os << csv_escape(r.impl);
    for (const auto& d : names) {
      const Value* v = r.shape.find(d);
      os << ',' << (v ? csv_escape(to_string(*v)) : "");
    }
    os << ',' << fmt(r.median_ms) << '\n';
  }
  return os.str();
}

std::vector<NormalizedRow> normalize(const BenchmarkTable& table,
                                     const std::string& baseline_impl,
                                     const NormalizeOptions& options) {
  std::vector<std::string> group_keys = options.group_keys;
  if (group_keys.empty()) {
    for (const auto& d : table.dims()) {
      if (d != options.x_key) group_keys.push_back(d);
    }
  }
  struct AnchorRow {
    Value x;
    double median;
  };
  std::map<std::string, AnchorRow> anchors;
  std::optional<std::pair<std::string, AnchorRow>> global;
  for (const auto& r : table.rows()) {
    const Value* x = r.shape.find(options.x_key);
    if (x == nullptr) {
      throw Error("row " + r.impl + " " + r.shape.describe() + " has no x-axis dimension `" +
                  options.x_key + "`");
    }
    if (r.impl != baseline_impl) continue;
    auto g = group_name(group_keys, r.shape);
    auto it = anchors.find(g);
    if (it == anchors.end() || x_less(*x, it->second.x, options.x_key)) {
      anchors.insert_or_assign(g, AnchorRow{*x, r.median_ms});
    }
  }
  for (const auto& [g, a] : anchors) {
    if (!global || x_less(a.x, global->second.x, options.x_key)) global.emplace(g, a);
  }

  std::vector<NormalizedRow> out;
  out.reserve(table.rows().size());
  for (const auto& r : table.rows()) {
    auto g = group_name(group_keys, r.shape);
    auto it = anchors.find(g);
    if (it == anchors.end()) {
      throw Error("group " + g + " has no baseline `" + baseline_impl + "` row");
    }
    double anchor = options.anchor == Anchor::kGlobal ? global->second.median
                                                              : it->second.median;
    out.push_back({r, r.median_ms / anchor});
  }
  return out;
}

std::string normalized_csv(std::span<const NormalizedRow> rows,
                           const std::vector<std::string>& dims) {
  std::ostringstream os;
  os << "impl";
  for (const auto& d : dims) os << ',' << d;
  os << ",median_ms,normalized\n";
  for (const auto& n : rows) {
    os << csv_escape(n.row.impl);
    for (const auto& d : dims) {
      const Value* v = n.row.shape.find(d);
      os << ',' << (v ? csv_escape(to_string(*v)) : "");
    }
    os << ',' << fmt(n.row.median_ms) << ',' << fmt(n.normalized) << '\n';
  }
  return os.str();
}

RelativeCdf relative_cdf(std::span<const BenchmarkRow> candidate,
                         std::span<const BenchmarkRow> baseline) {
  std::map<std::string, const BenchmarkRow*> base;
  for (const auto& b : baseline) {
    if (!base.emplace(b.shape.digest(), &b).second) {
      throw Error("baseline has two rows for shape " + b.shape.describe());
    }
  }
  std::set<std::string> cand_shapes;
  std::vector<std::string> unmatched;
  RelativeCdf cdf;
  for (const auto& c : candidate) {
    if (!cand_shapes.insert(c.shape.digest()).second) {
      throw Error("candidate has two rows for shape " + c.shape.describe());
    }
    auto it = base.find(c.shape.digest());
    if (it == base.end()) {
      unmatched.push_back("candidate " + c.shape.describe());
      continue;
    }
    cdf.points.push_back({c.shape, it->second->median_ms / c.median_ms});
  }
  for (const auto& [digest, row] : base) {
    if (!cand_shapes.count(digest)) unmatched.push_back("baseline " + row->shape.describe());
  }
  if (!unmatched.empty()) {
    std::string msg = "shapes do not match one-to-one:";
    for (const auto& u : unmatched) msg += " " + u + ";";
    throw Error(msg);
  }
  if (cdf.points.empty()) throw Error("no rows to compare");
  std::stable_sort(cdf.points.begin(), cdf.points.end(),
                   [](const RatioPoint& a, const RatioPoint& b) {
                     return a.ratio < b.ratio ||
                            (a.ratio == b.ratio && a.shape.digest() < b.shape.digest());
                   });
  double sum = 0.0;
  std::size_t ge1 = 0;
  for (const auto& p : cdf.points) {
    sum += p.ratio;
    if (p.ratio >= 1.0) ++ge1;
  }
  auto n = static_cast<double>(cdf.points.size());
  cdf.summary = {sum / n, cdf.points.front().ratio, cdf.points.back().ratio, ge1 / n};
  return cdf;
}

std::string RelativeCdf::to_csv() const {
  std::ostringstream os;
  os << "rank,ratio,cdf,shape\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    os << i + 1 << ',' << fmt(points[i].ratio) << ','
       << fmt(static_cast<double>(i + 1) / static_cast<double>(points.size())) << ','
       << csv_escape(shape_cell(points[i].shape)) << '\n';
  }
  return os.str();
}

nlohmann::json RelativeCdf::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    pts.push_back({{"shape", points[i].shape.to_json()},
                   {"ratio", points[i].ratio},
                   {"cdf", static_cast<double>(i + 1) / static_cast<double>(points.size())}});
  }
  return {{"points", pts},
          {"summary",
           {{"mean", summary.mean},
            {"min", summary.min},
            {"max", summary.max},
            {"frac_ge_1", summary.frac_ge_1}}}};
}

std::vector<TransferCell> transfer_analysis(std::span<const TuningResult> from,
                                            const ConfigSpace& space, Evaluator& target,
                                            std::span<const TuningResult> to,
                                            const EvalPlan& plan) {
  std::map<std::string, const TuningResult*> native;
  for (const auto& r : to) {
    if (r.space_digest != space.digest()) {
      throw Error("target result for " + r.shape.describe() + " belongs to another space");
    }
    native.emplace(r.shape.digest(), &r);
  }
  std::vector<TransferCell> cells;
  for (const auto& src : from) {
    if (src.space_digest != space.digest()) {
      throw Error("source result for " + src.shape.describe() + " belongs to another space");
    }
    auto it = native.find(src.shape.digest());
    if (it == native.end()) {
      throw Error("no target result for shape " + src.shape.describe());
    }
    const TuningResult& dst = *it->second;
    TransferCell cell{src.fingerprint.digest(), dst.fingerprint.digest(), src.shape};
    cell.native_best_ms = dst.best_median_ms;
    if (!src.best) {
      cell.invalid_reason = "source platform has no viable configuration";
      cells.push_back(std::move(cell));
      continue;
    }
    cell.config_digest = src.best->digest();
    auto check = validate(space, *src.best);
    if (!check.valid) {
      std::string why = "violates";
      for (const auto& v : check.violations) why += " `" + v + "`";
      cell.invalid_reason = why;
      cells.push_back(std::move(cell));
      continue;
    }
    EvalOutcome outcome = target.evaluate(*src.best, src.shape, plan);
    if (const auto* ok = std::get_if<Ok>(&outcome)) {
      cell.transferred_ms = ok->measurement.median_ms();
      if (cell.native_best_ms) cell.relative_perf = *cell.native_best_ms / *cell.transferred_ms;
    } else if (const auto* inv = std::get_if<Invalid>(&outcome)) {
      cell.invalid_reason = inv->reason;
    } else {
      cell.invalid_reason = "failure: " + std::get<Failure>(outcome).reason;
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

std::string transfer_csv(std::span<const TransferCell> cells) {
  auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
  std::ostringstream os;
  os << "shape,source_platform,target_platform,config,native_best_ms,transferred_ms,"
        "relative_perf,status,reason\n";
  for (const auto& c : cells) {
    os << csv_escape(shape_cell(c.shape)) << ',' << c.source_platform << ','
       << c.target_platform << ',' << c.config_digest.value_or("") << ','
       << opt(c.native_best_ms) << ',' << opt(c.transferred_ms) << ','
       << opt(c.relative_perf) << ',' << (c.invalid() ? "invalid" : "ok") << ','
       << csv_escape(c.invalid_reason.value_or("")) << '\n';
  }
  return os.str();
}

nlohmann::json transfer_json(std::span<const TransferCell> cells) {
  auto opt = [](const auto& v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : cells) {
    out.push_back({{"shape", c.shape.to_json()},
                   {"source_platform", c.source_platform},
                   {"target_platform", c.target_platform},
                   {"config", opt(c.config_digest)},
                   {"native_best_ms", opt(c.native_best_ms)},
                   {"transferred_ms", opt(c.transferred_ms)},
                   {"relative_perf", opt(c.relative_perf)},
                   {"invalid", c.invalid()},
                   {"reason", opt(c.invalid_reason)}});
  }
  return out;
}

}  // namespace ktune::report
