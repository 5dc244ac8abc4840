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

#include "ktune/asmstats.hpp"

#include <cctype>
#include <set>
#include <sstream>

#include "ktune/error.hpp"

namespace ktune::asmstats {
namespace {

std::string strip_comments(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text.compare(i, 2, "/*") == 0) {
      auto end = text.find("*/", i + 2);
      // A block comment still separates tokens.
      out.push_back(' ');
      if (end == std::string_view::npos) break;
      for (std::size_t k = i; k < end; ++k) {
        if (text[k] == '\n') out.push_back('\n');
      }
      i = end + 2;
    } else if (text.compare(i, 2, "//") == 0) {
      auto end = text.find('\n', i);
      if (end == std::string_view::npos) break;
      i = end;
    } else {
      out.push_back(text[i++]);
    }
  }
  return out;
}

std::vector<std::string_view> tokens(std::string_view stmt) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < stmt.size()) {
    while (i < stmt.size() && std::isspace(static_cast<unsigned char>(stmt[i]))) ++i;
    std::size_t j = i;
    while (j < stmt.size() && !std::isspace(static_cast<unsigned char>(stmt[j]))) ++j;
    if (j > i) out.push_back(stmt.substr(i, j - i));
    i = j;
  }
  return out;
}

bool is_mnemonic(std::string_view tok) {
  auto head = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
  if (tok.empty() || !head(tok[0])) return false;
  for (char c : tok) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.') return false;
  }
  return tok.back() != '.';
}

}  // namespace

ParseResult parse_asm(std::string_view text) {
  ParseResult result;
  const std::string clean = strip_comments(text);
  std::size_t start = 0;
  while (start <= clean.size()) {
    std::size_t end = clean.find_first_of(";\n", start);
    if (end == std::string::npos) end = clean.size();
    std::string_view stmt(clean.data() + start, end - start);
    start = end + 1;

    auto toks = tokens(stmt);
    if (toks.empty() || toks.front().front() == '.') continue;
    std::size_t k = 0;
    while (k < toks.size()) {
      auto t = toks[k];
      if (t == "{" || t == "}" || t.back() == ':' || t.front() == '@') {
        ++k;
        continue;
      }
      break;
    }
    if (k == toks.size() || toks[k].front() == '.') continue;
    if (is_mnemonic(toks[k])) {
      result.mnemonics.emplace_back(toks[k]);
    } else {
      ++result.skipped_fragments;
    }
  }
  return result;
}

AsmStats stats(const AsmDoc& doc) {
  AsmStats s;
  s.source_id = doc.source_id;
  auto parsed = parse_asm(doc.text);
  for (const auto& m : parsed.mnemonics) ++s.histogram[m];
  s.unique_mnemonics = s.histogram.size();
  s.total_instructions = parsed.mnemonics.size();
  s.skipped_fragments = parsed.skipped_fragments;
  return s;
}

std::string DiversityReport::to_csv() const {
  std::ostringstream os;
  os << "source_id,unique,total,best\n";
  for (const auto& r : rows) {
    os << r.source_id << ',' << r.unique_mnemonics << ',' << r.total_instructions << ','
       << (r.best ? "true" : "false") << '\n';
  }
  return os.str();
}

nlohmann::json DiversityReport::to_json() const {
  nlohmann::json sources = nlohmann::json::array();
  for (const auto& r : rows) {
    sources.push_back(
        {{"id", r.source_id}, {"unique", r.unique_mnemonics}, {"total", r.total_instructions}});
  }
  return {{"sources", sources},
          {"best_id", best_id},
          {"max_unique", max_unique},
          {"max_total", max_total}};
}

DiversityReport diversity_report(std::span<const AsmStats> stats,
                                 std::optional<std::string> best_id) {
  DiversityReport report;
  report.best_id = "none";
  std::set<std::string> seen;
  for (const auto& s : stats) {
    if (!seen.insert(s.source_id).second) {
      throw Error("duplicate source id `" + s.source_id + "`");
    }
    DiversityRow row{s.source_id, s.unique_mnemonics, s.total_instructions,
                     best_id && *best_id == s.source_id};
    if (row.best) report.best_id = s.source_id;
    report.max_unique = std::max(report.max_unique, row.unique_mnemonics);
    report.max_total = std::max(report.max_total, row.total_instructions);
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace ktune::asmstats
