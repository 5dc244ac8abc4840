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

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace ktune::asmstats {

struct AsmDoc {
  std::string source_id;
  std::string text;
};

struct ParseResult {
  std::vector<std::string> mnemonics;
  // Statements that were neither instructions nor skippable syntax.
  std::uint64_t skipped_fragments = 0;
};

struct AsmStats {
  std::string source_id;
  std::uint64_t unique_mnemonics = 0;
  std::uint64_t total_instructions = 0;
  std::map<std::string, std::uint64_t> histogram;
  std::uint64_t skipped_fragments = 0;
};

// Splits a listing into statements (on ';' and newlines, after removing
// `//` and `/* */` comments) and returns one mnemonic per instruction: the
// first token with all its dot-joined qualifiers, e.g. `ld.global.v4.b32`.
// Directives (first token starts with '.'), labels (`name:`), predicate
// guards (`@%p1`, `@!%p1`) and lone braces are skipped. Operands never
// influence the result.
ParseResult parse_asm(std::string_view text);
AsmStats stats(const AsmDoc& doc);

struct DiversityRow {
  std::string source_id;
  std::uint64_t unique_mnemonics = 0;
  std::uint64_t total_instructions = 0;
  bool best = false;
};

struct DiversityReport {
  std::vector<DiversityRow> rows;  // input order
  std::string best_id;             // "none" when absent
  std::uint64_t max_unique = 0;
  std::uint64_t max_total = 0;

  // Columns: source_id,unique,total,best
  std::string to_csv() const;
  // {sources:[{id,unique,total}], best_id, max_unique, max_total}
  nlohmann::json to_json() const;
};

// Throws ktune::Error on duplicate source ids. A best_id that is not in the
// list is reported as "none".
DiversityReport diversity_report(std::span<const AsmStats> stats,
                                 std::optional<std::string> best_id);

}  // namespace ktune::asmstats
