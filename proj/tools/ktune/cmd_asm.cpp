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

#include <algorithm>
#include <iostream>
#include <memory>

#include "cli.hpp"
#include "commands.hpp"
#include "ktune/asmstats.hpp"

namespace ktune::cli {
namespace {

namespace fs = std::filesystem;

bool is_asm_file(const fs::path& p) {
  auto ext = p.extension().string();
  return ext == ".ptx" || ext == ".s" || ext == ".asm";
}

// Directories contribute their assembly files sorted by path; the source id
// is the file stem.
std::vector<asmstats::AsmDoc> collect_docs(const std::vector<std::string>& inputs) {
  std::vector<asmstats::AsmDoc> docs;
  for (const auto& input : inputs) {
    fs::path p(input);
    std::vector<fs::path> files;
    if (fs::is_directory(p)) {
      for (const auto& e : fs::recursive_directory_iterator(p)) {
        if (e.is_regular_file() && is_asm_file(e.path())) files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
    } else {
      files.push_back(p);
    }
    for (const auto& f : files) docs.push_back({f.stem().string(), read_text(f)});
  }
  return docs;
}

}  // namespace

void add_analyze_asm_command(CLI::App& app, int& exit_code) {
  auto inputs = std::make_shared<std::vector<std::string>>();
  auto best = std::make_shared<std::string>();
  auto out_dir = std::make_shared<std::string>(".");
  auto* cmd = app.add_subcommand("analyze-asm", "Count instruction mnemonics in assembly listings");
  cmd->add_option("inputs", *inputs, "Assembly files or directories (.ptx, .s, .asm)")
      ->required()
      ->check(CLI::ExistingPath);
  cmd->add_option("--best", *best, "Source id to mark as best");
  cmd->add_option("--out-dir", *out_dir, "Where to write diversity.csv and diversity.json");
  cmd->callback([inputs, best, out_dir, &exit_code] {
    auto docs = collect_docs(*inputs);
    if (docs.empty()) throw UsageError("no assembly files found");
    std::vector<asmstats::AsmStats> all;
    for (const auto& d : docs) all.push_back(asmstats::stats(d));
    std::optional<std::string> best_id;
    if (!best->empty()) best_id = *best;
    auto report = asmstats::diversity_report(all, best_id);
    fs::path dir(*out_dir);
    write_text(dir / "diversity.csv", report.to_csv());
    write_text(dir / "diversity.json", report.to_json().dump(2) + "\n");
    std::cout << report.to_csv();
    exit_code = kExitOk;
  });
}

}  // namespace ktune::cli
