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
#include <iomanip>
#include <iostream>
#include <iterator>
#include <memory>
#include <sstream>

#include <spdlog/spdlog.h>

#include "cli.hpp"
#include "commands.hpp"
#include "ktune/cache.hpp"
#include "ktune/error.hpp"

namespace ktune::cli {
namespace {

struct CacheFlags {
  std::string cache_dir;
  std::string key;
  std::vector<std::string> keys;
  std::string file;
  bool json = false;
  bool force = false;
};

CacheStore open_store(const CacheFlags& f) {
  std::filesystem::path root = f.cache_dir.empty() ? CacheStore::default_root()
                                                   : std::filesystem::path(f.cache_dir);
  return CacheStore(root, [](const std::string& msg) { spdlog::warn("{}", msg); });
}

std::string median_text(const CacheEntry& e) {
  std::ostringstream os;
  if (e.result.best_median_ms) os << std::setprecision(6) << *e.result.best_median_ms;
  return os.str();
}

int list_entries(const CacheFlags& f) {
  CacheStore store = open_store(f);
  auto entries = store.list();
  if (f.json) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : entries) {
      rows.push_back({{"key", e.key.str()},
                      {"short_key", e.key.short_str()},
                      {"device", e.result.fingerprint.device_name},
                      {"shape", e.result.shape.to_json()},
                      {"best_median_ms", e.result.best_median_ms.value_or(0.0)},
                      {"created_at", e.created_at}});
    }
    std::cout << rows.dump(2) << '\n';
    return kExitOk;
  }
  std::size_t shape_width = 5;
  for (const auto& e : entries) shape_width = std::max(shape_width, e.result.shape.describe().size());
  std::cout << std::left << std::setw(18) << "KEY" << ' ' << std::setw(16) << "DEVICE" << ' '
            << std::setw(static_cast<int>(shape_width)) << "SHAPE" << ' ' << "MEDIAN_MS\n";
  for (const auto& e : entries) {
    std::cout << std::setw(18) << e.key.short_str() << ' ' << std::setw(16)
              << e.result.fingerprint.device_name << ' ' << std::setw(static_cast<int>(shape_width))
              << e.result.shape.describe() << ' ' << median_text(e) << '\n';
  }
  return kExitOk;
}

int show_entry(const CacheFlags& f) {
  CacheStore store = open_store(f);
  auto entry = store.find(f.key);
  if (!entry) {
    std::cerr << "ktune: no unique cache entry matches `" << f.key << "`\n";
    return kExitNotFound;
  }
  std::cout << entry->to_json().dump(2) << '\n';
  return kExitOk;
}

int invalidate_entry(const CacheFlags& f) {
  CacheStore store = open_store(f);
  auto entry = store.find(f.key);
  if (!entry || !store.invalidate(entry->key)) {
    std::cerr << "ktune: no unique cache entry matches `" << f.key << "`\n";
    return kExitNotFound;
  }
  std::cout << "invalidated " << entry->key.str() << '\n';
  return kExitOk;
}

int export_entries(const CacheFlags& f) {
  CacheStore store = open_store(f);
  std::vector<CacheKey> keys;
  for (const auto& k : f.keys) {
    auto entry = store.find(k);
    if (!entry) {
      std::cerr << "ktune: no unique cache entry matches `" << k << "`\n";
      return kExitNotFound;
    }
    keys.push_back(entry->key);
  }
  std::string text = store.export_bundle(keys).dump(2) + "\n";
  if (f.file.empty() || f.file == "-") {
    std::cout << text;
  } else {
    write_text(f.file, text);
  }
  return kExitOk;
}

int import_entries(const CacheFlags& f) {
  CacheStore store = open_store(f);
  nlohmann::json bundle;
  try {
    bundle = nlohmann::json::parse(f.file == "-" ? std::string(std::istreambuf_iterator<char>(std::cin), {})
                                                 : read_text(f.file));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), f.file);
  }
  std::size_t changed = store.import_bundle(bundle, f.force);
  std::cout << "imported " << changed << " entries\n";
  return kExitOk;
}

}  // namespace

void add_cache_command(CLI::App& app, int& exit_code) {
  auto flags = std::make_shared<CacheFlags>();
  auto* cache = app.add_subcommand("cache", "Manage the result cache");
  cache->require_subcommand(1);
  cache->fallthrough();
  cache->add_option("--cache-dir", flags->cache_dir, "Cache store (default $KTUNE_CACHE_DIR)");

  auto* list = cache->add_subcommand("list", "List cached results");
  list->add_flag("--json", flags->json, "Machine-readable output");
  list->callback([flags, &exit_code] { exit_code = list_entries(*flags); });

  auto* show = cache->add_subcommand("show", "Print one cached result");
  show->add_option("key", flags->key, "Full or short key, or a unique prefix")->required();
  show->callback([flags, &exit_code] { exit_code = show_entry(*flags); });

  auto* invalidate = cache->add_subcommand("invalidate", "Remove one cached result");
  invalidate->add_option("key", flags->key, "Full or short key, or a unique prefix")->required();
  invalidate->callback([flags, &exit_code] { exit_code = invalidate_entry(*flags); });

  auto* exp = cache->add_subcommand("export", "Write cached results as a bundle");
  exp->add_option("-o,--output", flags->file, "Bundle file (default stdout)");
  exp->add_option("keys", flags->keys, "Entries to export (default all)");
  exp->callback([flags, &exit_code] { exit_code = export_entries(*flags); });

  auto* imp = cache->add_subcommand("import", "Merge a bundle into the store");
  imp->add_option("bundle", flags->file, "Bundle file, or - for stdin")->required();
  imp->add_flag("--force", flags->force, "Overwrite entries even if worse");
  imp->callback([flags, &exit_code] { exit_code = import_entries(*flags); });
}

}  // namespace ktune::cli
