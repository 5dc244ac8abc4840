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

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ktune/search.hpp"

namespace ktune {

struct CacheKey {
  std::string fingerprint_digest;
  std::string shape_digest;

  static CacheKey of(const EnvFingerprint& fp, const ShapeKey& shape);
  // "<fingerprint_digest>-<shape_digest>"
  std::string str() const;
  // "<fingerprint8>-<shape8>"
  std::string short_str() const;
  friend auto operator<=>(const CacheKey&, const CacheKey&) = default;
};

// One persisted tuning result. File format:
//   {format_version, created_at, framework_version, fingerprint, shape, result}
struct CacheEntry {
  CacheKey key;
  TuningResult result;
  std::string created_at;
  std::string framework_version;
  int format_version = 0;

  // Stamps the current UTC time and this build's versions.
  static CacheEntry make(TuningResult result);
  nlohmann::json to_json() const;
  // Throws ParseError on malformed content or unsupported format_version.
  static CacheEntry from_json(const nlohmann::json& j);
  std::string canonical() const;
  // Key digests match the result's fingerprint and shape, and the result has
  // a best config.
  void check() const;
};

enum class StoreStatus { kStored, kReplaced, kKeptExisting, kUnchanged };

struct StoreOutcome {
  StoreStatus status;
  std::filesystem::path path;
};

// Directory of `<fingerprint8>-<shape8>.result.json` files plus index.json.
//
// Writes go through a temp file and rename, so readers see the old entry or
// the new one, never a torn file. Writers serialize on a `.lock` file; a
// lock older than 60 s is considered stale and taken over. Readers never
// lock.
class CacheStore {
 public:
  using Warn = std::function<void(const std::string&)>;

  explicit CacheStore(std::filesystem::path root, Warn warn = {});

  // $KTUNE_CACHE_DIR, else $XDG_CACHE_HOME/ktune, else ~/.cache/ktune.
  static std::filesystem::path default_root();

  const std::filesystem::path& root() const { return root_; }

  // Corrupt entries are reported through `warn` and treated as misses.
  // Throws CacheError when the store exists but cannot be read.
  std::optional<CacheEntry> lookup(const EnvFingerprint& fp, const ShapeKey& shape) const;
  std::optional<CacheEntry> lookup(const CacheKey& key) const;

  // Replaces an existing entry only if the new best median is not worse, or
  // if `force` is set.
  StoreOutcome store(const CacheEntry& entry, bool force = false);

  std::vector<CacheEntry> list() const;
  // Accepts a full key, a short key, or any unique prefix of either.
  std::optional<CacheEntry> find(std::string_view key) const;
  bool invalidate(const CacheKey& key);

  // All entries when `keys` is empty. Throws CacheError for unknown keys.
  nlohmann::json export_bundle(const std::vector<CacheKey>& keys = {}) const;
  // Returns the number of entries that changed the store.
  std::size_t import_bundle(const nlohmann::json& bundle, bool force = false);

  static constexpr int kStaleLockSeconds = 60;

 private:
  std::filesystem::path entry_path(const CacheKey& key) const;
  std::optional<CacheEntry> read_entry(const std::filesystem::path& path,
                                       const CacheKey* expect) const;
  nlohmann::json read_index() const;
  void write_index(const nlohmann::json& index);
  void check_readable() const;
  void warn(const std::string& msg) const;

  std::filesystem::path root_;
  Warn warn_;
};

}  // namespace ktune
