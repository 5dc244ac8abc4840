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

#include "ktune/cache.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "ktune/digest.hpp"
#include "ktune/error.hpp"

namespace ktune {
namespace fs = std::filesystem;

namespace {

constexpr const char* kIndexName = "index.json";
constexpr const char* kLockName = ".lock";
constexpr const char* kEntrySuffix = ".result.json";
constexpr int kLockWaitMs = 30000;

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const fs::path& path, const std::string& data) {
  static std::atomic<unsigned> counter{0};
  fs::path tmp = path.parent_path() /
                 (".tmp-" + std::to_string(getpid()) + "-" +
                  std::to_string(counter++) + "-" + path.filename().string());
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) {
    throw CacheError("cannot write " + tmp.string() + ": " + std::strerror(errno));
  }
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      int err = errno;
      ::close(fd);
      fs::remove(tmp);
      throw CacheError("cannot write " + tmp.string() + ": " + std::strerror(err));
    }
    off += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw CacheError("cannot rename into " + path.string() + ": " + ec.message());
  }
}

// Advisory single-writer lock. Threads of one process also contend through
// the file, so no extra mutex is needed.
class StoreLock {
 public:
  explicit StoreLock(const fs::path& root) : path_(root / kLockName) {
    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(kLockWaitMs);
    while (true) {
      int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0644);
      if (fd >= 0) {
        std::string pid = std::to_string(getpid()) + "\n";
        (void)!::write(fd, pid.data(), pid.size());
        ::close(fd);
        return;
      }
      if (errno != EEXIST) {
        throw CacheError("cannot create lock " + path_.string() + ": " + std::strerror(errno));
      }
      std::error_code ec;
      auto mtime = fs::last_write_time(path_, ec);
      if (!ec && fs::file_time_type::clock::now() - mtime >
                     std::chrono::seconds(CacheStore::kStaleLockSeconds)) {
        fs::remove(path_, ec);
        continue;
      }
      if (std::chrono::steady_clock::now() > deadline) {
        throw CacheError("timed out waiting for cache lock " + path_.string());
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
  }
  ~StoreLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  StoreLock(const StoreLock&) = delete;
  StoreLock& operator=(const StoreLock&) = delete;

 private:
  fs::path path_;
};

}  // namespace

CacheKey CacheKey::of(const EnvFingerprint& fp, const ShapeKey& shape) {
  return {fp.digest(), shape.digest()};
}

std::string CacheKey::str() const { return fingerprint_digest + "-" + shape_digest; }

std::string CacheKey::short_str() const {
  return fingerprint_digest.substr(0, 8) + "-" + shape_digest.substr(0, 8);
}

CacheEntry CacheEntry::make(TuningResult result) {
  CacheKey key = CacheKey::of(result.fingerprint, result.shape);
  return {std::move(key), std::move(result), utc_now(), kFrameworkVersion,
          kCacheFormatVersion};
}

nlohmann::json CacheEntry::to_json() const {
  return {{"format_version", format_version},
          {"created_at", created_at},
          {"framework_version", framework_version},
          {"fingerprint", result.fingerprint.to_json()},
          {"shape", result.shape.to_json()},
          {"result", result.to_json()}};
}

CacheEntry CacheEntry::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("cache entry must be a JSON object");
  auto version = j.find("format_version");
  if (version == j.end() || !version->is_number_integer()) {
    throw ParseError("cache entry has no format_version");
  }
  if (version->get<int>() != kCacheFormatVersion) {
    throw ParseError("cache entry format_version " + std::to_string(version->get<int>()) +
                     " is not supported (this build reads " +
                     std::to_string(kCacheFormatVersion) + ")");
  }
  try {
    TuningResult result = TuningResult::from_json(j.at("result"));
    CacheKey key = CacheKey::of(result.fingerprint, result.shape);
    if (EnvFingerprint::from_json(j.at("fingerprint")).digest() != key.fingerprint_digest ||
        ShapeKey::from_json(j.at("shape")).digest() != key.shape_digest) {
      throw ParseError("cache entry header disagrees with its result");
    }
    return {std::move(key), std::move(result), j.at("created_at").get<std::string>(),
            j.at("framework_version").get<std::string>(), version->get<int>()};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed cache entry: ") + e.what());
  } catch (const ProtocolError& e) {
    throw ParseError(std::string("malformed cache entry: ") + e.what());
  }
}

std::string CacheEntry::canonical() const { return canonical_json(to_json()); }

void CacheEntry::check() const {
  if (result.fingerprint.digest() != key.fingerprint_digest) {
    throw CacheError("entry key does not match its fingerprint");
  }
  if (result.shape.digest() != key.shape_digest) {
    throw CacheError("entry key does not match its shape");
  }
  if (!result.viable() || !result.best_median_ms) {
    throw CacheError("refusing to cache a result without a viable configuration");
  }
}

CacheStore::CacheStore(fs::path root, Warn warn)
    : root_(std::move(root)), warn_(std::move(warn)) {}

fs::path CacheStore::default_root() {
  if (const char* dir = std::getenv("KTUNE_CACHE_DIR"); dir && *dir) return dir;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) {
    return fs::path(xdg) / "ktune";
  }
  if (const char* home = std::getenv("HOME"); home && *home) {
    return fs::path(home) / ".cache" / "ktune";
  }
  return fs::path(".ktune-cache");
}

void CacheStore::warn(const std::string& msg) const {
  if (warn_) {
    warn_(msg);
  } else {
    std::cerr << "ktune: warning: " << msg << '\n';
  }
}

void CacheStore::check_readable() const {
  std::error_code ec;
  auto st = fs::status(root_, ec);
  if (ec && ec != std::errc::no_such_file_or_directory) {
    throw CacheError("cannot read cache store " + root_.string() + ": " + ec.message());
  }
  if (fs::exists(st) && !fs::is_directory(st)) {
    throw CacheError("cache store " + root_.string() + " is not a directory");
  }
  if (fs::exists(st) && ::access(root_.c_str(), R_OK | X_OK) != 0) {
    throw CacheError("cache store " + root_.string() + " is not readable");
  }
}

nlohmann::json CacheStore::read_index() const {
  auto text = read_file(root_ / kIndexName);
  if (!text) return nlohmann::json::object();
  auto j = nlohmann::json::parse(*text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("entries") ||
      !j["entries"].is_object()) {
    warn("ignoring corrupt cache index " + (root_ / kIndexName).string());
    return nlohmann::json::object();
  }
  return j["entries"];
}

void CacheStore::write_index(const nlohmann::json& index) {
  nlohmann::json doc{{"format_version", kCacheFormatVersion}, {"entries", index}};
  write_atomic(root_ / kIndexName, doc.dump(2) + "\n");
}

fs::path CacheStore::entry_path(const CacheKey& key) const {
  fs::path p = root_ / (key.short_str() + kEntrySuffix);
  if (fs::exists(p)) {
    auto text = read_file(p);
    auto j = text ? nlohmann::json::parse(*text, nullptr, false) : nlohmann::json();
    try {
      if (!j.is_discarded() && CacheEntry::from_json(j).key != key) {
        return root_ / (key.str() + kEntrySuffix);
      }
    } catch (const Error&) {
      // Corrupt file under our name: overwrite it.
    }
  }
  return p;
}

std::optional<CacheEntry> CacheStore::read_entry(const fs::path& path,
                                                 const CacheKey* expect) const {
  auto text = read_file(path);
  if (!text) return std::nullopt;
  try {
    auto j = nlohmann::json::parse(*text);
    CacheEntry entry = CacheEntry::from_json(j);
    if (expect && entry.key != *expect) return std::nullopt;
    return entry;
  } catch (const std::exception& e) {
    warn("corrupt cache entry " + path.string() + " treated as a miss: " + e.what());
    return std::nullopt;
  }
}

std::optional<CacheEntry> CacheStore::lookup(const EnvFingerprint& fp,
                                             const ShapeKey& shape) const {
  return lookup(CacheKey::of(fp, shape));
}

std::optional<CacheEntry> CacheStore::lookup(const CacheKey& key) const {
  check_readable();
  if (!fs::exists(root_)) return std::nullopt;
  auto index = read_index();
  if (auto it = index.find(key.str()); it != index.end() && it->is_string()) {
    if (auto e = read_entry(root_ / it->get<std::string>(), &key)) return e;
  }
  // The index may lag the entry files after a crash between the two renames.
  for (const auto& name : {key.short_str() + kEntrySuffix, key.str() + kEntrySuffix}) {
    if (fs::exists(root_ / name)) {
      if (auto e = read_entry(root_ / name, &key)) return e;
    }
  }
  return std::nullopt;
}

StoreOutcome CacheStore::store(const CacheEntry& entry, bool force) {
  entry.check();
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw CacheError("cannot create cache store " + root_.string() + ": " + ec.message());
  check_readable();

  StoreLock lock(root_);
  StoreStatus status = StoreStatus::kStored;
  if (auto old = lookup(entry.key)) {
    if (old->canonical() == entry.canonical()) {
      return {StoreStatus::kUnchanged, entry_path(entry.key)};
    }
    if (!force && *entry.result.best_median_ms > *old->result.best_median_ms) {
      return {StoreStatus::kKeptExisting, entry_path(entry.key)};
    }
    status = StoreStatus::kReplaced;
  }
  fs::path path = entry_path(entry.key);
  write_atomic(path, entry.to_json().dump(2) + "\n");
  auto index = read_index();
  index[entry.key.str()] = path.filename().string();
  write_index(index);
  return {status, path};
}

std::vector<CacheEntry> CacheStore::list() const {
  check_readable();
  std::vector<CacheEntry> out;
  if (!fs::exists(root_)) return out;
  for (const auto& de : fs::directory_iterator(root_)) {
    const auto name = de.path().filename().string();
    if (!de.is_regular_file() || name.starts_with(".") ||
        !name.ends_with(kEntrySuffix)) {
      continue;
    }
    if (auto e = read_entry(de.path(), nullptr)) out.push_back(std::move(*e));
  }
  std::sort(out.begin(), out.end(),
            [](const CacheEntry& a, const CacheEntry& b) { return a.key < b.key; });
  return out;
}

std::optional<CacheEntry> CacheStore::find(std::string_view key) const {
  if (key.empty()) return std::nullopt;
  std::optional<CacheEntry> match;
  for (auto& e : list()) {
    if (e.key.str().starts_with(key) || e.key.short_str().starts_with(key)) {
      if (match) return std::nullopt;  // ambiguous
      match = std::move(e);
    }
  }
  return match;
}

bool CacheStore::invalidate(const CacheKey& key) {
  if (!fs::exists(root_)) return false;
  StoreLock lock(root_);
  bool removed = false;
  auto index = read_index();
  if (auto it = index.find(key.str()); it != index.end()) {
    std::error_code ec;
    removed |= fs::remove(root_ / it->get<std::string>(), ec);
    index.erase(it);
    write_index(index);
  }
  for (const auto& name : {key.short_str() + kEntrySuffix, key.str() + kEntrySuffix}) {
    if (read_entry(root_ / name, &key)) {
      std::error_code ec;
      removed |= fs::remove(root_ / name, ec);
    }
  }
  return removed;
}

nlohmann::json CacheStore::export_bundle(const std::vector<CacheKey>& keys) const {
  nlohmann::json entries = nlohmann::json::array();
  if (keys.empty()) {
    for (const auto& e : list()) entries.push_back(e.to_json());
  } else {
    for (const auto& k : keys) {
      auto e = lookup(k);
      if (!e) throw CacheError("no cache entry for key " + k.str());
      entries.push_back(e->to_json());
    }
  }
  return {{"format_version", kCacheFormatVersion},
          {"framework_version", kFrameworkVersion},
          {"entries", entries}};
}

std::size_t CacheStore::import_bundle(const nlohmann::json& bundle, bool force) {
  if (!bundle.is_object() || !bundle.contains("format_version") ||
      !bundle["format_version"].is_number_integer()) {
    throw CacheError("bundle has no integer format_version");
  }
  int version = bundle["format_version"].get<int>();
  if (version != kCacheFormatVersion) {
    throw CacheError("bundle format_version " + std::to_string(version) +
                     " is not supported (this build reads " +
                     std::to_string(kCacheFormatVersion) + ")");
  }
  if (!bundle.contains("entries") || !bundle["entries"].is_array()) {
    throw CacheError("bundle has no `entries` array");
  }
  std::vector<CacheEntry> entries;
  for (const auto& j : bundle["entries"]) {
    try {
      entries.push_back(CacheEntry::from_json(j));
    } catch (const ParseError& e) {
      throw CacheError(std::string("bundle entry rejected: ") + e.what());
    }
  }
  std::size_t changed = 0;
  for (const auto& e : entries) {
    auto s = store(e, force).status;
    if (s == StoreStatus::kStored || s == StoreStatus::kReplaced) ++changed;
  }
  return changed;
}

}  // namespace ktune
