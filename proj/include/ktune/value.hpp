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
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

namespace ktune {

// A scalar parameter or shape value. Spaces are discrete: no floats.
using Value = std::variant<bool, std::int64_t, std::string>;

enum class ValueType { kBool, kInt, kString };

ValueType type_of(const Value& v);
std::string_view type_name(ValueType t);
std::string to_string(const Value& v);
nlohmann::json to_json(const Value& v);
// Throws ParseError for floats, nulls, arrays and objects.
Value value_from_json(const nlohmann::json& j, std::string_view where = {});
// "true"/"false" -> bool, decimal integer -> int, anything else -> string.
Value parse_scalar(std::string_view text);

// Name -> value map with a canonical (sorted-key) serialization and a
// SHA-256 digest of it. Base for KernelConfig and ShapeKey.
class ScalarMap {
 public:
  using Map = std::map<std::string, Value, std::less<>>;

  ScalarMap() = default;
  explicit ScalarMap(Map values);

  const Map& values() const { return values_; }
  const std::string& digest() const { return digest_; }
  const Value* find(std::string_view name) const;
  const Value& at(std::string_view name) const;
  bool empty() const { return values_.empty(); }
  std::size_t size() const { return values_.size(); }

  nlohmann::json to_json() const;
  std::string canonical() const;
  // `{A=1, B=true}` for humans.
  std::string describe() const;

  friend bool operator==(const ScalarMap& a, const ScalarMap& b) {
    return a.digest_ == b.digest_;
  }

 protected:
  static Map map_from_json(const nlohmann::json& j, std::string_view what);

 private:
  Map values_;
  std::string digest_;
};

// One point of a configuration space.
class KernelConfig : public ScalarMap {
 public:
  using ScalarMap::ScalarMap;
  static KernelConfig from_json(const nlohmann::json& j);
};

// Problem-size identity (batch_size, seq_len, num_heads, head_dim, dtype...).
// Never empty.
class ShapeKey : public ScalarMap {
 public:
  explicit ShapeKey(Map values);
  static ShapeKey from_json(const nlohmann::json& j);
  // "batch_size=64,seq_len=2048"
  static ShapeKey parse(std::string_view text);
};

}  // namespace ktune
