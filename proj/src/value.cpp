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

#include "ktune/value.hpp"

#include <charconv>
#include <sstream>

#include "ktune/digest.hpp"
#include "ktune/error.hpp"

namespace ktune {

ValueType type_of(const Value& v) {
  switch (v.index()) {
    case 0:
      return ValueType::kBool;
    case 1:
      return ValueType::kInt;
    default:
      return ValueType::kString;
  }
}

std::string_view type_name(ValueType t) {
  switch (t) {
    case ValueType::kBool:
      return "bool";
    case ValueType::kInt:
      return "int";
    case ValueType::kString:
      return "string";
  }
  return "?";
}

std::string to_string(const Value& v) {
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

nlohmann::json to_json(const Value& v) {
  return std::visit([](const auto& x) { return nlohmann::json(x); }, v);
}

Value value_from_json(const nlohmann::json& j, std::string_view where) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_string()) return j.get<std::string>();
  throw ParseError("expected integer, boolean or string, got " +
                       std::string(j.type_name()),
                   std::string(where));
}

Value parse_scalar(std::string_view text) {
  if (text == "true") return true;
  if (text == "false") return false;
  std::int64_t out = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (!text.empty() && ec == std::errc() && ptr == end) return out;
  return std::string(text);
}

ScalarMap::ScalarMap(Map values)
    : values_(std::move(values)), digest_(sha256_hex(canonical())) {}

const Value* ScalarMap::find(std::string_view name) const {
  auto it = values_.find(name);
  return it == values_.end() ? nullptr : &it->second;
}

const Value& ScalarMap::at(std::string_view name) const {
  if (const auto* v = find(name)) return *v;
  throw StructuralError("no value for `" + std::string(name) + "`");
}

nlohmann::json ScalarMap::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : values_) j[k] = ktune::to_json(v);
  return j;
}

std::string ScalarMap::canonical() const { return canonical_json(to_json()); }

std::string ScalarMap::describe() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [k, v] : values_) {
    if (!first) os << ", ";
    first = false;
    os << k << '=' << ktune::to_string(v);
  }
  os << '}';
  return os.str();
}

ScalarMap::Map ScalarMap::map_from_json(const nlohmann::json& j,
                                        std::string_view what) {
  if (!j.is_object()) {
    throw ParseError(std::string(what) + " must be a JSON object");
  }
  Map m;
  for (const auto& [k, v] : j.items()) {
    m.emplace(k, value_from_json(v, std::string(what) + "." + k));
  }
  return m;
}

KernelConfig KernelConfig::from_json(const nlohmann::json& j) {
  return KernelConfig(map_from_json(j, "config"));
}

ShapeKey::ShapeKey(Map values) : ScalarMap(std::move(values)) {
  if (empty()) throw ParseError("shape must have at least one dimension");
}

ShapeKey ShapeKey::from_json(const nlohmann::json& j) {
  return ShapeKey(map_from_json(j, "shape"));
}

ShapeKey ShapeKey::parse(std::string_view text) {
  Map m;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    auto item = text.substr(start, comma - start);
    if (!item.empty()) {
      auto eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        throw ParseError("expected name=value", std::string(text), start);
      }
      std::string name(item.substr(0, eq));
      if (!m.emplace(name, parse_scalar(item.substr(eq + 1))).second) {
        throw ParseError("duplicate dimension `" + name + "`",
                         std::string(text), start);
      }
    }
    start = comma + 1;
  }
  return ShapeKey(std::move(m));
}

}  // namespace ktune
