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

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace ktune {

inline constexpr int kProtocolVersion = 1;
inline constexpr int kCacheFormatVersion = 1;
inline constexpr const char* kFrameworkVersion = "0.3.0";

// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

// Canonical text form of a JSON value: object keys sorted, no whitespace.
// All content digests in ktune are sha256_hex(canonical_json(x)).
std::string canonical_json(const nlohmann::json& value);

inline std::string json_digest(const nlohmann::json& value) {
  return sha256_hex(canonical_json(value));
}

}  // namespace ktune
