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

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ktune/value.hpp"

namespace ktune {

// Types of the parameters an expression may reference.
using TypeEnv = std::map<std::string, ValueType, std::less<>>;

// Resolves a parameter reference during evaluation; returns nullptr when the
// name is unbound.
using Lookup = std::function<const Value*(std::string_view)>;

// A boolean expression over parameter references and integer literals.
//
// Grammar (lowest to highest precedence):
//   or      := and ('||' and)*
//   and     := eq ('&&' eq)*
//   eq      := rel (('==' | '!=') rel)*
//   rel     := sum (('<' | '<=' | '>' | '>=') sum)*
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/' | '%') unary)*
//   unary   := ('!' | '-') unary | primary
//   primary := integer | 'true' | 'false' | "string" | identifier | '(' or ')'
//
// Expressions are type checked at parse time: arithmetic and ordering need
// ints, logic needs bools, `==`/`!=` need both sides of the same type.
// String literals only make sense compared against categorical parameters.
// `/` truncates toward zero and `%` takes the sign of the dividend. Division
// by zero and int64 overflow raise EvalError.
class Constraint {
 public:
  struct Node;

  static Constraint parse(std::string_view text, const TypeEnv& env);

  bool evaluate(const Lookup& lookup) const;
  bool evaluate(const ScalarMap& values) const;

  // Text as written by the user.
  const std::string& source() const { return source_; }
  // Fully parenthesized, whitespace-free form. Equal for expressions that
  // differ only in spacing or redundant parentheses.
  std::string canonical() const;
  const std::vector<std::string>& referenced() const { return referenced_; }

 private:
  std::string source_;
  std::shared_ptr<const Node> root_;
  std::vector<std::string> referenced_;
};

}  // namespace ktune
