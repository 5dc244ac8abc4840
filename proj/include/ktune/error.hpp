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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ktune {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed space/profile/constraint text. `position` is a 0-based column
// inside `context` (an expression string or a JSON pointer-ish path).
class ParseError : public Error {
 public:
  ParseError(std::string message, std::string context = {},
             std::size_t position = npos)
      : Error(format(message, context, position)),
        message_(std::move(message)),
        context_(std::move(context)),
        position_(position) {}

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  const std::string& bare_message() const { return message_; }
  const std::string& context() const { return context_; }
  std::size_t position() const { return position_; }

 private:
  static std::string format(const std::string& message,
                            const std::string& context, std::size_t position) {
    std::string out = message;
    if (!context.empty()) {
      out += " in `" + context + "`";
    }
    if (position != npos) {
      out += " at column " + std::to_string(position + 1);
    }
    return out;
  }

  std::string message_;
  std::string context_;
  std::size_t position_;
};

// Runtime failure while evaluating a constraint (division by zero, overflow,
// non-positive value in the cost model).
class EvalError : public Error {
 public:
  using Error::Error;
};

// Config does not have the shape of its space (missing or extra parameters).
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Benchmark runner broke the wire protocol during handshake.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class VersionMismatchError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

class CacheError : public Error {
 public:
  using Error::Error;
};

// A search gave up (too many hard failures, invalid budget).
class SearchError : public Error {
 public:
  using Error::Error;
};

}  // namespace ktune
