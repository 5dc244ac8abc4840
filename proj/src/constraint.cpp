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

#include "ktune/constraint.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>

#include "ktune/error.hpp"

namespace ktune {

enum class Op {
  kOr,
  kAnd,
  kEq,
  kNe,
  kLt,
  kLe,
  kGt,
  kGe,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kMod,
  kNot,
  kNeg,
};

struct Constraint::Node {
  enum class Kind { kLiteral, kParam, kUnary, kBinary };
  Kind kind;
  ValueType type;
  Value literal;
  std::string name;
  Op op = Op::kOr;
  std::unique_ptr<Node> lhs;
  std::unique_ptr<Node> rhs;
};

namespace {

using Node = Constraint::Node;

std::string_view op_text(Op op) {
  switch (op) {
    case Op::kOr: return "||";
    case Op::kAnd: return "&&";
    case Op::kEq: return "==";
    case Op::kNe: return "!=";
    case Op::kLt: return "<";
    case Op::kLe: return "<=";
    case Op::kGt: return ">";
    case Op::kGe: return ">=";
    case Op::kAdd: return "+";
    case Op::kSub: return "-";
    case Op::kMul: return "*";
    case Op::kDiv: return "/";
    case Op::kMod: return "%";
    case Op::kNot: return "!";
    case Op::kNeg: return "-";
  }
  return "?";
}

struct Token {
  enum class Kind { kInt, kIdent, kString, kOp, kLParen, kRParen, kEnd };
  Kind kind;
  std::string text;
  std::size_t pos;
};

class Parser {
 public:
  Parser(std::string_view text, const TypeEnv& env) : text_(text), env_(env) {
    tokenize();
  }

  std::unique_ptr<Node> parse_root(std::vector<std::string>& referenced) {
    auto root = parse_or();
    if (peek().kind != Token::Kind::kEnd) {
      fail("unexpected `" + peek().text + "`", peek().pos);
    }
    if (root->type != ValueType::kBool) {
      fail("constraint must be boolean, got " +
               std::string(type_name(root->type)),
           0);
    }
    std::sort(referenced_.begin(), referenced_.end());
    referenced_.erase(std::unique(referenced_.begin(), referenced_.end()),
                      referenced_.end());
    referenced = referenced_;
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::size_t pos) const {
    throw ParseError(msg, std::string(text_), pos);
  }

  void tokenize() {
    std::size_t i = 0;
    while (i < text_.size()) {
      char c = text_[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t j = i;
        while (j < text_.size() &&
               std::isalnum(static_cast<unsigned char>(text_[j])))
          ++j;
        tokens_.push_back({Token::Kind::kInt, std::string(text_.substr(i, j - i)), i});
        i = j;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t j = i;
        while (j < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[j])) ||
                text_[j] == '_'))
          ++j;
        tokens_.push_back({Token::Kind::kIdent, std::string(text_.substr(i, j - i)), i});
        i = j;
      } else if (c == '"' || c == '\'') {
        std::size_t j = i + 1;
        while (j < text_.size() && text_[j] != c) ++j;
        if (j >= text_.size()) fail("unterminated string literal", i);
        tokens_.push_back({Token::Kind::kString, std::string(text_.substr(i + 1, j - i - 1)), i});
        i = j + 1;
      } else if (c == '(') {
        tokens_.push_back({Token::Kind::kLParen, "(", i++});
      } else if (c == ')') {
        tokens_.push_back({Token::Kind::kRParen, ")", i++});
      } else {
        static constexpr std::string_view kTwo[] = {"||", "&&", "==", "!=",
                                                    "<=", ">="};
        auto two = text_.substr(i, 2);
        if (std::find(std::begin(kTwo), std::end(kTwo), two) != std::end(kTwo)) {
          tokens_.push_back({Token::Kind::kOp, std::string(two), i});
          i += 2;
        } else if (std::string_view("+-*/%<>!").find(c) != std::string_view::npos) {
          tokens_.push_back({Token::Kind::kOp, std::string(1, c), i++});
        } else {
          fail(std::string("unexpected character `") + c + "`", i);
        }
      }
    }
    tokens_.push_back({Token::Kind::kEnd, "end of expression", text_.size()});
  }

  const Token& peek() const { return tokens_[cur_]; }
  const Token& next() { return tokens_[cur_++]; }

  bool accept_op(std::string_view op) {
    if (peek().kind == Token::Kind::kOp && peek().text == op) {
      ++cur_;
      return true;
    }
    return false;
  }

  void require(const Node& n, ValueType t, std::size_t pos,
               std::string_view op) const {
    if (n.type != t) {
      fail("operator `" + std::string(op) + "` expects " +
               std::string(type_name(t)) + " operand, got " +
               std::string(type_name(n.type)),
           pos);
    }
  }

  static std::unique_ptr<Node> make_binary(Op op, ValueType type,
                                           std::unique_ptr<Node> l,
                                           std::unique_ptr<Node> r) {
    auto n = std::make_unique<Node>();
    n->kind = Node::Kind::kBinary;
    n->type = type;
    n->op = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }

  // Logic level: both sides bool.
  template <typename Sub>
  std::unique_ptr<Node> logic(Sub sub, std::string_view sym, Op op) {
    auto lhs = (this->*sub)();
    while (true) {
      std::size_t pos = peek().pos;
      if (!accept_op(sym)) return lhs;
      auto rhs = (this->*sub)();
      require(*lhs, ValueType::kBool, pos, sym);
      require(*rhs, ValueType::kBool, pos, sym);
      lhs = make_binary(op, ValueType::kBool, std::move(lhs), std::move(rhs));
    }
  }

  std::unique_ptr<Node> parse_or() { return logic(&Parser::parse_and, "||", Op::kOr); }
  std::unique_ptr<Node> parse_and() { return logic(&Parser::parse_eq, "&&", Op::kAnd); }

  std::unique_ptr<Node> parse_eq() {
    auto lhs = parse_rel();
    while (true) {
      std::size_t pos = peek().pos;
      Op op;
      if (accept_op("==")) {
        op = Op::kEq;
      } else if (accept_op("!=")) {
        op = Op::kNe;
      } else {
        return lhs;
      }
      auto rhs = parse_rel();
      if (lhs->type != rhs->type) {
        fail("cannot compare " + std::string(type_name(lhs->type)) + " with " +
                 std::string(type_name(rhs->type)),
             pos);
      }
      lhs = make_binary(op, ValueType::kBool, std::move(lhs), std::move(rhs));
    }
  }

  std::unique_ptr<Node> parse_rel() {
    auto lhs = parse_sum();
    while (true) {
      std::size_t pos = peek().pos;
      Op op;
      if (accept_op("<=")) {
        op = Op::kLe;
      } else if (accept_op(">=")) {
        op = Op::kGe;
      } else if (accept_op("<")) {
        op = Op::kLt;
      } else if (accept_op(">")) {
        op = Op::kGt;
      } else {
        return lhs;
      }
      auto rhs = parse_sum();
      require(*lhs, ValueType::kInt, pos, op_text(op));
      require(*rhs, ValueType::kInt, pos, op_text(op));
      lhs = make_binary(op, ValueType::kBool, std::move(lhs), std::move(rhs));
    }
  }

  std::unique_ptr<Node> parse_sum() {
    auto lhs = parse_product();
    while (true) {
      std::size_t pos = peek().pos;
      Op op;
      if (accept_op("+")) {
        op = Op::kAdd;
      } else if (accept_op("-")) {
        op = Op::kSub;
      } else {
        return lhs;
      }
      auto rhs = parse_product();
      require(*lhs, ValueType::kInt, pos, op_text(op));
      require(*rhs, ValueType::kInt, pos, op_text(op));
      lhs = make_binary(op, ValueType::kInt, std::move(lhs), std::move(rhs));
    }
  }

  std::unique_ptr<Node> parse_product() {
    auto lhs = parse_unary();
    while (true) {
      std::size_t pos = peek().pos;
      Op op;
      if (accept_op("*")) {
        op = Op::kMul;
      } else if (accept_op("/")) {
        op = Op::kDiv;
      } else if (accept_op("%")) {
        op = Op::kMod;
      } else {
        return lhs;
      }
      auto rhs = parse_unary();
      require(*lhs, ValueType::kInt, pos, op_text(op));
      require(*rhs, ValueType::kInt, pos, op_text(op));
      lhs = make_binary(op, ValueType::kInt, std::move(lhs), std::move(rhs));
    }
  }

  std::unique_ptr<Node> parse_unary() {
    std::size_t pos = peek().pos;
    Op op;
    if (accept_op("!")) {
      op = Op::kNot;
    } else if (accept_op("-")) {
      op = Op::kNeg;
    } else {
      return parse_primary();
    }
    auto operand = parse_unary();
    auto want = op == Op::kNot ? ValueType::kBool : ValueType::kInt;
    require(*operand, want, pos, op_text(op));
    auto n = std::make_unique<Node>();
    n->kind = Node::Kind::kUnary;
    n->type = want;
    n->op = op;
    n->lhs = std::move(operand);
    return n;
  }

  std::unique_ptr<Node> parse_primary() {
    const Token& tok = next();
    auto n = std::make_unique<Node>();
    switch (tok.kind) {
      case Token::Kind::kInt: {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(tok.text.data(),
                                         tok.text.data() + tok.text.size(), v);
        if (ec != std::errc() || ptr != tok.text.data() + tok.text.size()) {
          fail("bad integer literal `" + tok.text + "`", tok.pos);
        }
        n->kind = Node::Kind::kLiteral;
        n->type = ValueType::kInt;
        n->literal = v;
        return n;
      }
      case Token::Kind::kString:
        n->kind = Node::Kind::kLiteral;
        n->type = ValueType::kString;
        n->literal = tok.text;
        return n;
      case Token::Kind::kIdent: {
        if (tok.text == "true" || tok.text == "false") {
          n->kind = Node::Kind::kLiteral;
          n->type = ValueType::kBool;
          n->literal = tok.text == "true";
          return n;
        }
        auto it = env_.find(tok.text);
        if (it == env_.end()) {
          fail("unknown parameter `" + tok.text + "`", tok.pos);
        }
        n->kind = Node::Kind::kParam;
        n->type = it->second;
        n->name = tok.text;
        referenced_.push_back(tok.text);
        return n;
      }
      case Token::Kind::kLParen: {
        auto inner = parse_or();
        if (peek().kind != Token::Kind::kRParen) {
          fail("expected `)`", peek().pos);
        }
        ++cur_;
        return inner;
      }
      default:
        fail("unexpected `" + tok.text + "`", tok.pos);
    }
  }

  std::string_view text_;
  const TypeEnv& env_;
  std::vector<Token> tokens_;
  std::size_t cur_ = 0;
  std::vector<std::string> referenced_;
};

template <typename F>
std::int64_t checked(F op, std::int64_t a, std::int64_t b, std::string_view what) {
  std::int64_t out = 0;
  if (op(a, b, &out)) throw EvalError("integer overflow in `" + std::string(what) + "`");
  return out;
}

Value eval(const Node& n, const Lookup& lookup) {
  switch (n.kind) {
    case Node::Kind::kLiteral:
      return n.literal;
    case Node::Kind::kParam: {
      const Value* v = lookup(n.name);
      if (v == nullptr) throw EvalError("parameter `" + n.name + "` is unbound");
      if (type_of(*v) != n.type) {
        throw EvalError("parameter `" + n.name + "` has type " +
                        std::string(type_name(type_of(*v))) + ", expected " +
                        std::string(type_name(n.type)));
      }
      return *v;
    }
    case Node::Kind::kUnary: {
      Value v = eval(*n.lhs, lookup);
      if (n.op == Op::kNot) return !std::get<bool>(v);
      std::int64_t x = std::get<std::int64_t>(v);
      if (x == std::numeric_limits<std::int64_t>::min()) {
        throw EvalError("integer overflow in negation");
      }
      return -x;
    }
    case Node::Kind::kBinary:
      break;
  }
  // Short-circuit logic so guards like `B != 0 && A % B == 0` are total.
  if (n.op == Op::kOr || n.op == Op::kAnd) {
    bool l = std::get<bool>(eval(*n.lhs, lookup));
    if (n.op == Op::kOr && l) return true;
    if (n.op == Op::kAnd && !l) return false;
    return std::get<bool>(eval(*n.rhs, lookup));
  }
  Value lv = eval(*n.lhs, lookup);
  Value rv = eval(*n.rhs, lookup);
  if (n.op == Op::kEq) return lv == rv;
  if (n.op == Op::kNe) return lv != rv;
  std::int64_t a = std::get<std::int64_t>(lv);
  std::int64_t b = std::get<std::int64_t>(rv);
  switch (n.op) {
    case Op::kLt: return a < b;
    case Op::kLe: return a <= b;
    case Op::kGt: return a > b;
    case Op::kGe: return a >= b;
    case Op::kAdd:
      return checked([](auto x, auto y, auto* r) { return __builtin_add_overflow(x, y, r); }, a, b, "+");
    case Op::kSub:
      return checked([](auto x, auto y, auto* r) { return __builtin_sub_overflow(x, y, r); }, a, b, "-");
    case Op::kMul:
      return checked([](auto x, auto y, auto* r) { return __builtin_mul_overflow(x, y, r); }, a, b, "*");
    case Op::kDiv:
    case Op::kMod:
      if (b == 0) {
        throw EvalError(n.op == Op::kDiv ? "division by zero" : "modulo by zero");
      }
      if (a == std::numeric_limits<std::int64_t>::min() && b == -1) {
        if (n.op == Op::kMod) return std::int64_t{0};
        throw EvalError("integer overflow in `/`");
      }
      return n.op == Op::kDiv ? a / b : a % b;
    default:
      break;
  }
  throw EvalError("bad operator");
}

void print(const Node& n, std::string& out) {
  switch (n.kind) {
    case Node::Kind::kLiteral:
      if (n.type == ValueType::kString) {
        out += '"' + std::get<std::string>(n.literal) + '"';
      } else {
        out += to_string(n.literal);
      }
      return;
    case Node::Kind::kParam:
      out += n.name;
      return;
    case Node::Kind::kUnary:
      out += '(';
      out += op_text(n.op);
      print(*n.lhs, out);
      out += ')';
      return;
    case Node::Kind::kBinary:
      out += '(';
      print(*n.lhs, out);
      out += op_text(n.op);
      print(*n.rhs, out);
      out += ')';
      return;
  }
}

}  // namespace

Constraint Constraint::parse(std::string_view text, const TypeEnv& env) {
  Constraint c;
  c.source_ = std::string(text);
  Parser parser(c.source_, env);
  c.root_ = parser.parse_root(c.referenced_);
  return c;
}

bool Constraint::evaluate(const Lookup& lookup) const {
  return std::get<bool>(eval(*root_, lookup));
}

bool Constraint::evaluate(const ScalarMap& values) const {
  return evaluate([&values](std::string_view name) { return values.find(name); });
}

std::string Constraint::canonical() const {
  std::string out;
  print(*root_, out);
  return out;
}

}  // namespace ktune
