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

#include "ktune/configspace.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "ktune/digest.hpp"

namespace ktune {
namespace {

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
  };
  if (!alpha(s[0])) return false;
  return std::all_of(s.begin() + 1, s.end(), [&](char c) {
    return alpha(c) || (c >= '0' && c <= '9');
  });
}

bool is_pow2(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

void check_name(const std::string& name, const std::string& where) {
  if (!is_identifier(name) || name == "true" || name == "false") {
    throw ParseError("invalid identifier `" + name + "`", where);
  }
}

template <typename T>
void check_list(const std::vector<T>& values, const std::string& name) {
  if (values.empty()) {
    throw ParseError("empty domain for parameter `" + name + "`");
  }
  std::set<T> seen;
  for (const auto& v : values) {
    if (!seen.insert(v).second) {
      std::ostringstream os;
      os << "duplicate value " << v << " in domain of `" << name << "`";
      throw ParseError(os.str());
    }
  }
}

const nlohmann::json& field(const nlohmann::json& obj, const char* key,
                            const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(std::string("missing field `") + key + "`", where);
  }
  return *it;
}

std::int64_t int_field(const nlohmann::json& obj, const char* key,
                       const std::string& where) {
  const auto& v = field(obj, key, where);
  if (!v.is_number_integer()) {
    throw ParseError(std::string("field `") + key + "` must be an integer", where);
  }
  return v.get<std::int64_t>();
}

}  // namespace

std::string_view kind_name(DomainKind kind) {
  switch (kind) {
    case DomainKind::kIntList: return "int-list";
    case DomainKind::kIntRange: return "int-range";
    case DomainKind::kPow2Range: return "pow2-range";
    case DomainKind::kCategorical: return "categorical";
    case DomainKind::kBoolean: return "boolean";
  }
  return "?";
}

ParamDomain::ParamDomain(std::string name, DomainKind kind)
    : name_(std::move(name)), kind_(kind) {
  check_name(name_, "parameter name");
}

ParamDomain ParamDomain::int_list(std::string name, std::vector<std::int64_t> values) {
  check_list(values, name);
  ParamDomain d(std::move(name), DomainKind::kIntList);
  d.list_.assign(values.begin(), values.end());
  return d;
}

ParamDomain ParamDomain::int_range(std::string name, std::int64_t lo,
                                   std::int64_t hi, std::int64_t step) {
  if (lo > hi) {
    throw ParseError("int-range of `" + name + "` has lo > hi");
  }
  if (step < 1) {
    throw ParseError("int-range of `" + name + "` needs step >= 1");
  }
  ParamDomain d(std::move(name), DomainKind::kIntRange);
  d.lo_ = lo;
  d.hi_ = hi;
  d.step_ = step;
  return d;
}

ParamDomain ParamDomain::pow2_range(std::string name, std::int64_t lo, std::int64_t hi) {
  if (!is_pow2(lo) || !is_pow2(hi)) {
    throw ParseError("pow2-range of `" + name + "` needs power-of-two bounds");
  }
  if (lo > hi) {
    throw ParseError("pow2-range of `" + name + "` has lo > hi");
  }
  ParamDomain d(std::move(name), DomainKind::kPow2Range);
  d.lo_ = lo;
  d.hi_ = hi;
  return d;
}

ParamDomain ParamDomain::categorical(std::string name, std::vector<std::string> values) {
  check_list(values, name);
  ParamDomain d(std::move(name), DomainKind::kCategorical);
  d.list_.assign(values.begin(), values.end());
  return d;
}

ParamDomain ParamDomain::boolean(std::string name) {
  ParamDomain d(std::move(name), DomainKind::kBoolean);
  d.list_ = {false, true};
  return d;
}

ValueType ParamDomain::type() const {
  switch (kind_) {
    case DomainKind::kBoolean: return ValueType::kBool;
    case DomainKind::kCategorical: return ValueType::kString;
    default: return ValueType::kInt;
  }
}

std::uint64_t ParamDomain::size() const {
  switch (kind_) {
    case DomainKind::kIntRange:
      return static_cast<std::uint64_t>(
                 (static_cast<unsigned __int128>(hi_ - lo_)) / step_) + 1;
    case DomainKind::kPow2Range: {
      std::uint64_t n = 1;
      for (std::int64_t v = lo_; v < hi_; v <<= 1) ++n;
      return n;
    }
    default:
      return list_.size();
  }
}

Value ParamDomain::value_at(std::uint64_t index) const {
  switch (kind_) {
    case DomainKind::kIntRange:
      return static_cast<std::int64_t>(lo_ + static_cast<std::int64_t>(index) * step_);
    case DomainKind::kPow2Range:
      return static_cast<std::int64_t>(lo_ << index);
    default:
      return list_.at(index);
  }
}

bool ParamDomain::contains(const Value& v) const {
  if (type_of(v) != type()) return false;
  switch (kind_) {
    case DomainKind::kIntRange: {
      auto x = std::get<std::int64_t>(v);
      return x >= lo_ && x <= hi_ && (x - lo_) % step_ == 0;
    }
    case DomainKind::kPow2Range: {
      auto x = std::get<std::int64_t>(v);
      return is_pow2(x) && x >= lo_ && x <= hi_;
    }
    default:
      return std::find(list_.begin(), list_.end(), v) != list_.end();
  }
}

std::string ParamDomain::describe() const {
  std::ostringstream os;
  os << kind_name(kind_);
  switch (kind_) {
    case DomainKind::kIntRange:
      os << '(' << lo_ << ',' << hi_ << ',' << step_ << ')';
      break;
    case DomainKind::kPow2Range:
      os << '(' << lo_ << ',' << hi_ << ')';
      break;
    case DomainKind::kBoolean:
      break;
    default: {
      os << '{';
      for (std::size_t i = 0; i < list_.size(); ++i) {
        if (i) os << ',';
        os << to_string(list_[i]);
      }
      os << '}';
    }
  }
  return os.str();
}

nlohmann::json ParamDomain::to_json() const {
  nlohmann::json j{{"name", name_}, {"kind", std::string(kind_name(kind_))}};
  switch (kind_) {
    case DomainKind::kIntRange:
      j["lo"] = lo_;
      j["hi"] = hi_;
      j["step"] = step_;
      break;
    case DomainKind::kPow2Range:
      j["lo"] = lo_;
      j["hi"] = hi_;
      break;
    case DomainKind::kBoolean:
      break;
    default: {
      auto& arr = j["values"] = nlohmann::json::array();
      for (const auto& v : list_) arr.push_back(ktune::to_json(v));
    }
  }
  return j;
}

ConfigSpace::ConfigSpace(std::string name, std::vector<ParamDomain> params,
                         const std::vector<std::string>& constraints)
    : name_(std::move(name)), params_(std::move(params)) {
  check_name(name_, "space name");
  if (params_.empty()) throw ParseError("space has no parameters", "params");
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!types_.emplace(params_[i].name(), params_[i].type()).second) {
      throw ParseError("duplicate parameter name `" + params_[i].name() + "`",
                       "params[" + std::to_string(i) + "]");
    }
  }
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    try {
      constraints_.push_back(Constraint::parse(constraints[i], types_));
    } catch (const ParseError& e) {
      throw ParseError("constraints[" + std::to_string(i) + "]: " + e.bare_message(),
                       e.context(), e.position());
    }
  }
  digest_ = json_digest(to_json());
}

ConfigSpace ConfigSpace::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("space document must be a JSON object");
  const auto& name = field(doc, "name", "space");
  if (!name.is_string()) throw ParseError("`name` must be a string", "space");
  const auto& params = field(doc, "params", "space");
  if (!params.is_array()) throw ParseError("`params` must be an array", "space");

  std::vector<ParamDomain> domains;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    std::string where = "params[" + std::to_string(i) + "]";
    if (!p.is_object()) throw ParseError("parameter must be an object", where);
    const auto& pname = field(p, "name", where);
    const auto& kind = field(p, "kind", where);
    if (!pname.is_string() || !kind.is_string()) {
      throw ParseError("`name` and `kind` must be strings", where);
    }
    std::string n = pname.get<std::string>();
    std::string k = kind.get<std::string>();
    try {
      if (k == "int-list") {
        const auto& vals = field(p, "values", where);
        if (!vals.is_array()) throw ParseError("`values` must be an array", where);
        std::vector<std::int64_t> xs;
        for (const auto& v : vals) {
          if (!v.is_number_integer()) {
            throw ParseError("int-list values must be integers", where);
          }
          xs.push_back(v.get<std::int64_t>());
        }
        domains.push_back(ParamDomain::int_list(n, std::move(xs)));
      } else if (k == "int-range") {
        std::int64_t step = p.contains("step") ? int_field(p, "step", where) : 1;
        domains.push_back(ParamDomain::int_range(n, int_field(p, "lo", where),
                                                 int_field(p, "hi", where), step));
      } else if (k == "pow2-range") {
        domains.push_back(ParamDomain::pow2_range(n, int_field(p, "lo", where),
                                                  int_field(p, "hi", where)));
      } else if (k == "categorical") {
        const auto& vals = field(p, "values", where);
        if (!vals.is_array()) throw ParseError("`values` must be an array", where);
        std::vector<std::string> xs;
        for (const auto& v : vals) {
          if (!v.is_string()) {
            throw ParseError("categorical values must be strings", where);
          }
          xs.push_back(v.get<std::string>());
        }
        domains.push_back(ParamDomain::categorical(n, std::move(xs)));
      } else if (k == "boolean") {
        domains.push_back(ParamDomain::boolean(n));
      } else {
        throw ParseError("unknown kind `" + k + "`", where);
      }
    } catch (const ParseError& e) {
      if (!e.context().empty()) throw;
      throw ParseError(e.bare_message(), where);
    }
  }

  std::vector<std::string> constraints;
  if (auto it = doc.find("constraints"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("`constraints` must be an array", "space");
    for (std::size_t i = 0; i < it->size(); ++i) {
      if (!(*it)[i].is_string()) {
        throw ParseError("constraint must be a string",
                         "constraints[" + std::to_string(i) + "]");
      }
      constraints.push_back((*it)[i].get<std::string>());
    }
  }
  return ConfigSpace(name.get<std::string>(), std::move(domains), constraints);
}

const ParamDomain* ConfigSpace::find(std::string_view name) const {
  for (const auto& p : params_) {
    if (p.name() == name) return &p;
  }
  return nullptr;
}

nlohmann::json ConfigSpace::to_json() const {
  nlohmann::json params = nlohmann::json::array();
  for (const auto& p : params_) params.push_back(p.to_json());
  nlohmann::json constraints = nlohmann::json::array();
  for (const auto& c : constraints_) constraints.push_back(c.canonical());
  return {{"name", name_}, {"params", params}, {"constraints", constraints}};
}

std::uint64_t ConfigSpace::raw_size() const {
  std::uint64_t n = 1;
  for (const auto& p : params_) {
    if (__builtin_mul_overflow(n, p.size(), &n)) {
      throw Error("raw grid of space `" + name_ + "` exceeds 2^64 points");
    }
  }
  return n;
}

EnumerationError::EnumerationError(const KernelConfig& config,
                                   const Constraint& constraint,
                                   const std::string& why)
    : EvalError("constraint `" + constraint.source() + "` failed on " +
                config.describe() + ": " + why),
      config_(config),
      constraint_(constraint.source()) {}

ConfigCursor::ConfigCursor(const ConfigSpace& space)
    : space_(&space), index_(space.params().size(), 0) {}

bool ConfigCursor::advance() {
  const auto& params = space_->params();
  for (std::size_t i = params.size(); i-- > 0;) {
    if (++index_[i] < params[i].size()) return true;
    index_[i] = 0;
  }
  return false;
}

std::optional<KernelConfig> ConfigCursor::next() {
  const auto& params = space_->params();
  while (!done_) {
    ScalarMap::Map values;
    for (std::size_t i = 0; i < params.size(); ++i) {
      values.emplace(params[i].name(), params[i].value_at(index_[i]));
    }
    done_ = !advance();
    ++visited_;
    KernelConfig config(std::move(values));
    bool ok = true;
    for (const auto& c : space_->constraints()) {
      try {
        if (!c.evaluate(config)) {
          ok = false;
          break;
        }
      } catch (const EvalError& e) {
        throw EnumerationError(config, c, e.what());
      }
    }
    if (ok) return config;
  }
  return std::nullopt;
}

ConfigSpace parse_space(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), "document",
                     e.byte > 0 ? e.byte - 1 : 0);
  }
  return ConfigSpace::from_json(doc);
}

ConfigSpace load_space(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read space file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_space(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.bare_message(), e.context(), e.position());
  }
}

void for_each_config(const ConfigSpace& space,
                     const std::function<bool(const KernelConfig&)>& fn) {
  ConfigCursor cursor(space);
  while (auto c = cursor.next()) {
    if (!fn(*c)) return;
  }
}

std::vector<KernelConfig> enumerate(const ConfigSpace& space) {
  std::vector<KernelConfig> out;
  for_each_config(space, [&](const KernelConfig& c) {
    out.push_back(c);
    return true;
  });
  return out;
}

Cardinality cardinality(const ConfigSpace& space) {
  Cardinality card;
  card.raw = space.raw_size();
  for_each_config(space, [&](const KernelConfig&) {
    ++card.valid;
    return true;
  });
  return card;
}

ValidationResult validate(const ConfigSpace& space, const KernelConfig& config) {
  std::vector<std::string> missing;
  for (const auto& p : space.params()) {
    if (config.find(p.name()) == nullptr) missing.push_back(p.name());
  }
  std::vector<std::string> extra;
  for (const auto& [name, v] : config.values()) {
    if (space.find(name) == nullptr) extra.push_back(name);
  }
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "config does not match space `" + space.name() + "`";
    for (const auto& m : missing) msg += "; missing `" + m + "`";
    for (const auto& e : extra) msg += "; unexpected `" + e + "`";
    throw StructuralError(msg);
  }

  ValidationResult result;
  for (const auto& p : space.params()) {
    const Value& v = config.at(p.name());
    if (!p.contains(v)) {
      result.violations.push_back(p.name() + "=" + to_string(v) + " not in " +
                                  p.describe());
    }
  }
  // Constraints are only meaningful over in-domain (well-typed) values.
  if (result.violations.empty()) {
    for (const auto& c : space.constraints()) {
      try {
        if (!c.evaluate(config)) result.violations.push_back(c.source());
      } catch (const EvalError& e) {
        result.violations.push_back(c.source() + " (" + e.what() + ")");
      }
    }
  }
  result.valid = result.violations.empty();
  return result;
}

}  // namespace ktune
