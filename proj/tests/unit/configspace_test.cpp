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

#include <gtest/gtest.h>

#include <set>

#include "ktune/configspace.hpp"
#include "ktune/error.hpp"
#include "support.hpp"

namespace ktune {
namespace {

const char* kListingSpace = R"({
  "name": "demo",
  "params": [
    {"name": "BLOCK_M", "kind": "pow2-range", "lo": 16, "hi": 128},
    {"name": "num_warps", "kind": "int-list", "values": [1, 2, 4, 8]}
  ],
  "constraints": ["BLOCK_M % 32 == 0 || num_warps < 4"]
})";

ConfigSpace ab_space(const std::string& constraint) {
  nlohmann::json doc{{"name", "ab"},
                     {"params",
                      {{{"name", "A"}, {"kind", "int-list"}, {"values", {1, 2, 3}}},
                       {{"name", "B"}, {"kind", "int-range"}, {"lo", 1}, {"hi", 4}}}},
                     {"constraints", nlohmann::json::array()}};
  if (!constraint.empty()) doc["constraints"].push_back(constraint);
  return ConfigSpace::from_json(doc);
}

KernelConfig ab(std::int64_t a, std::int64_t b) {
  return KernelConfig::from_json({{"A", a}, {"B", b}});
}

TEST(ParseSpace, RawGridOfDocumentedExample) {
  auto space = parse_space(kListingSpace);
  EXPECT_EQ(space.raw_size(), 16u);
  // Brute force: BLOCK_M in {16,32,64,128}; 16 keeps only warps 1 and 2.
  EXPECT_EQ(cardinality(space).valid, 14u);
}

TEST(ParseSpace, UndeclaredParameterIsNamed) {
  std::string doc = kListingSpace;
  doc.replace(doc.find("num_warps < 4"), 13, "BLOCK_N < 4");
  try {
    parse_space(doc);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("`BLOCK_N`"), std::string::npos) << e.what();
    EXPECT_NE(e.position(), ParseError::npos);
  }
}

TEST(ParseSpace, DigestIgnoresWhitespaceAndKeyOrder) {
  auto a = parse_space(kListingSpace);
  auto b = parse_space(
      R"({"constraints":["BLOCK_M%32==0||num_warps<4"],"params":[{"kind":"pow2-range","hi":128,)"
      R"("lo":16,"name":"BLOCK_M"},{"values":[1,2,4,8],"name":"num_warps","kind":"int-list"}],)"
      R"("name":"demo"})");
  EXPECT_EQ(a.digest(), b.digest());
  EXPECT_EQ(a.digest().size(), 64u);
  auto c = parse_space(std::string(kListingSpace).replace(std::string(kListingSpace).find("8]"), 1, "16"));
  EXPECT_NE(a.digest(), c.digest());
}

TEST(ParseSpace, StructuralErrors) {
  auto bad = [](const std::string& params, const std::string& constraints = "[]") {
    return R"({"name":"s","params":)" + params + R"(,"constraints":)" + constraints + "}";
  };
  EXPECT_THROW(parse_space(bad(R"([{"name":"A","kind":"boolean"},{"name":"A","kind":"boolean"}])")),
               ParseError);
  EXPECT_THROW(parse_space(bad(R"([{"name":"A","kind":"int-list","values":[]}])")), ParseError);
  EXPECT_THROW(parse_space(bad(R"([{"name":"A","kind":"int-list","values":[1,1]}])")), ParseError);
  EXPECT_THROW(parse_space(bad(R"([{"name":"A","kind":"int-range","lo":4,"hi":1}])")), ParseError);
  EXPECT_THROW(parse_space(bad(R"([{"name":"A","kind":"int-range","lo":1,"hi":4,"step":0}])")),
               ParseError);
  EXPECT_THROW(parse_space(bad(R"([{"name":"A","kind":"pow2-range","lo":3,"hi":16}])")), ParseError);
  EXPECT_THROW(parse_space(bad(R"([{"name":"A","kind":"pow2-range","lo":32,"hi":16}])")), ParseError);
  EXPECT_THROW(parse_space(bad(R"([{"name":"1A","kind":"boolean"}])")), ParseError);
  EXPECT_THROW(parse_space(bad(R"([{"name":"A","kind":"float"}])")), ParseError);
  EXPECT_THROW(parse_space(bad(R"([])")), ParseError);
  EXPECT_THROW(parse_space(bad(R"([{"name":"A","kind":"boolean"}])", R"(["A +"])")), ParseError);
  EXPECT_THROW(parse_space("{not json"), ParseError);
}

TEST(Enumerate, OrderedPairsUnderDeclaredOrder) {
  auto configs = enumerate(ab_space("A < B"));
  ASSERT_EQ(configs.size(), 6u);
  EXPECT_EQ(configs.front(), ab(1, 2));
  EXPECT_EQ(configs.back(), ab(3, 4));
  std::vector<std::pair<std::int64_t, std::int64_t>> got;
  for (const auto& c : configs) {
    got.emplace_back(std::get<std::int64_t>(c.at("A")), std::get<std::int64_t>(c.at("B")));
  }
  std::vector<std::pair<std::int64_t, std::int64_t>> want{{1, 2}, {1, 3}, {1, 4},
                                                          {2, 3}, {2, 4}, {3, 4}};
  EXPECT_EQ(got, want);
}

TEST(Enumerate, FullProductWithBoolean) {
  auto space = ConfigSpace::from_json(
      {{"name", "s"},
       {"params",
        {{{"name", "A"}, {"kind", "int-list"}, {"values", {1, 2}}},
         {{"name", "B"}, {"kind", "boolean"}}}},
       {"constraints", nlohmann::json::array()}});
  auto configs = enumerate(space);
  ASSERT_EQ(configs.size(), 4u);
  EXPECT_EQ(configs[0].at("B"), Value(false));
  EXPECT_EQ(configs[1].at("B"), Value(true));
  auto card = cardinality(space);
  EXPECT_EQ(card.raw, card.valid);
}

TEST(Enumerate, ContradictionIsEmpty) {
  EXPECT_TRUE(enumerate(ab_space("A != A")).empty());
  EXPECT_EQ(cardinality(ab_space("A != A")).raw, 12u);
}

TEST(Enumerate, ModuloByZeroNamesConfigAndConstraint) {
  auto space = ConfigSpace::from_json(
      {{"name", "s"},
       {"params",
        {{{"name", "A"}, {"kind", "int-range"}, {"lo", 0}, {"hi", 2}},
         {{"name", "B"}, {"kind", "int-list"}, {"values", {4}}}}},
       {"constraints", {"B % A == 0"}}});
  try {
    enumerate(space);
    FAIL() << "expected EnumerationError";
  } catch (const EnumerationError& e) {
    EXPECT_EQ(e.config(), KernelConfig::from_json({{"A", 0}, {"B", 4}}));
    EXPECT_EQ(e.constraint(), "B % A == 0");
  }
  EXPECT_THROW(cardinality(space), EvalError);
}

TEST(Enumerate, DeclaredListOrderAndRangeStep) {
  auto space = ConfigSpace::from_json(
      {{"name", "s"},
       {"params",
        {{{"name", "L"}, {"kind", "int-list"}, {"values", {8, 2, 4}}},
         {{"name", "R"}, {"kind", "int-range"}, {"lo", 1}, {"hi", 6}, {"step", 2}},
         {{"name", "C"}, {"kind", "categorical"}, {"values", {"z", "a"}}}}},
       {"constraints", nlohmann::json::array()}});
  auto configs = enumerate(space);
  ASSERT_EQ(configs.size(), 18u);
  EXPECT_EQ(configs[0].at("L"), Value(std::int64_t{8}));
  EXPECT_EQ(configs[0].at("C"), Value(std::string("z")));
  EXPECT_EQ(configs[1].at("C"), Value(std::string("a")));
  EXPECT_EQ(configs[2].at("R"), Value(std::int64_t{3}));
  EXPECT_EQ(configs[4].at("R"), Value(std::int64_t{5}));
  EXPECT_EQ(configs[6].at("L"), Value(std::int64_t{2}));
}

TEST(Enumerate, StreamsWithoutMaterializing) {
  // 2^20 raw points; only the first few are visited.
  nlohmann::json params = nlohmann::json::array();
  for (int i = 0; i < 20; ++i) params.push_back({{"name", "b" + std::to_string(i)}, {"kind", "boolean"}});
  auto space = ConfigSpace::from_json({{"name", "wide"}, {"params", params}, {"constraints", nlohmann::json::array()}});
  EXPECT_EQ(space.raw_size(), 1u << 20);
  int n = 0;
  for_each_config(space, [&](const KernelConfig&) { return ++n < 5; });
  EXPECT_EQ(n, 5);
}

TEST(Validate, Examples) {
  auto space = ab_space("A < B");
  auto ok = validate(space, ab(1, 2));
  EXPECT_TRUE(ok.valid);
  EXPECT_TRUE(ok.violations.empty());
  auto bad = validate(space, ab(3, 2));
  EXPECT_FALSE(bad.valid);
  EXPECT_EQ(bad.violations, std::vector<std::string>{"A < B"});
  auto out = validate(space, ab(5, 2));
  EXPECT_FALSE(out.valid);
  ASSERT_EQ(out.violations.size(), 1u);
  EXPECT_NE(out.violations[0].find("A=5"), std::string::npos);
  EXPECT_THROW(validate(space, KernelConfig::from_json({{"A", 1}})), StructuralError);
  EXPECT_THROW(validate(space, KernelConfig::from_json({{"A", 1}, {"B", 2}, {"C", 3}})),
               StructuralError);
}

TEST(Validate, WrongTypeIsDomainViolation) {
  auto space = ab_space("");
  auto r = validate(space, KernelConfig::from_json({{"A", true}, {"B", 2}}));
  EXPECT_FALSE(r.valid);
}

// Every enumerated config validates and every other grid point does not.
TEST(EnumerateProperty, AgreesWithValidateOnWholeGrid) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto s = testing::random_scenario(seed);
    std::set<std::string> listed;
    for (const auto& c : enumerate(s.space)) {
      EXPECT_TRUE(validate(s.space, c).valid);
      listed.insert(c.digest());
    }
    EXPECT_EQ(listed.size(), cardinality(s.space).valid);
    const auto& params = s.space.params();
    std::vector<std::uint64_t> idx(params.size(), 0);
    std::uint64_t visited = 0;
    for (;;) {
      ScalarMap::Map m;
      for (std::size_t i = 0; i < params.size(); ++i) m[params[i].name()] = params[i].value_at(idx[i]);
      KernelConfig c(m);
      EXPECT_EQ(validate(s.space, c).valid, listed.count(c.digest()) == 1) << c.describe();
      ++visited;
      std::size_t k = params.size();
      while (k > 0 && ++idx[k - 1] == params[k - 1].size()) idx[--k] = 0;
      if (k == 0) break;
    }
    EXPECT_EQ(visited, s.space.raw_size());
  }
}

TEST(EnumerateProperty, ReparseGivesIdenticalSequence) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto s = testing::random_scenario(seed);
    auto again = ConfigSpace::from_json(s.space.to_json());
    EXPECT_EQ(again.digest(), s.space.digest());
    EXPECT_EQ(enumerate(again), enumerate(s.space));
  }
}

TEST(Fixtures, ShippedSpacesParse) {
  auto fa = load_space(testing::fixture("flash_attention.space.json").string());
  auto card = cardinality(fa);
  // Same order of magnitude as a few hundred evaluated variants.
  EXPECT_GE(card.valid, 100u);
  EXPECT_LT(card.valid, 1000u);
  EXPECT_EQ(card.valid, 556u);  // independent count with itertools
  auto rms = load_space(testing::fixture("rms_norm.space.json").string());
  EXPECT_EQ(cardinality(rms).valid, 106u);
}

TEST(Values, ShapeKeyParseAndDigest) {
  auto a = ShapeKey::parse("seq_len=2048,batch_size=64,dtype=fp16,causal=true");
  auto b = ShapeKey::from_json({{"batch_size", 64}, {"causal", true}, {"dtype", "fp16"}, {"seq_len", 2048}});
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.canonical(), R"({"batch_size":64,"causal":true,"dtype":"fp16","seq_len":2048})");
  EXPECT_THROW(ShapeKey::parse(""), ParseError);
  EXPECT_THROW(ShapeKey::parse("a=1,a=2"), ParseError);
  EXPECT_THROW(ShapeKey::from_json(nlohmann::json::object()), ParseError);
}

}  // namespace
}  // namespace ktune
