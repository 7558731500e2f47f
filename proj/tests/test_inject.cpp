// Copyright 2026 The dirtygen Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "dirtygen/config.hpp"
#include "dirtygen/datagen.hpp"
#include "dirtygen/inject.hpp"
#include "support/oracles.hpp"

namespace dirtygen {
namespace {

using Json = nlohmann::json;

const char* kSchema = R"([
  {"name": "id", "type": "string", "source": {"kind": "template", "template": "ID-###"}, "unique": true,
   "pattern": "ID-[0-9]{3}"},
  {"name": "name", "type": "string", "source": {"kind": "lexicon", "name": "last_names"}},
  {"name": "city", "type": "string", "source": {"kind": "set", "values": ["Berlin", "Munich", "New York"]},
   "synonyms": {"New York": ["NYC"]}},
  {"name": "zip", "type": "string"},
  {"name": "age", "type": "integer", "source": {"kind": "uniform", "min": 0, "max": 120}, "interval": [0, 120]},
  {"name": "score", "type": "float", "source": {"kind": "normal", "mean": 50, "stddev": 10}},
  {"name": "grade", "type": "string", "admissible_set": ["A", "B"]},
  {"name": "segment", "type": "string", "source": {"kind": "set", "values": ["x", "y"]}},
  {"name": "street", "type": "string", "source": {"kind": "lexicon", "name": "streets"}},
  {"name": "word", "type": "string", "source": {"kind": "lexicon", "name": "words"}}
])";

const char* kRule = R"([{"determinant": "city", "dependent": "zip",
                         "mapping": {"Berlin": "10115", "Munich": "80331", "New York": "10001"}}])";

GeneratorConfig make(std::uint64_t n, const std::string& errors, std::uint64_t seed = 3) {
  Json d = {{"generation", {{"tuple_count", n}, {"seed", seed}}},
            {"schema", Json::parse(kSchema)},
            {"dependencies", Json::parse(kRule)},
            {"errors", Json::parse(errors)}};
  return parse_config(d.dump());
}

TEST(FixedDraws, TransposeAtThree) {
  EditOp op;
  op.kind = EditOp::kTranspose;
  op.position = 3;
  EXPECT_EQ(apply_edit(std::string("Smith"), op), std::optional<std::string>("Smiht"));
  EXPECT_EQ(oracle::damerau("Smith", "Smiht"), 1u);
}

TEST(FixedDraws, IntervalViolationHighSide) {
  // floor(120) + 1 + floor(0.5 * 120)
  EXPECT_EQ(interval_violation_value(Datatype::kInteger, 0, 120, true, 0.5), Value(std::int64_t{181}));
  EXPECT_EQ(interval_violation_value(Datatype::kInteger, 0, 120, false, 0.0), Value(std::int64_t{-1}));
  EXPECT_DOUBLE_EQ(std::get<double>(interval_violation_value(Datatype::kFloat, 0, 1, true, 0.25)), 1.75);
  EXPECT_GT(std::get<double>(interval_violation_value(Datatype::kFloat, 0, 1, true, 1.0)), 1.0);
}

TEST(FixedDraws, OutlierAtKSigma) {
  EXPECT_EQ(outlier_value(Datatype::kFloat, 50, 10, 5, 0, true), Value(100.0));
  EXPECT_EQ(outlier_value(Datatype::kFloat, 50, 10, 5, 0, false), Value(0.0));
  EXPECT_EQ(outlier_value(Datatype::kInteger, 50, 3, 5, 0.5, true), Value(std::int64_t{73}));  // 72.5 up
}

TEST(FixedDraws, NoiseAddsEpsilon) {
  EXPECT_DOUBLE_EQ(std::get<double>(apply_noise(Value(100.0), 0.37)), 100.37);
  EXPECT_EQ(apply_noise(Value(std::int64_t{100}), 0.2), Value(std::int64_t{101}));
  EXPECT_EQ(apply_noise(Value(std::int64_t{100}), -2.6), Value(std::int64_t{97}));
}

TEST(InjectCell, MissingValueIsNull) {
  GeneratorConfig c = make(10, "[]");
  RngStream r(1);
  EXPECT_TRUE(is_null(inject_cell(ErrorType::kMissingValue, Value("Berlin"), c.attribute("city"), c, r)));
}

TEST(InjectCell, ErroneousEntryWithOneAlternative) {
  GeneratorConfig c = make(10, "[]");
  for (std::uint64_t s = 0; s < 20; ++s) {
    RngStream r(s);
    EXPECT_EQ(inject_cell(ErrorType::kErroneousEntry, Value("A"), c.attribute("grade"), c, r), Value("B"));
  }
}

TEST(InjectCell, MisspellingIsOneEditAway) {
  GeneratorConfig c = make(10, "[]");
  for (std::uint64_t s = 0; s < 500; ++s) {
    RngStream r(s);
    auto d = std::get<std::string>(inject_cell(ErrorType::kMisspelling, Value("Schneider"), c.attribute("name"), c, r));
    EXPECT_EQ(oracle::damerau("Schneider", d), 1u) << d;
  }
}

TEST(InjectCell, IntervalViolationLeavesInterval) {
  GeneratorConfig c = make(10, "[]");
  for (std::uint64_t s = 0; s < 500; ++s) {
    RngStream r(s);
    auto d = std::get<std::int64_t>(inject_cell(ErrorType::kIntervalViolation, Value(std::int64_t{34}), c.attribute("age"), c, r));
    EXPECT_TRUE(d < 0 || d > 120) << d;
    EXPECT_TRUE(d >= -121 && d <= 241) << d;
  }
}

TEST(InjectCell, SyntaxViolationBreaksPattern) {
  GeneratorConfig c = make(10, "[]");
  const std::regex re("ID-[0-9]{3}");
  for (std::uint64_t s = 0; s < 300; ++s) {
    RngStream r(s);
    auto d = std::get<std::string>(inject_cell(ErrorType::kSyntaxViolation, Value("ID-042"), c.attribute("id"), c, r));
    EXPECT_FALSE(std::regex_match(d, re)) << d;
  }
}

TEST(InjectCell, MeaninglessValueMatchesNothing) {
  GeneratorConfig c = make(10, "[]");
  std::set<std::string> lexicon_words;
  for (const char* l : {"last_names", "streets", "words"})
    for (auto& w : oracle::read_lines_trimmed(bundled_lexicon_dir() / (std::string(l) + ".txt"))) lexicon_words.insert(w);
  for (std::uint64_t s = 0; s < 300; ++s) {
    RngStream r(s);
    auto d = std::get<std::string>(inject_cell(ErrorType::kMeaninglessValue, Value("x"), c.attribute("word"), c, r));
    EXPECT_GE(d.size(), 3u);
    EXPECT_LE(d.size(), 10u);
    EXPECT_EQ(d.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789#?%"), std::string::npos);
    EXPECT_FALSE(lexicon_words.count(d)) << d;
  }
}

TEST(InjectColumn, SynonymWithSingleChoice) {
  GeneratorConfig c = make(10, "[]");
  ErrorSpec e;
  e.type = ErrorType::kSynonymsExistence;
  RngStream r(4);
  EXPECT_EQ(inject_column(ErrorType::kSynonymsExistence, Value("New York"), c.attribute("city"), e, r), Value("NYC"));
}

TEST(InjectColumn, UniquenessCopiesDonor) {
  GeneratorConfig c = make(10, "[]");
  ErrorSpec e;
  RngStream r(4);
  const Value donor("ID-3");
  EXPECT_EQ(inject_column(ErrorType::kUniquenessValueViolation, Value("ID-9"), c.attribute("id"), e, r, &donor), donor);
}

TEST(InjectColumn, MissingAttributeRemovesKey) {
  GeneratorConfig c = make(10, "[]");
  ErrorSpec e;
  RngStream r(4);
  EXPECT_FALSE(inject_column(ErrorType::kMissingAttribute, Value("x"), c.attribute("segment"), e, r));
}

TEST(InjectColumn, OutlierDefaultKExceedsCleanDraws) {
  GeneratorConfig c = make(10, "[]");
  const AttributeSpec& score = c.attribute("score");
  double max_dev = 0;
  for (std::uint64_t i = 0; i < 1000000; ++i) {
    RngStream r = derive_stream(c.seed, "clean", i, "score");
    max_dev = std::max(max_dev, std::abs(std::get<double>(generate_value(score, r)) - 50.0));
  }
  ErrorSpec e;
  ASSERT_EQ(e.params.k, 5.0);
  EXPECT_LT(max_dev, e.params.k * 10.0);
  for (std::uint64_t s = 0; s < 200; ++s) {
    RngStream r(s);
    auto d = std::get<double>(*inject_column(ErrorType::kOutlier, Value(50.0), score, e, r));
    EXPECT_GT(std::abs(d - 50.0), max_dev);
  }
}

TEST(InjectRow, SemiEmptyOnTenAttributes) {
  GeneratorConfig c = make(10, R"([{"type": "semi_empty_tuple", "rate": 0.1}])");
  Record r = generate_record(c, 0);
  ASSERT_EQ(r.size(), 10u);
  RngStream rng(8);
  auto changes = inject_row(ErrorType::kSemiEmptyTuple, r, c.errors[0], c, rng);
  EXPECT_EQ(changes.size(), 7u);
  std::size_t nulls = 0;
  for (const auto& f : r.fields()) nulls += is_null(f.second);
  EXPECT_EQ(nulls, 7u);
}

TEST(InjectRow, SemiEmptyKeepsOneOfTwo) {
  Json d = {{"generation", {{"tuple_count", 5}}},
            {"schema", Json::parse(R"([{"name": "a", "type": "string", "admissible_set": ["p", "q"]},
                                       {"name": "b", "type": "string", "admissible_set": ["r", "s"]}])")},
            {"errors", Json::parse(R"([{"type": "semi_empty_tuple", "rate": 0.2}])")}};
  GeneratorConfig c = parse_config(d.dump());
  Record r = generate_record(c, 0);
  RngStream rng(8);
  auto changes = inject_row(ErrorType::kSemiEmptyTuple, r, c.errors[0], c, rng);
  EXPECT_EQ(changes.size(), 1u);
  EXPECT_NE(is_null(r.fields()[0].second), is_null(r.fields()[1].second));
}

TEST(InjectRow, InconsistencyAmongAttributes) {
  Json d = {{"generation", {{"tuple_count", 5}}},
            {"schema", Json::parse(R"([{"name": "city", "type": "string", "source": {"kind": "set", "values": ["Berlin", "Munich"]}},
                                       {"name": "zip", "type": "string"}])")},
            {"dependencies", Json::parse(R"([{"determinant": "city", "dependent": "zip",
                                              "mapping": {"Berlin": "10115", "Munich": "80331"}}])")},
            {"errors", Json::parse(R"([{"type": "inconsistency_among_attribute_values", "rate": 0.2}])")}};
  GeneratorConfig c = parse_config(d.dump());
  Record r({{"city", Value("Berlin")}, {"zip", Value("10115")}});
  RngStream rng(2);
  inject_row(ErrorType::kInconsistencyAmongAttributeValues, r, c.errors[0], c, rng);
  EXPECT_EQ(r, Record({{"city", Value("Berlin")}, {"zip", Value("80331")}}));
}

TEST(InjectMultirow, ExactDuplicateCopiesSource) {
  GeneratorConfig c = make(50, R"([{"type": "redundancy_about_entity", "rate": 0.1, "params": {"near_duplicate": false}}])");
  MaterializedRun run = materialize(c);
  ASSERT_EQ(run.stats.inserted_count, 5u);
  std::uint64_t last_base = 0;
  for (const auto& [idx, row] : run.dirty) {
    if (idx < 50) {
      last_base = idx;
      continue;
    }
    EXPECT_EQ(row, run.clean[last_base]) << idx;  // placed right after its source
  }
}

TEST(InjectMultirow, BiasShiftsByOneSigma) {
  GeneratorConfig c = make(400, R"([{"type": "bias", "rate": 0.1,
      "params": {"group_attribute": "segment", "group_value": "x", "target_attribute": "score"}}])");
  MaterializedRun run = materialize(c);
  std::size_t n = 0;
  for (const auto& e : run.log) {
    if (e.type != ErrorType::kBias) continue;
    ++n;
    EXPECT_NEAR(std::get<double>(*e.dirty_value) - std::get<double>(*e.clean_value), 10.0, 1e-9);
    EXPECT_EQ(*run.clean[e.dirty_index].find("segment"), Value("x"));
  }
  EXPECT_EQ(n, 40u);
}

TEST(ApplyPlan, EmptyPlanIsIdentity) {
  GeneratorConfig c = make(100, "[]");
  MaterializedRun run = materialize(c);
  EXPECT_TRUE(run.log.empty());
  ASSERT_EQ(run.dirty.size(), run.clean.size());
  for (std::size_t i = 0; i < run.clean.size(); ++i) EXPECT_EQ(run.dirty[i].second, run.clean[i]);
}

TEST(ApplyPlan, SingleMissingValue) {
  GeneratorConfig c = make(100, R"([{"type": "missing_value", "rate": 0.01, "attributes": ["city"]}])");
  MaterializedRun run = materialize(c);
  ASSERT_EQ(run.log.size(), 1u);
  std::size_t diffs = 0;
  for (std::size_t i = 0; i < run.clean.size(); ++i)
    for (std::size_t k = 0; k < run.clean[i].size(); ++k)
      diffs += !(run.clean[i].fields()[k] == run.dirty[i].second.fields()[k]);
  EXPECT_EQ(diffs, 1u);
  const auto& e = run.log[0];
  EXPECT_EQ(e.attribute, std::optional<std::string>("city"));
  EXPECT_TRUE(is_null(*run.dirty[e.dirty_index].second.find("city")));
}

TEST(VerifyError, Examples) {
  GeneratorConfig c = make(10, R"([
    {"type": "interval_violation", "rate": 0.1, "attributes": ["age"]},
    {"type": "missing_value", "rate": 0.1, "attributes": ["city"]},
    {"type": "misspelling", "rate": 0.1, "attributes": ["name"]}])");
  VerifyContext ctx{&c, nullptr};
  Record clean({{"name", Value("Smith")}, {"city", Value("Berlin")}, {"age", Value(std::int64_t{34})}});

  Record dirty = clean;
  dirty.set("age", Value(std::int64_t{181}));
  EXPECT_TRUE(verify_error({0, 0, "age", ErrorType::kIntervalViolation, Value(std::int64_t{34}), Value(std::int64_t{181})},
                           &clean, dirty, ctx));

  dirty = clean;
  dirty.set("city", Value("Munich"));
  EXPECT_FALSE(verify_error({0, 0, "city", ErrorType::kMissingValue, Value("Berlin"), Value("Munich")}, &clean, dirty, ctx));

  dirty = clean;
  dirty.set("name", Value("Smiht"));
  EXPECT_TRUE(verify_error({0, 0, "name", ErrorType::kMisspelling, Value("Smith"), Value("Smiht")}, &clean, dirty, ctx));

  dirty.set("name", Value("Smoth"));
  EXPECT_FALSE(verify_error({0, 0, "name", ErrorType::kMisspelling, Value("Smith"), Value("Smiht")}, &clean, dirty, ctx));
}

}  // namespace
}  // namespace dirtygen
