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

#include <fstream>

#include <gtest/gtest.h>

#include "dirtygen/config.hpp"
#include "dirtygen/datagen.hpp"
#include "dirtygen/output.hpp"
#include "support/tempdir.hpp"

namespace dirtygen {
namespace {

using testing_support::TempDir;

std::string line_of(const Record& r) {
  std::string s;
  append_json(s, r);
  return s;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

TEST(DatasetFormat, RecordLine) {
  EXPECT_EQ(line_of(Record({{"name", Value("Anna")}, {"age", Value(std::int64_t{34})}})), R"({"name":"Anna","age":34})");
}

TEST(DatasetFormat, AbsentKeyIsOmitted) {
  EXPECT_EQ(line_of(Record({{"name", Value("Anna")}})), R"({"name":"Anna"})");
}

TEST(DatasetFormat, NullIsExplicit) {
  EXPECT_EQ(line_of(Record({{"name", Value("Anna")}, {"age", Value(Null{})}})), R"({"name":"Anna","age":null})");
}

TEST(DatasetFormat, FloatsUseShortestRoundTrip) {
  EXPECT_EQ(line_of(Record({{"x", Value(0.1)}, {"y", Value(100.37)}, {"z", Value(2.0)}})),
            R"({"x":0.1,"y":100.37,"z":2.0})");
}

TEST(DatasetFormat, StringsEscapeControlCharacters) {
  EXPECT_EQ(line_of(Record({{"s", Value(std::string("a\"b\\c\n\t\x01"))}})), R"({"s":"a\"b\\c\n\t\u0001"})");
}

TEST(DatasetFormat, NdjsonFileLayout) {
  TempDir dir;
  write_dataset(dir / "d.ndjson", {Record({{"a", Value(std::int64_t{1})}}), Record({{"a", Value(std::int64_t{2})}})},
                OutputMode::kNdjson);
  EXPECT_EQ(read_file(dir / "d.ndjson"), "{\"a\":1}\n{\"a\":2}\n");
}

TEST(DatasetFormat, ArrayFileLayout) {
  TempDir dir;
  write_dataset(dir / "d.json", {Record({{"a", Value(std::int64_t{1})}}), Record({{"a", Value(std::int64_t{2})}})},
                OutputMode::kJsonArray);
  EXPECT_EQ(read_file(dir / "d.json"), "[\n{\"a\":1},\n{\"a\":2}\n]\n");
  write_dataset(dir / "e.json", {}, OutputMode::kJsonArray);
  EXPECT_EQ(read_file(dir / "e.json"), "[]\n");
}

TEST(DatasetRoundTrip, ThousandRecordsBothModes) {
  GeneratorConfig c = parse_config(R"({
    "generation": {"tuple_count": 1000, "seed": 5},
    "schema": [
      {"name": "name", "type": "string", "source": {"kind": "lexicon", "name": "first_names"}},
      {"name": "age", "type": "integer", "source": {"kind": "uniform", "min": -50, "max": 50}},
      {"name": "w", "type": "float", "source": {"kind": "normal", "mean": 0, "stddev": 1e-3}},
      {"name": "n", "type": "string", "source": {"kind": "lexicon", "name": "words"}, "nullable_in_clean": true,
       "null_rate": 0.3}
    ]})");
  auto records = generate_clean_records(c);
  records[7].erase("age");
  TempDir dir;
  for (OutputMode mode : {OutputMode::kNdjson, OutputMode::kJsonArray}) {
    auto path = dir / ("r" + extension_for(mode));
    write_dataset(path, records, mode);
    EXPECT_EQ(read_dataset(path), records);
    const std::string bytes = read_file(path);
    write_dataset(path, read_dataset(path), mode);
    EXPECT_EQ(read_file(path), bytes);
  }
}

TEST(DatasetRead, DeletedRowsAreNull) {
  Rows rows = parse_ndjson("{\"a\":1}\nnull\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_TRUE(rows[0]);
  EXPECT_FALSE(rows[1]);
}

TEST(DatasetRead, ArrayFileReadAsNdjsonFails) {
  TempDir dir;
  write_dataset(dir / "d.json", {Record({{"a", Value(std::int64_t{1})}})}, OutputMode::kJsonArray);
  EXPECT_THROW(read_rows(dir / "d.json", OutputMode::kNdjson), FormatError);
}

TEST(DatasetRead, MalformedLineNamesTheLine) {
  try {
    parse_ndjson("{\"a\":1}\n{\"a\":\n");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(parse_ndjson("{\"a\":1}"), FormatError);
  EXPECT_THROW(parse_ndjson("{\"a\":1}\n\n"), FormatError);
  EXPECT_THROW(parse_ndjson("[1]\n"), FormatError);
}

TEST(LogFormat, MissingValueLine) {
  std::string s;
  append_log_line(s, {5, 5, "city", ErrorType::kMissingValue, Value("Berlin"), Value(Null{})});
  EXPECT_EQ(s, "5\t5\tcity\tmissing_value\t\"Berlin\"\tnull\n");
}

TEST(LogFormat, InsertedRowMarker) {
  std::string s;
  append_log_line(s, {1000, std::nullopt, std::nullopt, ErrorType::kIrrelevantObservation, std::nullopt, std::nullopt});
  EXPECT_EQ(s, "1000\t-\t-\tirrelevant_observation\t-\t-\n");
}

TEST(LogFormat, EmptyLogIsHeaderOnly) {
  TempDir dir;
  write_error_log(dir / "errors.log", {}, 42, 0xabcdef);
  EXPECT_EQ(read_file(dir / "errors.log"),
            "# dirtygen-errors/1 columns=dirty_index,clean_index,attribute,error_type,clean_value,dirty_value "
            "seed=42 config_hash=0000000000abcdef\n");
  EXPECT_TRUE(read_error_log(dir / "errors.log").empty());
}

TEST(LogFormat, RoundTrip) {
  std::vector<ErrorLogEntry> log = {
      {3, 3, "age", ErrorType::kIntervalViolation, Value(std::int64_t{34}), Value(std::int64_t{181})},
      {4, 4, "segment", ErrorType::kMissingAttribute, Value("x"), std::nullopt},
      {4, 4, "name", ErrorType::kMisspelling, Value("tab\there"), Value("tab\thrre")},
      {9, 9, std::nullopt, ErrorType::kSemiEmptyTuple, std::nullopt, std::nullopt},
      {9, 9, "score", ErrorType::kSemiEmptyTuple, Value(1.5), Value(Null{})},
      {12, 2, std::nullopt, ErrorType::kRedundancyAboutEntity, std::nullopt, std::nullopt},
      {12, 2, "name", ErrorType::kRedundancyAboutEntity, std::nullopt, Value("Ana")},
      {13, std::nullopt, "name", ErrorType::kIrrelevantObservation, std::nullopt, Value("-")}};
  TempDir dir;
  write_error_log(dir / "errors.log", log, 1, 2);
  EXPECT_EQ(read_error_log(dir / "errors.log"), log);
}

TEST(LogFormat, FiveFieldsIsAnError) {
  try {
    parse_error_log("# header\n5\t5\tcity\tmissing_value\t\"Berlin\"\tnull\n5\t5\tcity\tmissing_value\tnull\n");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(LogFormat, UnknownTypeIsAnError) {
  EXPECT_THROW(parse_error_log("1\t1\ta\tgremlins\t1\t2\n"), FormatError);
}

TEST(Sharding, FileNames) {
  EXPECT_EQ(dataset_file_name("clean", OutputMode::kNdjson, 0, 1), "clean.ndjson");
  EXPECT_EQ(dataset_file_name("dirty", OutputMode::kJsonArray, 1, 4), "dirty-0002-of-0004.json");
}

TEST(Sharding, ContiguousRanges) {
  TempDir dir;
  ShardedWriter w(dir.path(), "clean", OutputMode::kNdjson, 3, 10);
  for (std::uint64_t i = 0; i < 10; ++i) w.write(i, Record({{"i", Value(static_cast<std::int64_t>(i))}}));
  w.write(10, Record({{"i", Value(std::int64_t{100})}}));  // inserted row follows tuple 9
  w.close();
  std::vector<std::int64_t> all;
  std::uint64_t prev_last = 0;
  bool first = true;
  for (const auto& p : w.paths(dir.path(), "clean", OutputMode::kNdjson)) {
    auto rows = read_dataset(p);
    ASSERT_FALSE(rows.empty());
    for (auto& r : rows) all.push_back(std::get<std::int64_t>(*r.find("i")));
    auto head = static_cast<std::uint64_t>(std::get<std::int64_t>(*rows.front().find("i")));
    if (!first) {
      EXPECT_EQ(head, prev_last + 1);
    }
    prev_last = static_cast<std::uint64_t>(std::get<std::int64_t>(*rows.back().find("i")));
    first = false;
  }
  EXPECT_EQ(all, (std::vector<std::int64_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 100}));
}

TEST(Manifest, DigestIsFnvOfBytes) {
  TempDir dir;
  write_text(dir / "a", "a");
  EXPECT_EQ(file_digest(dir / "a"), 0xaf63dc4c8601ec8cULL);
  std::string big(200000, 'x');
  write_text(dir / "b", big);
  EXPECT_EQ(file_digest(dir / "b"), fnv1a64(big));
}

TEST(Manifest, JsonFields) {
  RunManifest m;
  m.config_hash = 255;
  m.seed = 7;
  m.base_count = 10;
  m.inserted_count = 2;
  m.events[static_cast<std::size_t>(ErrorType::kMissingValue)] = 3;
  m.files.emplace_back("clean.ndjson", 1);
  auto j = nlohmann::json::parse(m.to_json());
  EXPECT_EQ(j["tool"], "dirtygen");
  EXPECT_EQ(j["version"], kToolVersion);
  EXPECT_EQ(j["config_hash"], "00000000000000ff");
  EXPECT_EQ(j["dirty_count"], 12);
  EXPECT_EQ(j["error_counts"], nlohmann::json({{"missing_value", 3}}));
  EXPECT_EQ(j["file_digests"]["clean.ndjson"], "0000000000000001");
}

}  // namespace
}  // namespace dirtygen
