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

// In-memory model of a validated run configuration. Instances are produced by
// parse_config() and are immutable afterwards.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "dirtygen/error_types.hpp"
#include "dirtygen/value.hpp"

namespace dirtygen {

enum class Datatype { kString, kInteger, kFloat };

inline std::string_view name_of(Datatype t) {
  switch (t) {
    case Datatype::kString: return "string";
    case Datatype::kInteger: return "integer";
    case Datatype::kFloat: return "float";
  }
  return "?";
}

inline bool is_numeric(Datatype t) { return t != Datatype::kString; }

enum class SourceKind { kLexicon, kUniform, kNormal, kTemplate, kSequence, kConstantSet, kDependent, kAdmissibleSet };

// Declared location and shape of the value distribution, used by the
// outlier, noise and bias injectors.
struct Distribution {
  double mean = 0;
  double stddev = 0;
};

// --- Clean value domains -------------------------------------------------

// Finite list of values, optionally weighted.
struct ExplicitDomain {
  std::vector<Value> values;
  std::vector<double> cumulative;  // empty => uniform
  std::unordered_set<std::string> keys;  // to_json(value)

  bool contains(const Value& v) const { return keys.count(to_json(v)) != 0; }
};

// Closed integer range.
struct RangeDomain {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

// Template with placeholder classes: '#' digit, 'A' upper-case letter,
// 'a' lower-case letter; '\' escapes the next character.
struct TemplateDomain {
  struct Slot {
    char cls = 0;  // '#', 'A', 'a', or 0 for a literal
    std::string literal;
  };
  std::vector<Slot> slots;
  std::uint64_t size = 0;  // saturates at UINT64_MAX
};

struct SequenceDomain {
  Value start;
  Value step;
};

// uniform(min, max) or normal(mean, stddev), restricted to `lo..hi` when an
// interval is declared.
struct ContinuousDomain {
  bool normal = false;
  double a = 0;  // min or mean
  double b = 0;  // max or stddev
};

using Domain = std::variant<ExplicitDomain, RangeDomain, TemplateDomain, SequenceDomain, ContinuousDomain>;

struct AttributeSpec {
  std::string name;
  Datatype datatype = Datatype::kString;
  SourceKind source_kind = SourceKind::kConstantSet;
  std::string source_key;  // canonical form of the declared source
  std::string lexicon;     // lexicon name or path for kLexicon
  std::optional<std::string> pattern;
  std::shared_ptr<const std::regex> pattern_re;
  std::optional<std::pair<double, double>> interval;
  std::optional<std::vector<Value>> admissible_set;
  std::unordered_set<std::string> admissible_keys;
  bool unique = false;
  std::map<std::string, std::vector<std::string>> synonyms;
  bool nullable_in_clean = false;
  double null_rate = 0.0;
  std::optional<Distribution> distribution;
  std::optional<std::size_t> dependency;  // index of the rule that derives this attribute
  std::string replica_of;  // template name for replicated columns
  Domain domain;

  bool has_pattern() const { return static_cast<bool>(pattern_re); }
  bool in_interval(double x) const {
    return !interval || (x >= interval->first && x <= interval->second);
  }
};

struct DependencyRule {
  std::string determinant;
  std::string dependent;
  std::vector<std::pair<Value, Value>> mapping;
  std::unordered_map<std::string, std::size_t> index;  // to_json(determinant value) -> mapping slot

  const Value* lookup(const Value& determinant_value) const {
    auto it = index.find(to_json(determinant_value));
    return it == index.end() ? nullptr : &mapping[it->second].second;
  }
};

struct ErrorParams {
  // semi_empty_tuple
  double empty_fraction = 0.7;
  // redundancy_about_entity
  bool near_duplicate = true;
  std::size_t perturbed_attributes = 1;
  // outlier
  double k = 5.0;
  // noise
  double alpha = 0.05;
  // bias
  std::string group_attribute;
  Value group_value;
  std::string target_attribute;
  std::optional<double> shift;
  std::vector<std::pair<Value, double>> skewed_weights;
  // irrelevant_observation: per-attribute off-domain sources
  std::vector<AttributeSpec> offdomain;

  const AttributeSpec* offdomain_for(std::string_view attribute) const {
    for (const auto& s : offdomain)
      if (s.name == attribute) return &s;
    return nullptr;
  }
};

struct ErrorSpec {
  ErrorType type = ErrorType::kMissingValue;
  double rate = 0;
  std::vector<std::string> targets;  // resolved attribute names
  bool explicit_targets = false;
  ErrorParams params;
};

struct ScalingSpec {
  std::size_t column_replication = 0;
  std::size_t shard_count = 1;
};

enum class OutputMode { kNdjson, kJsonArray };

struct OutputSpec {
  std::string directory;
  OutputMode mode = OutputMode::kNdjson;
  std::size_t shard_count = 1;
};

struct GeneratorConfig {
  std::vector<AttributeSpec> schema;
  std::vector<DependencyRule> dependencies;
  std::vector<ErrorSpec> errors;
  std::uint64_t tuple_count = 0;
  std::uint64_t seed = 0;
  ScalingSpec scaling;
  OutputSpec output;
  std::vector<std::size_t> generation_order;  // determinants before dependents
  std::string canonical;                      // canonicalized document
  std::uint64_t config_hash = 0;

  std::optional<std::size_t> position(std::string_view name) const {
    for (std::size_t i = 0; i < schema.size(); ++i)
      if (schema[i].name == name) return i;
    return std::nullopt;
  }
  const AttributeSpec& attribute(std::string_view name) const {
    auto p = position(name);
    if (!p) throw Error("unknown attribute: " + std::string(name));
    return schema[*p];
  }
};

}  // namespace dirtygen
