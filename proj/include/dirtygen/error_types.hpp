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

#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace dirtygen {

// The twenty injectable error types, grouped by the scope they affect.
enum class ErrorType {
  // A single attribute value of a single tuple.
  kMissingValue,
  kSyntaxViolation,
  kIntervalViolation,
  kSetViolation,
  kMisspelling,
  kInadequateValueToAttributeContext,
  kValueItemsBeyondAttributeContext,
  kMeaninglessValue,
  kErroneousEntry,
  // The values of a single attribute.
  kUniquenessValueViolation,
  kSynonymsExistence,
  kOutlier,
  kMissingAttribute,
  // The attribute values of a single tuple.
  kSemiEmptyTuple,
  kInconsistencyAmongAttributeValues,
  kIrrelevantObservation,
  // The attribute values of several tuples.
  kRedundancyAboutEntity,
  kInconsistencyAboutEntity,
  kBias,
  kNoise,
};

inline constexpr std::size_t kErrorTypeCount = 20;

inline constexpr std::array<ErrorType, kErrorTypeCount> kAllErrorTypes = {
    ErrorType::kMissingValue,
    ErrorType::kSyntaxViolation,
    ErrorType::kIntervalViolation,
    ErrorType::kSetViolation,
    ErrorType::kMisspelling,
    ErrorType::kInadequateValueToAttributeContext,
    ErrorType::kValueItemsBeyondAttributeContext,
    ErrorType::kMeaninglessValue,
    ErrorType::kErroneousEntry,
    ErrorType::kUniquenessValueViolation,
    ErrorType::kSynonymsExistence,
    ErrorType::kOutlier,
    ErrorType::kMissingAttribute,
    ErrorType::kSemiEmptyTuple,
    ErrorType::kInconsistencyAmongAttributeValues,
    ErrorType::kIrrelevantObservation,
    ErrorType::kRedundancyAboutEntity,
    ErrorType::kInconsistencyAboutEntity,
    ErrorType::kBias,
    ErrorType::kNoise,
};

inline constexpr std::string_view name_of(ErrorType t) {
  switch (t) {
    case ErrorType::kMissingValue: return "missing_value";
    case ErrorType::kSyntaxViolation: return "syntax_violation";
    case ErrorType::kIntervalViolation: return "interval_violation";
    case ErrorType::kSetViolation: return "set_violation";
    case ErrorType::kMisspelling: return "misspelling";
    case ErrorType::kInadequateValueToAttributeContext: return "inadequate_value_to_attribute_context";
    case ErrorType::kValueItemsBeyondAttributeContext: return "value_items_beyond_attribute_context";
    case ErrorType::kMeaninglessValue: return "meaningless_value";
    case ErrorType::kErroneousEntry: return "erroneous_entry";
    case ErrorType::kUniquenessValueViolation: return "uniqueness_value_violation";
    case ErrorType::kSynonymsExistence: return "synonyms_existence";
    case ErrorType::kOutlier: return "outlier";
    case ErrorType::kMissingAttribute: return "missing_attribute";
    case ErrorType::kSemiEmptyTuple: return "semi_empty_tuple";
    case ErrorType::kInconsistencyAmongAttributeValues: return "inconsistency_among_attribute_values";
    case ErrorType::kIrrelevantObservation: return "irrelevant_observation";
    case ErrorType::kRedundancyAboutEntity: return "redundancy_about_entity";
    case ErrorType::kInconsistencyAboutEntity: return "inconsistency_about_entity";
    case ErrorType::kBias: return "bias";
    case ErrorType::kNoise: return "noise";
  }
  return "unknown";
}

inline std::optional<ErrorType> error_type_from_name(std::string_view name) {
  for (ErrorType t : kAllErrorTypes)
    if (name_of(t) == name) return t;
  return std::nullopt;
}

// Collision priority: insertions are placed first, then whole rows, then
// single-attribute column effects, then single cells.
enum class PlanLevel { kInsertion = 0, kRow = 1, kColumn = 2, kCell = 3 };

inline constexpr PlanLevel plan_level(ErrorType t) {
  switch (t) {
    case ErrorType::kIrrelevantObservation:
    case ErrorType::kRedundancyAboutEntity:
    case ErrorType::kInconsistencyAboutEntity:
      return PlanLevel::kInsertion;
    case ErrorType::kSemiEmptyTuple:
    case ErrorType::kInconsistencyAmongAttributeValues:
      return PlanLevel::kRow;
    case ErrorType::kUniquenessValueViolation:
    case ErrorType::kSynonymsExistence:
    case ErrorType::kOutlier:
    case ErrorType::kMissingAttribute:
    case ErrorType::kBias:
    case ErrorType::kNoise:
      return PlanLevel::kColumn;
    default:
      return PlanLevel::kCell;
  }
}

inline constexpr bool is_insertion(ErrorType t) { return plan_level(t) == PlanLevel::kInsertion; }

// Types whose population is the set of tuples rather than (tuple, attribute)
// cells.
inline constexpr bool is_tuple_scoped(ErrorType t) {
  return plan_level(t) == PlanLevel::kRow || t == ErrorType::kMissingAttribute ||
         t == ErrorType::kBias;
}

// Types that write one log line per event plus, for multi-line events, a
// row marker; the marker is what counts as the event.
inline constexpr bool logs_row_marker(ErrorType t) {
  return t == ErrorType::kSemiEmptyTuple || is_insertion(t);
}

}  // namespace dirtygen
