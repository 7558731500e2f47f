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

// Rate denominators. A rate is always a fraction of the applicable
// population and is realized as an exact count:
//
//   cell and per-cell column types       |targets| * N cells
//   semi_empty_tuple, inconsistency_among N rows
//   missing_attribute, bias               N tuples
//   insertion types                       N (inserted tuples per base tuple)
//
// count = round(rate * population), rounding half away from zero.

#pragma once

#include <cmath>
#include <cstdint>

#include "dirtygen/schema.hpp"

namespace dirtygen {

inline std::uint64_t applicable_population(const ErrorSpec& spec, std::uint64_t tuple_count) {
  if (is_tuple_scoped(spec.type) || is_insertion(spec.type)) return tuple_count;
  return static_cast<std::uint64_t>(spec.targets.size()) * tuple_count;
}

inline std::uint64_t applicable_population(const ErrorSpec& spec, const GeneratorConfig& config) {
  return applicable_population(spec, config.tuple_count);
}

inline std::uint64_t target_count(double rate, std::uint64_t population) {
  return static_cast<std::uint64_t>(std::llround(rate * static_cast<double>(population)));
}

inline std::uint64_t target_count(const ErrorSpec& spec, const GeneratorConfig& config) {
  return target_count(spec.rate, applicable_population(spec, config));
}

}  // namespace dirtygen
