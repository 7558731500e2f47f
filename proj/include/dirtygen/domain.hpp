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

// Sampling from and membership in an attribute's clean value domain.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "dirtygen/errors.hpp"
#include "dirtygen/rng.hpp"
#include "dirtygen/schema.hpp"
#include "dirtygen/text.hpp"

namespace dirtygen {

inline constexpr int kMaxResampleAttempts = 1000;
inline constexpr std::uint64_t kUnbounded = std::numeric_limits<std::uint64_t>::max();

inline bool value_has_type(const Value& v, Datatype t) {
  switch (t) {
    case Datatype::kString: return std::holds_alternative<std::string>(v);
    case Datatype::kInteger: return std::holds_alternative<std::int64_t>(v);
    case Datatype::kFloat: return std::holds_alternative<double>(v);
  }
  return false;
}

inline std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > kUnbounded / a) return kUnbounded;
  return a * b;
}

inline std::uint64_t template_class_size(char cls) { return cls == '#' ? 10 : 26; }

inline char32_t template_class_char(char cls, std::uint64_t k) {
  switch (cls) {
    case '#': return static_cast<char32_t>(U'0' + k);
    case 'A': return static_cast<char32_t>(U'A' + k);
    default: return static_cast<char32_t>(U'a' + k);
  }
}

// Parses the template mini-language; literal runs are merged.
inline TemplateDomain parse_template(std::string_view text) {
  TemplateDomain d;
  d.size = 1;
  bool escape = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (!escape && c == '\\') {
      escape = true;
      continue;
    }
    if (!escape && (c == '#' || c == 'A' || c == 'a')) {
      d.slots.push_back({c, {}});
      d.size = saturating_mul(d.size, template_class_size(c));
    } else {
      if (d.slots.empty() || d.slots.back().cls != 0) d.slots.push_back({0, {}});
      d.slots.back().literal.push_back(c);
    }
    escape = false;
  }
  if (escape) throw ConfigError("template ends with a dangling escape: " + std::string(text));
  return d;
}

inline bool matches_template(const TemplateDomain& d, std::string_view s) {
  std::size_t pos = 0;
  for (const auto& slot : d.slots) {
    if (slot.cls == 0) {
      if (s.substr(pos, slot.literal.size()) != slot.literal) return false;
      pos += slot.literal.size();
      continue;
    }
    if (pos >= s.size()) return false;
    char c = s[pos++];
    bool ok = slot.cls == '#' ? (c >= '0' && c <= '9')
              : slot.cls == 'A' ? (c >= 'A' && c <= 'Z')
                                : (c >= 'a' && c <= 'z');
    if (!ok) return false;
  }
  return pos == s.size();
}

// Number of distinct clean values; kUnbounded for sequences or saturated
// templates, nullopt for continuous sources.
inline std::optional<std::uint64_t> enumerable_size(const AttributeSpec& spec) {
  return std::visit(
      [](const auto& d) -> std::optional<std::uint64_t> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ExplicitDomain>) {
          return d.values.size();
        } else if constexpr (std::is_same_v<T, RangeDomain>) {
          auto span = static_cast<std::uint64_t>(d.hi) - static_cast<std::uint64_t>(d.lo);
          return span == kUnbounded ? kUnbounded : span + 1;
        } else if constexpr (std::is_same_v<T, TemplateDomain>) {
          return d.size;
        } else if constexpr (std::is_same_v<T, SequenceDomain>) {
          return kUnbounded;
        } else {
          return std::nullopt;
        }
      },
      spec.domain);
}

inline Value sequence_at(const SequenceDomain& d, std::uint64_t k) {
  if (const auto* s = std::get_if<std::int64_t>(&d.start))
    return *s + std::get<std::int64_t>(d.step) * static_cast<std::int64_t>(k);
  return std::get<double>(d.start) + std::get<double>(d.step) * static_cast<double>(k);
}

// The k-th value of an enumerable domain (k < enumerable_size).
inline Value domain_at(const AttributeSpec& spec, std::uint64_t k) {
  return std::visit(
      [&](const auto& d) -> Value {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ExplicitDomain>) {
          return d.values.at(k);
        } else if constexpr (std::is_same_v<T, RangeDomain>) {
          return static_cast<std::int64_t>(static_cast<std::uint64_t>(d.lo) + k);
        } else if constexpr (std::is_same_v<T, TemplateDomain>) {
          std::u32string out;
          std::vector<char32_t> digits;
          for (auto it = d.slots.rbegin(); it != d.slots.rend(); ++it) {
            if (it->cls == 0) continue;
            const std::uint64_t base = template_class_size(it->cls);
            digits.push_back(template_class_char(it->cls, k % base));
            k /= base;
          }
          std::size_t next = digits.size();
          std::string s;
          for (const auto& slot : d.slots) {
            if (slot.cls == 0) {
              s += slot.literal;
            } else {
              s += encode_utf8(std::u32string(1, digits[--next]));
            }
          }
          return s;
        } else if constexpr (std::is_same_v<T, SequenceDomain>) {
          return sequence_at(d, k);
        } else {
          throw GenerationError("attribute '" + spec.name + "' has no enumerable domain");
        }
      },
      spec.domain);
}

// Checks the declared constraints (type, pattern, interval, admissible set)
// without regard to the value source.
inline bool satisfies_constraints(const AttributeSpec& spec, const Value& v) {
  if (is_null(v)) return spec.nullable_in_clean;
  if (!value_has_type(v, spec.datatype)) return false;
  if (spec.pattern_re && !std::regex_match(std::get<std::string>(v), *spec.pattern_re)) return false;
  if (is_numeric(v)) {
    const double x = as_double(v);
    if (!std::isfinite(x) || !spec.in_interval(x)) return false;
  }
  if (spec.admissible_set && spec.admissible_keys.count(to_json(v)) == 0) return false;
  return true;
}

inline bool in_domain(const AttributeSpec& spec, const Value& v) {
  return std::visit(
      [&](const auto& d) -> bool {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ExplicitDomain>) {
          return d.contains(v);
        } else if constexpr (std::is_same_v<T, RangeDomain>) {
          const auto* i = std::get_if<std::int64_t>(&v);
          return i && *i >= d.lo && *i <= d.hi;
        } else if constexpr (std::is_same_v<T, TemplateDomain>) {
          const auto* s = std::get_if<std::string>(&v);
          return s && matches_template(d, *s);
        } else if constexpr (std::is_same_v<T, SequenceDomain>) {
          if (const auto* i = std::get_if<std::int64_t>(&v)) {
            const auto start = std::get<std::int64_t>(d.start);
            const auto step = std::get<std::int64_t>(d.step);
            if (step == 0) return *i == start;
            const std::int64_t off = *i - start;
            return off % step == 0 && off / step >= 0;
          }
          if (const auto* x = std::get_if<double>(&v)) {
            const double start = std::get<double>(d.start), step = std::get<double>(d.step);
            if (step == 0) return *x == start;
            const double k = std::round((*x - start) / step);
            return k >= 0 && start + step * k == *x;
          }
          return false;
        } else {
          if (!is_numeric(v)) return false;
          const double x = as_double(v);
          if (!std::isfinite(x)) return false;
          if (!d.normal) return x >= d.a && x <= d.b;
          return true;
        }
      },
      spec.domain);
}

// True iff `v` is a value the clean generator could emit for `spec`.
inline bool can_produce(const AttributeSpec& spec, const Value& v) {
  if (is_null(v)) return spec.nullable_in_clean && spec.null_rate > 0;
  return value_has_type(v, spec.datatype) && satisfies_constraints(spec, v) && in_domain(spec, v);
}

inline std::size_t weighted_pick(const std::vector<double>& cumulative, double u) {
  const double target = u * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  if (it == cumulative.end()) --it;
  return static_cast<std::size_t>(it - cumulative.begin());
}

// One unconstrained draw from the domain. Sequences are addressed by the
// tuple index rather than the stream.
inline Value draw_from_domain(const AttributeSpec& spec, RngStream& rng, std::uint64_t tuple_index) {
  return std::visit(
      [&](const auto& d) -> Value {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ExplicitDomain>) {
          if (d.cumulative.empty()) return d.values[rng.uniform_index(d.values.size())];
          return d.values[weighted_pick(d.cumulative, rng.uniform01())];
        } else if constexpr (std::is_same_v<T, RangeDomain>) {
          return rng.uniform_int(d.lo, d.hi);
        } else if constexpr (std::is_same_v<T, TemplateDomain>) {
          std::string s;
          for (const auto& slot : d.slots) {
            if (slot.cls == 0) {
              s += slot.literal;
            } else {
              s.push_back(static_cast<char>(
                  template_class_char(slot.cls, rng.uniform_index(template_class_size(slot.cls)))));
            }
          }
          return s;
        } else if constexpr (std::is_same_v<T, SequenceDomain>) {
          return sequence_at(d, tuple_index);
        } else {
          const double x = d.normal ? rng.normal(d.a, d.b) : d.a + rng.uniform01() * (d.b - d.a);
          if (spec.datatype == Datatype::kInteger) return static_cast<std::int64_t>(std::llround(x));
          return x;
        }
      },
      spec.domain);
}

// Draws a clean value. Draws that violate a declared constraint are
// rejected and re-drawn (never clamped) so the source distribution keeps its
// shape inside the constraint region.
inline Value generate_value(const AttributeSpec& spec, RngStream& rng, std::uint64_t tuple_index = 0) {
  if (spec.nullable_in_clean && spec.null_rate > 0 && rng.uniform01() < spec.null_rate) return Null{};
  for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
    Value v = draw_from_domain(spec, rng, tuple_index);
    if (satisfies_constraints(spec, v)) return v;
    if (std::holds_alternative<SequenceDomain>(spec.domain)) break;
  }
  throw GenerationError("resample exhaustion for attribute '" + spec.name +
                        "': the source rarely or never satisfies the declared constraints");
}

}  // namespace dirtygen
