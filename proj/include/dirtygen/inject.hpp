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

// Error injection. Every injector draws from
// derive_stream(seed, "inject:<type>", dirty_index, attribute) and re-draws
// until the result provably differs from the clean value.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dirtygen/datagen.hpp"
#include "dirtygen/domain.hpp"
#include "dirtygen/errorplan.hpp"
#include "dirtygen/errors.hpp"
#include "dirtygen/rng.hpp"
#include "dirtygen/schema.hpp"
#include "dirtygen/text.hpp"

namespace dirtygen {

struct ErrorLogEntry {
  std::uint64_t dirty_index = 0;
  std::optional<std::uint64_t> clean_index;  // source tuple for copies of a base tuple
  std::optional<std::string> attribute;      // none for row markers
  ErrorType type = ErrorType::kMissingValue;
  std::optional<Value> clean_value;          // none: no clean cell
  std::optional<Value> dirty_value;          // none: no dirty cell (absent key or marker)

  bool is_marker() const { return !attribute.has_value(); }
  friend bool operator==(const ErrorLogEntry&, const ErrorLogEntry&) = default;
};

// True for the lines that count as one injected error of their type: the
// row marker for multi-line events, every line otherwise.
inline bool counts_as_event(const ErrorLogEntry& e) {
  return logs_row_marker(e.type) ? e.is_marker() : true;
}

// --- helpers with fixed draws (exposed for tests) --------------------------

// Value strictly outside [lo, hi]: integers land in [hi+1, hi+1+range]
// (resp. below lo), floats in (hi, hi+range].
inline Value interval_violation_value(Datatype type, double lo, double hi, bool high, double u) {
  const double range = hi - lo;
  if (type == Datatype::kInteger) {
    const auto ilo = static_cast<std::int64_t>(std::ceil(lo));
    const auto ihi = static_cast<std::int64_t>(std::floor(hi));
    const auto off = static_cast<std::int64_t>(std::floor(u * range));
    return high ? ihi + 1 + off : ilo - 1 - off;
  }
  double x = high ? hi + (1.0 - u) * range : lo - (1.0 - u) * range;
  if (high && !(x > hi)) x = std::nextafter(hi, INFINITY);
  if (!high && !(x < lo)) x = std::nextafter(lo, -INFINITY);
  return x;
}

// mean +/- k*sd*(1+u); integers are rounded away from the mean.
inline Value outlier_value(Datatype type, double mean, double sd, double k, double u, bool positive) {
  const double d = k * sd * (1.0 + u);
  const double x = positive ? mean + d : mean - d;
  if (type == Datatype::kInteger) return static_cast<std::int64_t>(positive ? std::ceil(x) : std::floor(x));
  return x;
}

inline Value add_numeric(const Value& v, double delta) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i + static_cast<std::int64_t>(std::llround(delta));
  return as_double(v) + delta;
}

// Noise perturbation. Integer epsilons are rounded away from zero so the
// value always moves.
inline Value apply_noise(const Value& v, double epsilon) {
  if (std::holds_alternative<std::int64_t>(v)) {
    double r = std::max(1.0, std::round(std::abs(epsilon)));
    return add_numeric(v, epsilon < 0 ? -r : r);
  }
  return as_double(v) + epsilon;
}

inline double noise_bound(const AttributeSpec& spec, double alpha) {
  const double b = 6.0 * alpha * spec.distribution->stddev;
  return spec.datatype == Datatype::kInteger ? std::max(1.0, std::round(b)) : b;
}

inline constexpr std::string_view kMeaninglessAlphabet = "abcdefghijklmnopqrstuvwxyz0123456789#?%";

inline bool is_lexicon_member(const GeneratorConfig& config, const std::string& s) {
  for (const auto& a : config.schema) {
    if (a.source_kind != SourceKind::kLexicon) continue;
    if (const auto* ex = std::get_if<ExplicitDomain>(&a.domain); ex && ex->contains(Value(s))) return true;
  }
  return false;
}

inline bool is_meaningless(const GeneratorConfig& config, const Value& v) {
  const auto* s = std::get_if<std::string>(&v);
  if (!s || s->size() < 3 || s->size() > 10) return false;
  for (char c : *s)
    if (kMeaninglessAlphabet.find(c) == std::string_view::npos) return false;
  for (const auto& a : config.schema) {
    if (a.pattern_re && std::regex_match(*s, *a.pattern_re)) return false;
    if (can_produce(a, v)) return false;
  }
  return !is_lexicon_member(config, *s);
}

inline Value meaningless_value(const GeneratorConfig& config, RngStream& rng) {
  for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
    const std::size_t len = 3 + rng.uniform_index(8);
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s.push_back(kMeaninglessAlphabet[rng.uniform_index(kMeaninglessAlphabet.size())]);
    Value v = s;
    if (is_meaningless(config, v)) return v;
  }
  throw GenerationError("cannot produce a meaningless value for this schema");
}

namespace inject_detail {

inline char32_t random_letter(RngStream& rng, bool upper) {
  return static_cast<char32_t>((upper ? U'A' : U'a') + rng.uniform_index(26));
}

// One random single-character edit. Inserted and substituted letters match
// the case of the character they replace or follow.
inline EditOp random_edit(const std::u32string& s, RngStream& rng) {
  for (;;) {
    EditOp op;
    op.kind = static_cast<EditOp::Kind>(rng.uniform_index(4));
    const std::size_t n = s.size();
    if (op.kind == EditOp::kInsert) {
      op.position = rng.uniform_index(n + 1);
    } else if (op.kind == EditOp::kTranspose) {
      if (n < 2) continue;
      op.position = rng.uniform_index(n - 1);
    } else {
      if (n == 0) continue;
      op.position = rng.uniform_index(n);
    }
    const std::size_t ref = op.position < n ? op.position : (n ? n - 1 : 0);
    const bool upper = n && is_ascii_upper(s[ref]);
    op.ch = random_letter(rng, upper);
    return op;
  }
}

inline std::optional<std::string> misspell(const std::string& clean, RngStream& rng) {
  const std::u32string s = to_u32(clean);
  for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
    auto out = apply_edit(s, random_edit(s, rng));
    if (out && *out != s) return encode_utf8(*out);
  }
  return std::nullopt;
}

// Pattern-breaking mutation: drop or move a separator, flip the case of a
// letter, or swap a digit for a letter (and back).
inline std::optional<std::u32string> syntax_mutation(const std::u32string& s, RngStream& rng) {
  if (s.empty()) return std::u32string(U"#");
  const std::size_t p = rng.uniform_index(s.size());
  const char32_t c = s[p];
  std::u32string out = s;
  switch (rng.uniform_index(4)) {
    case 0:  // remove a separator
      if (is_ascii_alnum(c)) return std::nullopt;
      out.erase(p, 1);
      return out;
    case 1:  // swap a separator with its neighbour
      if (is_ascii_alnum(c) || s.size() < 2) return std::nullopt;
      std::swap(out[p], out[p + 1 < s.size() ? p + 1 : p - 1]);
      return out;
    case 2:  // case flip
      if (is_ascii_upper(c)) out[p] = c - U'A' + U'a';
      else if (is_ascii_lower(c)) out[p] = c - U'a' + U'A';
      else return std::nullopt;
      return out;
    default:  // digit <-> letter
      if (is_ascii_digit(c)) out[p] = U'a' + (c - U'0');
      else if (is_ascii_lower(c)) out[p] = U'0' + (c - U'a') % 10;
      else if (is_ascii_upper(c)) out[p] = U'0' + (c - U'A') % 10;
      else return std::nullopt;
      return out;
  }
}

// Single edit on the decimal text of a number, read back as the same type.
inline std::optional<Value> numeric_edit(const Value& v, RngStream& rng) {
  std::string text = to_json(v);
  std::u32string s = to_u32(text);
  EditOp op;
  op.kind = static_cast<EditOp::Kind>(rng.uniform_index(3));  // no transpose
  op.position = rng.uniform_index(s.size() + (op.kind == EditOp::kInsert ? 1 : 0));
  op.ch = static_cast<char32_t>(U'0' + rng.uniform_index(10));
  auto out = apply_edit(s, op);
  if (!out) return std::nullopt;
  const std::string edited = encode_utf8(*out);
  if (std::holds_alternative<std::int64_t>(v)) {
    std::int64_t x = 0;
    auto [end, ec] = std::from_chars(edited.data(), edited.data() + edited.size(), x);
    if (ec != std::errc() || end != edited.data() + edited.size()) return std::nullopt;
    return x;
  }
  double x = 0;
  auto [end, ec] = std::from_chars(edited.data(), edited.data() + edited.size(), x);
  if (ec != std::errc() || end != edited.data() + edited.size() || !std::isfinite(x)) return std::nullopt;
  return x;
}

inline std::vector<const AttributeSpec*> inadequate_sources(const GeneratorConfig& config, const AttributeSpec& spec) {
  std::vector<const AttributeSpec*> out;
  for (const auto& o : config.schema)
    if (o.name != spec.name && o.source_key != spec.source_key) out.push_back(&o);
  return out;
}

inline Value draw_non_null(const AttributeSpec& spec, RngStream& rng, std::uint64_t tuple_index) {
  for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
    Value v = generate_value(spec, rng, tuple_index);
    if (!is_null(v)) return v;
  }
  throw GenerationError("attribute '" + spec.name + "' only produced nulls");
}

}  // namespace inject_detail

// Cell-level injectors. `dirty_index` addresses sequence sources.
inline Value inject_cell(ErrorType type, const Value& clean, const AttributeSpec& spec, const GeneratorConfig& config,
                         RngStream& rng, std::uint64_t dirty_index = 0) {
  using namespace inject_detail;
  auto fail = [&](const char* what) -> GenerationError {
    return GenerationError(std::string(name_of(type)) + " on attribute '" + spec.name + "': " + what);
  };
  switch (type) {
    case ErrorType::kMissingValue:
      return Null{};
    case ErrorType::kSyntaxViolation: {
      const std::u32string s = to_u32(to_text(clean));
      for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
        auto out = syntax_mutation(s, rng);
        if (!out) continue;
        std::string text = encode_utf8(*out);
        if (!std::regex_match(text, *spec.pattern_re)) return text;
      }
      throw fail("no mutation breaks the pattern");
    }
    case ErrorType::kIntervalViolation:
      return interval_violation_value(spec.datatype, spec.interval->first, spec.interval->second, rng.coin(),
                                      rng.uniform01());
    case ErrorType::kSetViolation: {
      for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
        std::optional<Value> out;
        if (const auto* s = std::get_if<std::string>(&clean)) {
          const std::u32string u = to_u32(*s);
          if (auto e = apply_edit(u, random_edit(u, rng))) out = encode_utf8(*e);
        } else {
          out = numeric_edit(clean, rng);
        }
        if (out && spec.admissible_keys.count(to_json(*out)) == 0) return *out;
      }
      throw fail("no single edit leaves the admissible set");
    }
    case ErrorType::kMisspelling: {
      auto out = misspell(std::get<std::string>(clean), rng);
      if (!out) throw fail("no edit changes the value");
      return *out;
    }
    case ErrorType::kInadequateValueToAttributeContext: {
      auto sources = inadequate_sources(config, spec);
      if (sources.empty()) throw fail("no attribute with a distinct value source");
      for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
        const AttributeSpec& other = *sources[rng.uniform_index(sources.size())];
        Value v = generate_value(other, rng, rng.uniform_index(config.tuple_count ? config.tuple_count : 1));
        if (!is_null(v) && !can_produce(spec, v)) return v;
      }
      throw fail("every foreign value is also valid here");
    }
    case ErrorType::kValueItemsBeyondAttributeContext: {
      std::vector<const AttributeSpec*> sources;
      for (const auto& o : config.schema)
        if (o.name != spec.name) sources.push_back(&o);
      for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
        const AttributeSpec& other = *sources[rng.uniform_index(sources.size())];
        Value token = generate_value(other, rng, rng.uniform_index(config.tuple_count ? config.tuple_count : 1));
        if (is_null(token)) continue;
        Value out = to_text(clean) + " " + to_text(token);
        if (!can_produce(spec, out)) return out;
      }
      throw fail("could not append a foreign token");
    }
    case ErrorType::kMeaninglessValue:
      return meaningless_value(config, rng);
    case ErrorType::kErroneousEntry: {
      for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
        Value v = generate_value(spec, rng, dirty_index);
        if (!is_null(v) && !(v == clean)) return v;
      }
      throw fail("source keeps producing the clean value");
    }
    default:
      throw fail("not a cell-level type");
  }
}

// --- row and column injectors ----------------------------------------------

struct CellChange {
  std::string attribute;
  Value clean;
  std::optional<Value> dirty;  // none: key removed
};

// Column-scoped types on one cell. `donor_value` is required for
// uniqueness violations.
inline std::optional<Value> inject_column(ErrorType type, const Value& clean, const AttributeSpec& spec,
                                          const ErrorSpec& error, RngStream& rng,
                                          const Value* donor_value = nullptr) {
  switch (type) {
    case ErrorType::kUniquenessValueViolation:
      if (!donor_value) throw GenerationError("uniqueness violation without a donor");
      return *donor_value;
    case ErrorType::kSynonymsExistence: {
      const auto& list = spec.synonyms.at(std::get<std::string>(clean));
      return Value(list[rng.uniform_index(list.size())]);
    }
    case ErrorType::kOutlier: {
      const auto& d = *spec.distribution;
      const bool positive = rng.coin();
      return outlier_value(spec.datatype, d.mean, d.stddev, error.params.k, rng.uniform01(), positive);
    }
    case ErrorType::kMissingAttribute:
      return std::nullopt;
    case ErrorType::kBias: {
      if (error.params.shift) return add_numeric(clean, *error.params.shift);
      std::vector<double> cumulative;
      std::vector<Value> values;
      double total = 0;
      for (const auto& [v, w] : error.params.skewed_weights) {
        if (w <= 0 || v == clean) continue;
        total += w;
        values.push_back(v);
        cumulative.push_back(total);
      }
      return values[weighted_pick(cumulative, rng.uniform01())];
    }
    case ErrorType::kNoise: {
      const double sd = error.params.alpha * spec.distribution->stddev;
      const double bound = 6.0 * sd;
      for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
        const double eps = rng.normal(0.0, sd);
        if (eps == 0 || std::abs(eps) > bound) continue;
        Value out = apply_noise(clean, eps);
        if (!(out == clean)) return out;
      }
      throw GenerationError("noise on attribute '" + spec.name + "': perturbation vanishes");
    }
    default:
      throw GenerationError(std::string(name_of(type)) + " is not a column-level type");
  }
}

// Row-level types. Returns the changed cells in schema order.
inline std::vector<CellChange> inject_row(ErrorType type, Record& record, const ErrorSpec& error,
                                          const GeneratorConfig& config, RngStream& rng) {
  std::vector<CellChange> changes;
  if (type == ErrorType::kSemiEmptyTuple) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < record.size(); ++i)
      if (!is_null(record.fields()[i].second)) candidates.push_back(i);
    const std::size_t nulls = semi_empty_null_count(record.size(), error.params.empty_fraction);
    if (candidates.size() < nulls + 1) throw GenerationError("semi_empty_tuple: row has too few values");
    for (std::size_t i = 0; i < nulls; ++i) {  // partial Fisher-Yates
      std::swap(candidates[i], candidates[i + rng.uniform_index(candidates.size() - i)]);
    }
    candidates.resize(nulls);
    std::sort(candidates.begin(), candidates.end());
    for (std::size_t i : candidates) {
      const auto& [name, value] = record.fields()[i];
      changes.push_back({name, value, Value(Null{})});
    }
  } else if (type == ErrorType::kInconsistencyAmongAttributeValues) {
    const std::string& dep_name = error.targets[rng.uniform_index(error.targets.size())];
    const AttributeSpec& dep = config.attribute(dep_name);
    const DependencyRule& rule = config.dependencies[*dep.dependency];
    const Value current = *record.find(dep_name);
    std::vector<const Value*> alternatives;
    for (const auto& [d, v] : rule.mapping)
      if (!(v == current)) alternatives.push_back(&v);
    if (alternatives.empty()) throw GenerationError("inconsistency_among_attribute_values: rule has one image value");
    changes.push_back({dep_name, current, *alternatives[rng.uniform_index(alternatives.size())]});
  } else {
    throw GenerationError(std::string(name_of(type)) + " is not a row-level type");
  }
  for (const auto& c : changes) record.set(c.attribute, *c.dirty);
  return changes;
}

// Builds an inserted tuple. `source` is the clean source tuple for copies.
inline Record inject_multirow(ErrorType type, const Record* source, const ErrorSpec& error,
                              const GeneratorConfig& config, std::uint64_t dirty_index) {
  const std::string stage = inject_stage(type);
  if (type == ErrorType::kIrrelevantObservation) {
    std::vector<Record::Field> fields;
    for (const auto& spec : config.schema) {
      RngStream rng = derive_stream(config.seed, stage, dirty_index, spec.name);
      std::optional<Value> v;
      if (const AttributeSpec* od = error.params.offdomain_for(spec.name)) {
        for (int attempt = 0; attempt < kMaxResampleAttempts && !v; ++attempt) {
          Value x = draw_from_domain(*od, rng, dirty_index);
          if (!can_produce(spec, x)) v = std::move(x);
        }
      }
      if (!v) v = meaningless_value(config, rng);
      fields.emplace_back(spec.name, std::move(*v));
    }
    return Record(std::move(fields));
  }
  if (!source) throw GenerationError(std::string(name_of(type)) + ": missing source tuple");
  Record out = *source;
  RngStream rng = derive_stream(config.seed, stage, dirty_index, "");
  if (type == ErrorType::kRedundancyAboutEntity) {
    if (!error.params.near_duplicate) return out;
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < config.schema.size(); ++i) {
      const auto& spec = config.schema[i];
      if (!spec.unique && spec.datatype == Datatype::kString && is_string(out.fields()[i].second))
        candidates.push_back(i);
    }
    const std::size_t n = std::min(error.params.perturbed_attributes, candidates.size());
    for (std::size_t i = 0; i < n; ++i)
      std::swap(candidates[i], candidates[i + rng.uniform_index(candidates.size() - i)]);
    candidates.resize(n);
    for (std::size_t i : candidates) {
      const auto& name = config.schema[i].name;
      RngStream cell = derive_stream(config.seed, stage, dirty_index, name);
      auto edited = inject_detail::misspell(std::get<std::string>(*out.find(name)), cell);
      if (!edited) throw GenerationError("redundancy_about_entity: cannot perturb '" + name + "'");
      out.set(name, *edited);
    }
    return out;
  }
  if (type == ErrorType::kInconsistencyAboutEntity) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < config.schema.size(); ++i) {
      const auto& spec = config.schema[i];
      if (spec.unique || is_null(out.fields()[i].second)) continue;
      if (std::holds_alternative<SequenceDomain>(spec.domain)) continue;
      if (auto size = enumerable_size(spec); size && *size < 2) continue;
      candidates.push_back(i);
    }
    if (candidates.empty()) throw GenerationError("inconsistency_about_entity: no attribute can take another value");
    const auto& spec = config.schema[candidates[rng.uniform_index(candidates.size())]];
    RngStream cell = derive_stream(config.seed, stage, dirty_index, spec.name);
    out.set(spec.name, inject_cell(ErrorType::kErroneousEntry, *out.find(spec.name), spec, config, cell, dirty_index));
    return out;
  }
  throw GenerationError(std::string(name_of(type)) + " is not an insertion type");
}

// --- driver ------------------------------------------------------------------

struct RunStats {
  std::uint64_t base_count = 0;
  std::uint64_t inserted_count = 0;
  std::array<std::uint64_t, kErrorTypeCount> events{};
  std::vector<std::string> warnings;
};

namespace inject_detail {

inline void log_insertion(const ErrorPlan& plan, const Insertion& ins, const Record& row,
                          std::vector<ErrorLogEntry>& out) {
  out.push_back({ins.dirty_index, ins.source, std::nullopt, ins.type, std::nullopt, std::nullopt});
  for (const auto& [name, value] : row.fields())
    out.push_back({ins.dirty_index, ins.source, name, ins.type, std::nullopt, value});
  (void)plan;
}

}  // namespace inject_detail

// Streams the whole run. Callbacks:
//   on_clean(tuple_index, record)   clean tuples in index order
//   on_dirty(dirty_index, record)   dirty tuples in emission order
//   on_log(entry)                   log entries ordered by dirty index, then
//                                   schema order with row markers first
// Memory does not grow with the number of tuples beyond the plan's
// insertion list.
template <typename OnClean, typename OnDirty, typename OnLog>
RunStats apply_plan(const ErrorPlan& plan, OnClean&& on_clean, OnDirty&& on_dirty, OnLog&& on_log) {
  const GeneratorConfig& config = plan.config();
  const auto& specs = plan.specs();
  CleanGenerator gen(config);
  RunStats stats;
  stats.base_count = config.tuple_count;
  stats.inserted_count = plan.inserted_count();
  stats.warnings = plan.warnings();

  std::vector<std::pair<std::uint64_t, std::size_t>> by_source;  // (source, insertion slot)
  std::vector<std::size_t> tail;
  for (std::size_t i = 0; i < plan.insertions().size(); ++i) {
    const auto& ins = plan.insertions()[i];
    if (ins.source) by_source.emplace_back(*ins.source, i);
    else tail.push_back(i);
  }
  std::sort(by_source.begin(), by_source.end());

  auto emit_log = [&](const ErrorLogEntry& e) {
    if (counts_as_event(e)) ++stats.events[static_cast<std::size_t>(e.type)];
    on_log(e);
  };
  auto insert = [&](std::size_t slot, const Record* source) {
    const Insertion& ins = plan.insertions()[slot];
    on_dirty(ins.dirty_index, inject_multirow(ins.type, source, config.errors[ins.spec_index], config, ins.dirty_index));
  };

  std::size_t next_insert = 0;
  std::vector<ErrorLogEntry> row_log;
  for (std::uint64_t t = 0; t < config.tuple_count; ++t) {
    const Record clean = gen.generate(t);
    on_clean(t, clean);
    Record dirty = clean;
    row_log.clear();

    if (auto k = plan.row_owner(t, clean)) {
      const auto& sp = specs[*k];
      RngStream rng = derive_stream(config.seed, inject_stage(sp.type), t, "");
      auto changes = inject_row(sp.type, dirty, config.errors[sp.spec_index], config, rng);
      if (logs_row_marker(sp.type)) row_log.push_back({t, t, std::nullopt, sp.type, std::nullopt, std::nullopt});
      for (auto& c : changes) row_log.push_back({t, t, c.attribute, sp.type, c.clean, c.dirty});
    } else {
      for (std::size_t pos = 0; pos < config.schema.size(); ++pos) {
        auto k = plan.cell_owner(t, pos, clean);
        if (!k) continue;
        const auto& sp = specs[*k];
        const AttributeSpec& attr = config.schema[pos];
        const Value& cv = clean.fields()[pos].second;
        const ErrorSpec& error = config.errors[sp.spec_index];
        RngStream rng = derive_stream(config.seed, inject_stage(sp.type), t, attr.name);
        std::optional<Value> dv;
        if (sp.level == PlanLevel::kCell) {
          dv = inject_cell(sp.type, cv, attr, config, rng, t);
        } else if (sp.type == ErrorType::kUniquenessValueViolation) {
          auto donor = plan.uniqueness_donor(*k, t, pos);
          if (!donor) throw GenerationError("uniqueness violation lost its donor");
          const Value donor_value = gen.generate(*donor).fields()[pos].second;
          dv = inject_column(sp.type, cv, attr, error, rng, &donor_value);
        } else {
          dv = inject_column(sp.type, cv, attr, error, rng);
        }
        if (dv && *dv == cv) throw GenerationError("internal error: " + std::string(name_of(sp.type)) +
                                                   " left tuple " + std::to_string(t) + " unchanged");
        row_log.push_back({t, t, attr.name, sp.type, cv, dv});
      }
      // Apply after all owners are resolved so every owner sees the clean row.
      for (const auto& e : row_log) {
        if (e.dirty_value) dirty.set(*e.attribute, *e.dirty_value);
        else dirty.erase(*e.attribute);
      }
    }
    for (const auto& e : row_log) emit_log(e);
    on_dirty(t, dirty);
    while (next_insert < by_source.size() && by_source[next_insert].first == t) {
      insert(by_source[next_insert].second, &clean);
      ++next_insert;
    }
  }
  for (std::size_t slot : tail) insert(slot, nullptr);
  // Inserted rows are pure functions of their source and dirty index, so
  // their log lines are rebuilt here in dirty-index order instead of being
  // held in memory.
  std::vector<ErrorLogEntry> lines;
  for (const Insertion& ins : plan.insertions()) {
    std::optional<Record> source;
    if (ins.source) source = gen.generate(*ins.source);
    Record row = inject_multirow(ins.type, source ? &*source : nullptr, config.errors[ins.spec_index], config,
                                 ins.dirty_index);
    lines.clear();
    inject_detail::log_insertion(plan, ins, row, lines);
    for (const auto& e : lines) emit_log(e);
  }
  return stats;
}

// A whole run held in memory; intended for tests and small data.
struct MaterializedRun {
  std::vector<Record> clean;
  std::vector<std::pair<std::uint64_t, Record>> dirty;  // emission order
  std::vector<ErrorLogEntry> log;
  RunStats stats;

  const Record* dirty_at(std::uint64_t dirty_index) const {
    for (const auto& [i, r] : dirty)
      if (i == dirty_index) return &r;
    return nullptr;
  }
};

inline MaterializedRun materialize(const GeneratorConfig& config) {
  ErrorPlan plan(config);
  MaterializedRun run;
  run.stats = apply_plan(
      plan, [&](std::uint64_t, const Record& r) { run.clean.push_back(r); },
      [&](std::uint64_t i, const Record& r) { run.dirty.emplace_back(i, r); },
      [&](const ErrorLogEntry& e) { run.log.push_back(e); });
  return run;
}

// --- verification ------------------------------------------------------------

struct VerifyContext {
  const GeneratorConfig* config = nullptr;
  // attribute -> to_json(value) -> occurrences in the dirty dataset
  const std::unordered_map<std::string, std::unordered_map<std::string, std::size_t>>* dirty_counts = nullptr;
};

inline std::unordered_map<std::string, std::unordered_map<std::string, std::size_t>> count_values(
    const std::vector<std::pair<std::uint64_t, Record>>& dirty) {
  std::unordered_map<std::string, std::unordered_map<std::string, std::size_t>> out;
  for (const auto& [i, r] : dirty)
    for (const auto& [name, value] : r.fields()) ++out[name][to_json(value)];
  return out;
}

// The spec that produced entries of `type` on `attribute`.
inline const ErrorSpec* find_error_spec(const GeneratorConfig& config, ErrorType type,
                                        const std::optional<std::string>& attribute) {
  for (const auto& e : config.errors) {
    if (e.type != type) continue;
    if (!attribute || e.targets.empty() || plan_level(type) == PlanLevel::kRow || is_insertion(type)) return &e;
    if (std::find(e.targets.begin(), e.targets.end(), *attribute) != e.targets.end()) return &e;
  }
  return nullptr;
}

namespace inject_detail {

inline bool verify_inserted_row(ErrorType type, const Record* source, const Record& row, const ErrorSpec& spec,
                                const GeneratorConfig& config) {
  if (row.size() != config.schema.size()) return false;
  for (std::size_t i = 0; i < row.size(); ++i)
    if (row.fields()[i].first != config.schema[i].name) return false;
  if (type == ErrorType::kIrrelevantObservation) {
    for (std::size_t i = 0; i < row.size(); ++i)
      if (can_produce(config.schema[i], row.fields()[i].second)) return false;
    return true;
  }
  if (!source || source->size() != row.size()) return false;
  std::size_t changed = 0, candidates = 0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    const auto& spec_i = config.schema[i];
    const Value& s = source->fields()[i].second;
    const Value& d = row.fields()[i].second;
    if (type == ErrorType::kRedundancyAboutEntity) {
      if (!spec_i.unique && spec_i.datatype == Datatype::kString && is_string(s)) ++candidates;
      if (s == d) continue;
      if (spec_i.unique || !is_string(s) || !is_string(d)) return false;
      if (osa_distance(std::get<std::string>(s), std::get<std::string>(d)) != 1) return false;
      ++changed;
    } else {
      if (s == d) continue;
      if (spec_i.unique || is_null(d) || !can_produce(spec_i, d)) return false;
      ++changed;
    }
  }
  if (type == ErrorType::kRedundancyAboutEntity) {
    const std::size_t want = spec.params.near_duplicate ? std::min(spec.params.perturbed_attributes, candidates) : 0;
    return changed == want;
  }
  return changed == 1;
}

}  // namespace inject_detail

// True iff `dirty` exhibits the defining defect of entry.type while `clean`
// does not. For base tuples `clean`/`dirty` are the tuple's two versions;
// for inserted tuples `dirty` is the inserted row and `clean` its source.
inline bool verify_error(const ErrorLogEntry& entry, const Record* clean, const Record& dirty,
                         const VerifyContext& ctx) {
  const GeneratorConfig& config = *ctx.config;
  const ErrorSpec* error = find_error_spec(config, entry.type, entry.attribute);
  if (!error) return false;

  if (is_insertion(entry.type)) {
    if (entry.clean_value) return false;
    if (entry.attribute) {
      const Value* v = dirty.find(*entry.attribute);
      if (!v || !entry.dirty_value || !(*v == *entry.dirty_value)) return false;
    } else if (entry.dirty_value) {
      return false;
    }
    return inject_detail::verify_inserted_row(entry.type, clean, dirty, *error, config);
  }

  if (!clean) return false;
  if (entry.type == ErrorType::kSemiEmptyTuple && entry.is_marker()) {
    std::size_t clean_nulls = 0, dirty_nulls = 0;
    for (const auto& f : clean->fields()) clean_nulls += is_null(f.second);
    for (const auto& f : dirty.fields()) dirty_nulls += is_null(f.second);
    return dirty_nulls == clean_nulls + semi_empty_null_count(clean->size(), error->params.empty_fraction);
  }
  if (!entry.attribute) return false;
  const auto pos = config.position(*entry.attribute);
  if (!pos) return false;
  const AttributeSpec& spec = config.schema[*pos];
  const Value* cp = clean->find(spec.name);
  const Value* dp = dirty.find(spec.name);
  if (!cp || !entry.clean_value || !(*cp == *entry.clean_value)) return false;
  if (bool(dp) != bool(entry.dirty_value)) return false;
  if (dp && !(*dp == *entry.dirty_value)) return false;
  const Value& c = *cp;
  if (entry.type == ErrorType::kMissingAttribute) return dp == nullptr;
  if (!dp || *dp == c) return false;
  const Value& d = *dp;

  switch (entry.type) {
    case ErrorType::kMissingValue:
      return !is_null(c) && is_null(d);
    case ErrorType::kSyntaxViolation:
      return is_string(c) && std::regex_match(std::get<std::string>(c), *spec.pattern_re) && is_string(d) &&
             !std::regex_match(std::get<std::string>(d), *spec.pattern_re);
    case ErrorType::kIntervalViolation:
      return is_numeric(c) && spec.in_interval(as_double(c)) && is_numeric(d) && !spec.in_interval(as_double(d));
    case ErrorType::kSetViolation:
      return spec.admissible_keys.count(to_json(c)) && !spec.admissible_keys.count(to_json(d));
    case ErrorType::kMisspelling:
      return is_string(c) && is_string(d) && osa_distance(std::get<std::string>(c), std::get<std::string>(d)) == 1;
    case ErrorType::kInadequateValueToAttributeContext: {
      if (is_null(d) || can_produce(spec, d) || !can_produce(spec, c)) return false;
      for (const auto* o : inject_detail::inadequate_sources(config, spec))
        if (can_produce(*o, d)) return true;
      return false;
    }
    case ErrorType::kValueItemsBeyondAttributeContext: {
      if (!is_string(c) || !is_string(d)) return false;
      const std::string prefix = std::get<std::string>(c) + " ";
      const auto& ds = std::get<std::string>(d);
      return ds.size() > prefix.size() && ds.compare(0, prefix.size(), prefix) == 0 && !can_produce(spec, d);
    }
    case ErrorType::kMeaninglessValue:
      return is_meaningless(config, d);
    case ErrorType::kErroneousEntry:
      return !is_null(d) && can_produce(spec, c) && can_produce(spec, d);
    case ErrorType::kUniquenessValueViolation: {
      if (!ctx.dirty_counts) return false;
      auto col = ctx.dirty_counts->find(spec.name);
      if (col == ctx.dirty_counts->end()) return false;
      auto it = col->second.find(to_json(d));
      return it != col->second.end() && it->second >= 2;
    }
    case ErrorType::kSynonymsExistence: {
      if (!is_string(c) || !is_string(d)) return false;
      auto it = spec.synonyms.find(std::get<std::string>(c));
      return it != spec.synonyms.end() &&
             std::find(it->second.begin(), it->second.end(), std::get<std::string>(d)) != it->second.end();
    }
    case ErrorType::kOutlier: {
      if (!is_numeric(c) || !is_numeric(d)) return false;
      const auto& dist = *spec.distribution;
      const double limit = error->params.k * dist.stddev;
      return std::abs(as_double(c) - dist.mean) < limit && std::abs(as_double(d) - dist.mean) >= limit;
    }
    case ErrorType::kInconsistencyAmongAttributeValues: {
      if (!spec.dependency) return false;
      const DependencyRule& rule = config.dependencies[*spec.dependency];
      const Value* cdet = clean->find(rule.determinant);
      const Value* ddet = dirty.find(rule.determinant);
      if (!cdet || !ddet) return false;
      const Value* want_clean = rule.lookup(*cdet);
      const Value* want_dirty = rule.lookup(*ddet);
      bool in_image = false;
      for (const auto& [k, v] : rule.mapping) in_image |= v == d;
      return want_clean && *want_clean == c && want_dirty && !(*want_dirty == d) && in_image;
    }
    case ErrorType::kSemiEmptyTuple:
      return !is_null(c) && is_null(d);
    case ErrorType::kBias: {
      const auto& p = error->params;
      const Value* g = clean->find(p.group_attribute);  // membership is a clean-side property
      if (!g || !(*g == p.group_value)) return false;
      if (p.shift) return is_numeric(c) && d == add_numeric(c, *p.shift);
      for (const auto& [v, w] : p.skewed_weights)
        if (w > 0 && v == d) return true;
      return false;
    }
    case ErrorType::kNoise: {
      if (!is_numeric(c) || !is_numeric(d) || d.index() != c.index()) return false;
      const double delta = std::abs(as_double(d) - as_double(c));
      return delta > 0 && delta <= noise_bound(spec, error->params.alpha);
    }
    default:
      return false;
  }
}

}  // namespace dirtygen
