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

// Error placement.
//
// Every ErrorSpec owns a keyed permutation of its population (tuples or
// (tuple, target attribute) cells), keyed by stream_key(seed, "plan:<type>",
// 0, <targets>). Walking the permutation in order is drawing targets without
// replacement. A draw is accepted unless the target is not selectable for
// the type (e.g. a null clean cell) or one of its cells is already claimed
// by a spec that comes earlier in the priority order
//
//   insertion < row < column < cell   (config order within a level)
//
// in which case the walk continues, i.e. a replacement is drawn. The walk
// stops once exactly round(rate * population) targets are accepted; the
// number of draws consumed is kept as the spec's threshold. A target then
// belongs to the spec iff its permutation rank is below the threshold, it is
// selectable, and no earlier spec claims it. Membership is therefore an O(1)
// query per spec and the plan needs O(#specs) memory regardless of N, apart
// from the list of inserted tuples.
//
// Claims only ever cover a single cell or a whole row, and row-level specs
// precede all single-cell specs, so "some earlier spec's raw selection
// covers this cell" is equivalent to "this cell is claimed"; ownership of a
// cell is simply the first spec in priority order whose raw selection
// covers it.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dirtygen/datagen.hpp"
#include "dirtygen/domain.hpp"
#include "dirtygen/errors.hpp"
#include "dirtygen/population.hpp"
#include "dirtygen/rng.hpp"
#include "dirtygen/schema.hpp"

namespace dirtygen {

struct CellAddress {
  std::uint64_t tuple_index = 0;
  std::string attribute;

  friend bool operator==(const CellAddress&, const CellAddress&) = default;
  friend auto operator<=>(const CellAddress&, const CellAddress&) = default;
};

enum class Scope { kCell, kRow, kColumn, kInsertion };

struct PlanEntry {
  ErrorType type = ErrorType::kMissingValue;
  std::size_t spec_index = 0;
  Scope scope = Scope::kCell;
  std::uint64_t tuple_index = 0;             // base tuple, or dirty index for insertions
  std::string attribute;                     // empty for row and insertion scope
  std::optional<std::uint64_t> source;       // insertion source tuple
  std::optional<std::uint64_t> donor;        // uniqueness donor tuple
};

// One inserted tuple. Dirty indices start at N and follow plan order.
struct Insertion {
  std::uint64_t dirty_index = 0;
  std::size_t spec_index = 0;
  ErrorType type = ErrorType::kIrrelevantObservation;
  std::optional<std::uint64_t> source;
};

// Number of cells nulled by semi_empty_tuple: round(fraction * A) clamped to
// at least two nulls and at least one kept attribute.
inline std::size_t semi_empty_null_count(std::size_t attributes, double fraction) {
  if (attributes < 2) return 0;
  auto n = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(attributes)));
  n = std::max<std::size_t>(n, 2);
  return std::min(n, attributes - 1);
}

inline std::string plan_stage(ErrorType t) { return "plan:" + std::string(name_of(t)); }
inline std::string inject_stage(ErrorType t) { return "inject:" + std::string(name_of(t)); }

inline std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ',';
    out += n;
  }
  return out;
}

class ErrorPlan {
 public:
  struct SpecPlan {
    std::size_t spec_index = 0;
    ErrorType type = ErrorType::kMissingValue;
    PlanLevel level = PlanLevel::kCell;
    std::vector<std::size_t> targets;  // schema positions
    std::string label;                 // stream address for this spec
    std::uint64_t population = 0;
    std::uint64_t target = 0;
    std::uint64_t realized = 0;
    std::uint64_t threshold = 0;
    IndexPermutation perm;
  };

  ErrorPlan(const GeneratorConfig& config) : config_(&config), clean_(config) {
    build_order();
    for (std::size_t k = 0; k < order_.size(); ++k) place(k);
    check_donors();
  }

  const GeneratorConfig& config() const { return *config_; }
  const std::vector<SpecPlan>& specs() const { return specs_; }  // priority order
  const std::vector<Insertion>& insertions() const { return insertions_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  std::uint64_t base_count() const { return config_->tuple_count; }
  std::uint64_t inserted_count() const { return insertions_.size(); }

  const SpecPlan& spec_plan(std::size_t spec_index) const {
    for (const auto& s : specs_)
      if (s.spec_index == spec_index) return s;
    throw Error("no plan for spec " + std::to_string(spec_index));
  }

  // --- ownership queries (used while injecting) ---------------------------

  // The row-level spec (index into specs()) that owns tuple t, if any.
  std::optional<std::size_t> row_owner(std::uint64_t t, const Record& clean) const {
    for (std::size_t k : row_specs_)
      if (raw_tuple(k, t, clean)) return k;
    return std::nullopt;
  }

  // The column- or cell-level spec that owns cell (t, pos); call only when
  // the row has no owner.
  std::optional<std::size_t> cell_owner(std::uint64_t t, std::size_t pos, const Record& clean) const {
    for (std::size_t k : by_position_[pos])
      if (claims_cell(k, t, pos, clean)) return k;
    return std::nullopt;
  }

  // Attribute position affected by a tuple-scoped column spec at tuple t.
  std::size_t tuple_target(std::size_t k, std::uint64_t t) const {
    const SpecPlan& s = specs_[k];
    if (s.targets.size() == 1) return s.targets[0];
    RngStream rng = derive_stream(config_->seed, plan_stage(s.type), t, s.label);
    return s.targets[rng.uniform_index(s.targets.size())];
  }

  bool claimed(std::uint64_t t, std::size_t pos, const Record& clean) const {
    return row_owner(t, clean).has_value() || cell_owner(t, pos, clean).has_value();
  }

  // Earlier, unclaimed tuple whose value is duplicated into tuple t.
  std::optional<std::uint64_t> uniqueness_donor(std::size_t k, std::uint64_t t, std::size_t pos) const {
    if (t == 0) return std::nullopt;
    const SpecPlan& s = specs_[k];
    RngStream rng = derive_stream(config_->seed, plan_stage(s.type), t, config_->schema[pos].name);
    auto free = [&](std::uint64_t d) { return !claimed(d, pos, record(d)); };
    for (int attempt = 0; attempt < 32; ++attempt) {
      const std::uint64_t d = rng.uniform_index(t);
      if (free(d)) return d;
    }
    for (std::uint64_t d = t; d-- > 0;)
      if (free(d)) return d;
    return std::nullopt;
  }

  // Materializes the plan: specs in priority order, targets in draw order.
  std::vector<PlanEntry> entries() const {
    std::vector<PlanEntry> out;
    for (std::size_t k = 0; k < specs_.size(); ++k) {
      const SpecPlan& s = specs_[k];
      if (s.level == PlanLevel::kInsertion) {
        for (const auto& ins : insertions_) {
          if (ins.spec_index != s.spec_index) continue;
          out.push_back({s.type, s.spec_index, Scope::kInsertion, ins.dirty_index, {}, ins.source, {}});
        }
        continue;
      }
      for (std::uint64_t j = 0; j < s.threshold; ++j) {
        auto [t, pos] = decode(k, s.perm.forward(j));
        const Record& clean = record(t);
        if (!accepts(k, t, pos, clean)) continue;
        PlanEntry e{s.type, s.spec_index, Scope::kCell, t, {}, {}, {}};
        if (s.level == PlanLevel::kRow) {
          e.scope = Scope::kRow;
        } else {
          e.scope = s.level == PlanLevel::kColumn ? Scope::kColumn : Scope::kCell;
          e.attribute = config_->schema[pos].name;
          if (s.type == ErrorType::kUniquenessValueViolation) e.donor = uniqueness_donor(k, t, pos);
        }
        out.push_back(std::move(e));
      }
    }
    return out;
  }

  // Clean record cache shared by the planner queries.
  const Record& record(std::uint64_t t) const {
    if (!cached_ || cached_index_ != t) {
      cached_record_ = clean_.generate(t);
      cached_index_ = t;
      cached_ = true;
    }
    return cached_record_;
  }

  // True iff the type can be injected into this clean cell (or row).
  bool selectable(std::size_t k, std::uint64_t t, std::size_t pos, const Record& clean) const {
    const SpecPlan& s = specs_[k];
    const ErrorSpec& spec = config_->errors[s.spec_index];
    const Value& v = clean.fields()[pos].second;
    switch (s.type) {
      case ErrorType::kMissingAttribute:
        return true;
      case ErrorType::kSemiEmptyTuple: {
        const std::size_t nulls = semi_empty_null_count(clean.size(), spec.params.empty_fraction);
        std::size_t non_null = 0;
        for (const auto& f : clean.fields()) non_null += !is_null(f.second);
        return nulls > 0 && non_null >= nulls + 1;
      }
      case ErrorType::kInconsistencyAmongAttributeValues:
        return true;
      case ErrorType::kUniquenessValueViolation:
        return t > 0;
      case ErrorType::kSynonymsExistence: {
        const auto* str = std::get_if<std::string>(&v);
        return str && config_->schema[pos].synonyms.count(*str) != 0;
      }
      case ErrorType::kOutlier: {
        if (!is_numeric(v)) return false;
        const auto& d = *config_->schema[pos].distribution;
        return std::abs(as_double(v) - d.mean) < spec.params.k * d.stddev;
      }
      case ErrorType::kNoise:
        return is_numeric(v);
      case ErrorType::kBias: {
        const Value* group = clean.find(spec.params.group_attribute);
        if (!group || !(*group == spec.params.group_value) || is_null(v)) return false;
        if (spec.params.shift) return is_numeric(v);
        for (const auto& [cand, w] : spec.params.skewed_weights)
          if (w > 0 && !(cand == v)) return true;
        return false;
      }
      default:
        return !is_null(v);
    }
  }

 private:
  bool tuple_scoped(std::size_t k) const { return is_tuple_scoped(specs_[k].type); }

  std::pair<std::uint64_t, std::size_t> decode(std::size_t k, std::uint64_t c) const {
    const SpecPlan& s = specs_[k];
    if (tuple_scoped(k)) {
      const std::size_t pos = s.level == PlanLevel::kRow ? 0 : tuple_target(k, c);
      return {c, pos};
    }
    const std::uint64_t width = s.targets.size();
    return {c / width, s.targets[c % width]};
  }

  std::optional<std::uint64_t> encode(std::size_t k, std::uint64_t t, std::size_t pos) const {
    const SpecPlan& s = specs_[k];
    if (tuple_scoped(k)) return t;
    auto it = std::find(s.targets.begin(), s.targets.end(), pos);
    if (it == s.targets.end()) return std::nullopt;
    return t * s.targets.size() + static_cast<std::uint64_t>(it - s.targets.begin());
  }

  bool in_threshold(std::size_t k, std::uint64_t c) const {
    const SpecPlan& s = specs_[k];
    return s.threshold > 0 && s.perm.inverse(c) < s.threshold;
  }

  bool raw_tuple(std::size_t k, std::uint64_t t, const Record& clean) const {
    if (!in_threshold(k, t)) return false;
    const std::size_t pos = specs_[k].level == PlanLevel::kRow ? 0 : tuple_target(k, t);
    return selectable(k, t, pos, clean);
  }

  // Whether spec k's raw selection covers cell (t, pos).
  bool claims_cell(std::size_t k, std::uint64_t t, std::size_t pos, const Record& clean) const {
    const SpecPlan& s = specs_[k];
    if (s.level == PlanLevel::kInsertion) return false;
    if (s.level == PlanLevel::kRow) return raw_tuple(k, t, clean);
    if (tuple_scoped(k)) return tuple_target(k, t) == pos && raw_tuple(k, t, clean);
    auto c = encode(k, t, pos);
    return c && in_threshold(k, *c) && selectable(k, t, pos, clean);
  }

  bool conflicts(std::size_t k, std::uint64_t t, std::size_t pos, const Record& clean) const {
    const SpecPlan& s = specs_[k];
    for (std::size_t e = 0; e < k; ++e) {
      if (specs_[e].level == PlanLevel::kInsertion) continue;
      if (s.level == PlanLevel::kRow) {
        if (raw_tuple(e, t, clean)) return true;
      } else if (claims_cell(e, t, pos, clean)) {
        return true;
      }
    }
    return false;
  }

  bool accepts(std::size_t k, std::uint64_t t, std::size_t pos, const Record& clean) const {
    return selectable(k, t, pos, clean) && !conflicts(k, t, pos, clean);
  }

  void build_order() {
    const auto& errors = config_->errors;
    for (int level = 0; level <= 3; ++level) {
      for (std::size_t i = 0; i < errors.size(); ++i) {
        const ErrorSpec& e = errors[i];
        if (static_cast<int>(plan_level(e.type)) != level) continue;
        SpecPlan s;
        s.spec_index = i;
        s.type = e.type;
        s.level = plan_level(e.type);
        for (const auto& name : e.targets) s.targets.push_back(*config_->position(name));
        s.label = join_names(e.targets);
        s.population = applicable_population(e, *config_);
        s.target = target_count(e, *config_);
        if (s.population > 0)
          s.perm = IndexPermutation(s.population, stream_key(config_->seed, plan_stage(e.type), 0, s.label));
        order_.push_back(i);
        specs_.push_back(std::move(s));
      }
    }
    by_position_.resize(config_->schema.size());
    for (std::size_t k = 0; k < specs_.size(); ++k) {
      const SpecPlan& s = specs_[k];
      if (s.level == PlanLevel::kRow) row_specs_.push_back(k);
      if (s.level == PlanLevel::kColumn || s.level == PlanLevel::kCell)
        for (std::size_t pos : s.targets) by_position_[pos].push_back(k);
    }
  }

  void place(std::size_t k) {
    SpecPlan& s = specs_[k];
    const ErrorSpec& spec = config_->errors[s.spec_index];
    if (s.level == PlanLevel::kInsertion) {
      const std::uint64_t n = config_->tuple_count;
      for (std::uint64_t j = 0; j < s.target; ++j) {
        Insertion ins;
        ins.dirty_index = n + insertions_.size();
        ins.spec_index = s.spec_index;
        ins.type = s.type;
        if (s.type != ErrorType::kIrrelevantObservation) {
          RngStream rng = derive_stream(config_->seed, plan_stage(s.type), j, s.label);
          ins.source = rng.uniform_index(n);
        }
        insertions_.push_back(ins);
      }
      s.realized = s.target;
      return;
    }
    std::uint64_t accepted = 0, j = 0;
    for (; j < s.population && accepted < s.target; ++j) {
      auto [t, pos] = decode(k, s.perm.forward(j));
      const Record& clean = record(t);
      if (accepts(k, t, pos, clean)) ++accepted;
    }
    s.threshold = j;
    s.realized = accepted;
    if (accepted < s.target) {
      const std::string msg = "spec " + std::to_string(s.spec_index) + " (" + std::string(name_of(s.type)) +
                              "): only " + std::to_string(accepted) + " of " + std::to_string(s.target) +
                              " targets can be placed";
      if (s.type == ErrorType::kBias) {
        warnings_.push_back(msg + " (too few tuples in the bias group)");
        return;
      }
      throw PlanInfeasible(s.spec_index, "plan infeasible: " + msg +
                                             "; the combined rates oversubscribe the population");
    }
    (void)spec;
  }

  void check_donors() {
    for (std::size_t k = 0; k < specs_.size(); ++k) {
      const SpecPlan& s = specs_[k];
      if (s.type != ErrorType::kUniquenessValueViolation) continue;
      for (std::uint64_t j = 0; j < s.threshold; ++j) {
        auto [t, pos] = decode(k, s.perm.forward(j));
        if (!accepts(k, t, pos, record(t))) continue;
        if (!uniqueness_donor(k, t, pos))
          throw PlanInfeasible(s.spec_index, "plan infeasible: spec " + std::to_string(s.spec_index) +
                                                 " (uniqueness_value_violation): no unclaimed earlier tuple to copy into tuple " +
                                                 std::to_string(t));
      }
    }
  }

  const GeneratorConfig* config_;
  CleanGenerator clean_;
  std::vector<std::size_t> order_;
  std::vector<SpecPlan> specs_;
  std::vector<std::vector<std::size_t>> by_position_;
  std::vector<std::size_t> row_specs_;
  std::vector<Insertion> insertions_;
  std::vector<std::string> warnings_;
  mutable Record cached_record_;
  mutable std::uint64_t cached_index_ = 0;
  mutable bool cached_ = false;
};

inline ErrorPlan plan_errors(const GeneratorConfig& config) { return ErrorPlan(config); }

// Dirty emission order: each base tuple is followed by the tuples inserted
// from it (in dirty-index order); source-less insertions go last.
inline std::vector<std::uint64_t> emission_order(std::uint64_t base_count,
                                                 const std::vector<Insertion>& insertions) {
  std::vector<std::vector<std::uint64_t>> after(base_count);
  std::vector<std::uint64_t> tail;
  for (const auto& ins : insertions) {
    if (ins.source) {
      after[*ins.source].push_back(ins.dirty_index);
    } else {
      tail.push_back(ins.dirty_index);
    }
  }
  std::vector<std::uint64_t> out;
  out.reserve(base_count + insertions.size());
  for (std::uint64_t i = 0; i < base_count; ++i) {
    out.push_back(i);
    std::sort(after[i].begin(), after[i].end());
    out.insert(out.end(), after[i].begin(), after[i].end());
  }
  std::sort(tail.begin(), tail.end());
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

}  // namespace dirtygen
