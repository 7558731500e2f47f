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

// Scoring a repair against the ground truth.
//
// Units are base cells (tuple, attribute) and whole inserted rows. A unit is
// flagged when the repaired file changes it (a deleted row flags all of its
// cells); it is an error when the log names it. A flagged unit is repaired
// correctly when it equals the clean value; an inserted row only by
// deletion.
//
// Per-type precision divides the type's true positives by those plus all
// false positives, since a false positive carries no type.

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "dirtygen/errors.hpp"
#include "dirtygen/inject.hpp"
#include "dirtygen/output.hpp"

namespace dirtygen {

struct MetricSet {
  double detection_precision = 0, detection_recall = 0, detection_f1 = 0;
  double repair_precision = 0, repair_recall = 0, repair_f1 = 0;
  std::uint64_t errors = 0;         // erroneous units
  std::uint64_t flagged = 0;        // changed units
  std::uint64_t true_positives = 0;
  std::uint64_t false_positives = 0;
  std::uint64_t false_negatives = 0;
  std::uint64_t correct_repairs = 0;
};

struct RepairMetrics {
  MetricSet overall;
  std::map<std::string, MetricSet> per_type;  // keyed by type name
  std::uint64_t units = 0;                    // base cells + inserted rows
  std::uint64_t base_rows = 0;
  std::uint64_t inserted_rows = 0;
};

inline double ratio(std::uint64_t num, std::uint64_t den) { return den ? static_cast<double>(num) / den : 0.0; }
inline double f1(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

inline void finish(MetricSet& m, std::uint64_t precision_den) {
  m.detection_precision = ratio(m.true_positives, precision_den);
  m.detection_recall = ratio(m.true_positives, m.errors);
  m.detection_f1 = f1(m.detection_precision, m.detection_recall);
  m.repair_precision = ratio(m.correct_repairs, precision_den);
  m.repair_recall = ratio(m.correct_repairs, m.errors);
  m.repair_f1 = f1(m.repair_precision, m.repair_recall);
}

// Dirty index of every dirty-file line, recovered from the insertion markers.
inline std::vector<std::uint64_t> dirty_line_order(std::uint64_t base_count, const std::vector<ErrorLogEntry>& log) {
  std::vector<Insertion> ins;
  std::set<std::uint64_t> seen;
  for (const auto& e : log) {
    if (!is_insertion(e.type) || !e.is_marker()) continue;
    if (e.dirty_index < base_count || !seen.insert(e.dirty_index).second)
      throw ShapeMismatch("log: bad insertion marker for dirty index " + std::to_string(e.dirty_index));
    if (e.clean_index && *e.clean_index >= base_count)
      throw ShapeMismatch("log: insertion source out of range at dirty index " + std::to_string(e.dirty_index));
    ins.push_back({e.dirty_index, 0, e.type, e.clean_index});
  }
  return emission_order(base_count, ins);
}

inline RepairMetrics score(const std::vector<Record>& clean, const Rows& dirty, const Rows& repaired,
                           const std::vector<ErrorLogEntry>& log) {
  const std::uint64_t n = clean.size();
  const std::vector<std::uint64_t> order = dirty_line_order(n, log);
  if (dirty.size() != order.size())
    throw ShapeMismatch("dirty has " + std::to_string(dirty.size()) + " rows, expected " + std::to_string(order.size()));
  if (repaired.size() != dirty.size())
    throw ShapeMismatch("repaired has " + std::to_string(repaired.size()) + " rows, dirty has " +
                        std::to_string(dirty.size()));

  std::set<std::string> attributes;
  for (const auto& r : clean)
    for (const auto& f : r.fields()) attributes.insert(f.first);
  for (std::size_t i = 0; i < dirty.size(); ++i) {
    if (!dirty[i]) throw ShapeMismatch("dirty row " + std::to_string(i + 1) + " is null");
    for (const auto& f : dirty[i]->fields())
      if (!attributes.count(f.first)) throw ShapeMismatch("dirty has unknown attribute '" + f.first + "'");
    if (repaired[i])
      for (const auto& f : repaired[i]->fields())
        if (!attributes.count(f.first)) throw ShapeMismatch("repaired has unknown attribute '" + f.first + "'");
  }

  // Erroneous units and their types.
  std::map<std::pair<std::uint64_t, std::string>, ErrorType> cell_type;
  std::unordered_map<std::uint64_t, ErrorType> row_type;
  for (const auto& e : log) {
    if (is_insertion(e.type)) {
      row_type.emplace(e.dirty_index, e.type);
    } else if (e.attribute) {
      if (e.dirty_index >= n) throw ShapeMismatch("log names base cell beyond the clean data");
      cell_type.emplace(std::make_pair(e.dirty_index, *e.attribute), e.type);
    }
  }

  RepairMetrics m;
  m.base_rows = n;
  m.inserted_rows = order.size() - n;
  std::map<ErrorType, MetricSet> by_type;
  auto tally = [&](bool flagged, std::optional<ErrorType> type, bool correct) {
    ++m.units;
    if (flagged) ++m.overall.flagged;
    if (!type) {
      if (flagged) ++m.overall.false_positives;
      return;
    }
    MetricSet& t = by_type[*type];
    ++m.overall.errors;
    ++t.errors;
    if (flagged) {
      ++m.overall.true_positives;
      ++t.true_positives;
      ++t.flagged;
      if (correct) {
        ++m.overall.correct_repairs;
        ++t.correct_repairs;
      }
    } else {
      ++m.overall.false_negatives;
      ++t.false_negatives;
    }
  };

  for (std::size_t line = 0; line < order.size(); ++line) {
    const std::uint64_t idx = order[line];
    const Record& d = *dirty[line];
    const std::optional<Record>& r = repaired[line];
    if (idx >= n) {
      auto it = row_type.find(idx);
      const bool flagged = !r || !(*r == d);
      tally(flagged, it == row_type.end() ? std::nullopt : std::optional<ErrorType>(it->second), !r);
      continue;
    }
    const Record& c = clean[idx];
    for (const auto& a : attributes) {
      const Value* dv = d.find(a);
      const Value* cv = c.find(a);
      const Value* rv = r ? r->find(a) : nullptr;
      bool flagged;
      if (!r) {
        flagged = true;
      } else {
        flagged = bool(dv) != bool(rv) || (dv && !(*dv == *rv));
      }
      const bool correct = r && bool(cv) == bool(rv) && (!cv || *cv == *rv);
      auto it = cell_type.find({idx, a});
      if (!cv && !dv && !rv && it == cell_type.end()) continue;  // attribute never present
      tally(flagged, it == cell_type.end() ? std::nullopt : std::optional<ErrorType>(it->second), correct);
    }
  }

  const std::uint64_t fp = m.overall.false_positives;
  finish(m.overall, m.overall.flagged);
  for (auto& [type, t] : by_type) {
    t.false_positives = fp;
    finish(t, t.true_positives + fp);
    m.per_type[std::string(name_of(type))] = t;
  }
  return m;
}

inline nlohmann::ordered_json to_json_report(const MetricSet& s) {
  nlohmann::ordered_json j;
  j["detection_precision"] = s.detection_precision;
  j["detection_recall"] = s.detection_recall;
  j["detection_f1"] = s.detection_f1;
  j["repair_precision"] = s.repair_precision;
  j["repair_recall"] = s.repair_recall;
  j["repair_f1"] = s.repair_f1;
  j["errors"] = s.errors;
  j["flagged"] = s.flagged;
  j["true_positives"] = s.true_positives;
  j["false_positives"] = s.false_positives;
  j["false_negatives"] = s.false_negatives;
  j["correct_repairs"] = s.correct_repairs;
  return j;
}

inline std::string report_json(const RepairMetrics& m) {
  nlohmann::ordered_json j;
  j["units"] = m.units;
  j["base_rows"] = m.base_rows;
  j["inserted_rows"] = m.inserted_rows;
  j["overall"] = to_json_report(m.overall);
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (const auto& [name, s] : m.per_type) per[name] = to_json_report(s);
  j["per_error_type"] = per;
  return j.dump(2) + "\n";
}

}  // namespace dirtygen
