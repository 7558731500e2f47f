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

// Configuration document parsing and validation. The document format is
// described in docs/config-format.md.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"

#include "dirtygen/domain.hpp"
#include "dirtygen/errors.hpp"
#include "dirtygen/lexicon.hpp"
#include "dirtygen/population.hpp"
#include "dirtygen/schema.hpp"

namespace dirtygen {

struct ParseOptions {
  std::filesystem::path base_dir;  // resolves relative lexicon paths
  std::optional<std::uint64_t> seed_override;
};

namespace config_detail {

using Json = nlohmann::json;

inline void check_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                       const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

inline const Json& require(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(where + ": missing required key '" + key + "'");
  return *it;
}

inline double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

inline std::uint64_t unsigned_integer(const Json& j, const std::string& where) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    throw ConfigError(where + ": expected a non-negative integer");
  return j.get<std::uint64_t>();
}

inline bool boolean(const Json& j, const std::string& where) {
  if (!j.is_boolean()) throw ConfigError(where + ": expected true or false");
  return j.get<bool>();
}

inline std::string string(const Json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + ": expected a string");
  return j.get<std::string>();
}

// Converts a JSON scalar to a value of the attribute's datatype.
inline Value typed_value(const Json& j, Datatype t, const std::string& where) {
  switch (t) {
    case Datatype::kString:
      if (!j.is_string()) throw ConfigError(where + ": expected a string value");
      return j.get<std::string>();
    case Datatype::kInteger:
      if (j.is_number_integer() || j.is_number_unsigned()) return value_from_json(j);
      throw ConfigError(where + ": expected an integer value");
    case Datatype::kFloat:
      if (!j.is_number()) throw ConfigError(where + ": expected a numeric value");
      return j.get<double>();
  }
  throw ConfigError(where + ": bad datatype");
}

// Mapping keys are JSON object keys, i.e. strings; numeric determinants use
// the decimal spelling.
inline Value typed_key(const std::string& key, Datatype t, const std::string& where) {
  if (t == Datatype::kString) return key;
  Json parsed;
  try {
    parsed = Json::parse(key);
  } catch (const Json::parse_error&) {
    throw ConfigError(where + ": mapping key '" + key + "' is not a number");
  }
  return typed_value(parsed, t, where);
}

inline bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  if (!head(s[0])) return false;
  return std::all_of(s.begin() + 1, s.end(), [&](char c) { return head(c) || (c >= '0' && c <= '9'); });
}

inline ExplicitDomain make_explicit(std::vector<Value> values, std::vector<double> weights = {}) {
  ExplicitDomain d;
  d.values = std::move(values);
  for (const auto& v : d.values) d.keys.insert(to_json(v));
  if (!weights.empty()) {
    double acc = 0;
    for (double w : weights) d.cumulative.push_back(acc += w);
  }
  return d;
}

inline void require_scalar_set(const Json& arr, Datatype t, const std::string& where,
                               std::vector<Value>& out) {
  if (!arr.is_array() || arr.empty()) throw ConfigError(where + ": expected a non-empty array");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    Value v = typed_value(arr[i], t, where + "[" + std::to_string(i) + "]");
    if (!seen.insert(to_json(v)).second)
      throw ConfigError(where + ": duplicate value " + to_json(v));
    out.push_back(std::move(v));
  }
}

class Parser {
 public:
  Parser(const ParseOptions& options) : options_(options) {}

  GeneratorConfig run(std::string_view text) {
    Json doc;
    try {
      doc = Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
      throw ConfigError(std::string("syntax error: ") + e.what());
    }
    check_keys(doc, {"schema", "dependencies", "errors", "generation", "output"}, "config");

    parse_generation(require(doc, "generation", "config"));
    if (auto it = doc.find("output"); it != doc.end()) parse_output(*it);
    config_.output.shard_count = config_.scaling.shard_count;

    const Json& schema = require(doc, "schema", "config");
    if (!schema.is_array() || schema.empty()) throw ConfigError("schema: at least one attribute is required");
    for (std::size_t i = 0; i < schema.size(); ++i) parse_attribute(schema[i]);

    if (auto it = doc.find("dependencies"); it != doc.end()) {
      if (!it->is_array()) throw ConfigError("dependencies: expected an array");
      for (std::size_t i = 0; i < it->size(); ++i) parse_dependency((*it)[i], i);
    }
    build_dependent_domains();
    replicate_columns();
    compute_generation_order();
    check_unique_capacity();

    if (auto it = doc.find("errors"); it != doc.end()) {
      if (!it->is_array()) throw ConfigError("errors: expected an array");
      for (std::size_t i = 0; i < it->size(); ++i) parse_error_spec((*it)[i], i);
    }
    check_duplicate_specs();

    config_.canonical = doc.dump();
    std::uint64_t h = fnv1a64(config_.canonical);
    for (const auto& [name, values] : lexicon_cache_) {
      h = mix64(h ^ fnv1a64(name));
      for (const auto& v : values) h = mix64(h ^ fnv1a64(v));
    }
    config_.config_hash = h;
    return std::move(config_);
  }

 private:
  // --- generation / output ------------------------------------------------

  void parse_generation(const Json& g) {
    check_keys(g, {"tuple_count", "seed", "column_replication", "shard_count"}, "generation");
    config_.tuple_count = unsigned_integer(require(g, "tuple_count", "generation"), "generation.tuple_count");
    if (auto it = g.find("seed"); it != g.end()) config_.seed = unsigned_integer(*it, "generation.seed");
    if (options_.seed_override) config_.seed = *options_.seed_override;
    if (auto it = g.find("column_replication"); it != g.end())
      config_.scaling.column_replication = unsigned_integer(*it, "generation.column_replication");
    if (auto it = g.find("shard_count"); it != g.end()) {
      config_.scaling.shard_count = unsigned_integer(*it, "generation.shard_count");
      if (config_.scaling.shard_count == 0) throw ConfigError("generation.shard_count: must be positive");
    }
  }

  void parse_output(const Json& o) {
    check_keys(o, {"directory", "mode"}, "output");
    if (auto it = o.find("directory"); it != o.end()) config_.output.directory = string(*it, "output.directory");
    if (auto it = o.find("mode"); it != o.end()) {
      std::string mode = string(*it, "output.mode");
      if (mode == "ndjson") {
        config_.output.mode = OutputMode::kNdjson;
      } else if (mode == "json_array") {
        config_.output.mode = OutputMode::kJsonArray;
      } else {
        throw ConfigError("output.mode: expected 'ndjson' or 'json_array'");
      }
    }
  }

  // --- attributes ---------------------------------------------------------

  const std::vector<std::string>& lexicon(const std::string& name) {
    auto it = lexicon_cache_.find(name);
    if (it == lexicon_cache_.end()) it = lexicon_cache_.emplace(name, load_lexicon(name, options_.base_dir)).first;
    return it->second;
  }

  void parse_attribute(const Json& a) {
    check_keys(a,
               {"name", "type", "source", "pattern", "interval", "admissible_set", "unique", "synonyms",
                "nullable_in_clean", "null_rate"},
               "schema attribute");
    AttributeSpec spec;
    spec.name = string(require(a, "name", "schema attribute"), "schema attribute name");
    const std::string where = "attribute '" + spec.name + "'";
    if (!is_identifier(spec.name)) throw ConfigError(where + ": name must be an identifier");
    for (const auto& other : config_.schema)
      if (other.name == spec.name) throw ConfigError(where + ": duplicate attribute name");

    std::string type = string(require(a, "type", where), where + ".type");
    if (type == "string") {
      spec.datatype = Datatype::kString;
    } else if (type == "integer") {
      spec.datatype = Datatype::kInteger;
    } else if (type == "float") {
      spec.datatype = Datatype::kFloat;
    } else {
      throw ConfigError(where + ": type must be string, integer or float");
    }

    if (auto it = a.find("pattern"); it != a.end()) {
      if (spec.datatype != Datatype::kString) throw ConfigError(where + ": pattern requires a string attribute");
      spec.pattern = string(*it, where + ".pattern");
      try {
        spec.pattern_re = std::make_shared<const std::regex>(*spec.pattern, std::regex::ECMAScript);
      } catch (const std::regex_error& e) {
        throw ConfigError(where + ": invalid pattern: " + e.what());
      }
    }
    if (auto it = a.find("interval"); it != a.end()) {
      if (!is_numeric(spec.datatype)) throw ConfigError(where + ": interval requires a numeric attribute");
      if (!it->is_array() || it->size() != 2) throw ConfigError(where + ": interval must be [min, max]");
      double lo = number((*it)[0], where + ".interval"), hi = number((*it)[1], where + ".interval");
      if (lo > hi) throw ConfigError(where + ": interval min exceeds max");
      spec.interval = {lo, hi};
    }
    if (auto it = a.find("admissible_set"); it != a.end()) {
      std::vector<Value> members;
      require_scalar_set(*it, spec.datatype, where + ".admissible_set", members);
      for (const auto& m : members) {
        const bool pattern_ok = !spec.pattern_re || std::regex_match(std::get<std::string>(m), *spec.pattern_re);
        const bool interval_ok = !is_numeric(m) || spec.in_interval(as_double(m));
        if (!pattern_ok || !interval_ok)
          throw ConfigError(where + ": constraint contradiction: admissible_set member " + to_json(m) +
                            " violates the " + (pattern_ok ? "interval" : "pattern"));
        spec.admissible_keys.insert(to_json(m));
      }
      spec.admissible_set = std::move(members);
    }
    if (auto it = a.find("unique"); it != a.end()) spec.unique = boolean(*it, where + ".unique");
    if (auto it = a.find("synonyms"); it != a.end()) parse_synonyms(spec, *it, where);
    if (auto it = a.find("nullable_in_clean"); it != a.end())
      spec.nullable_in_clean = boolean(*it, where + ".nullable_in_clean");
    if (spec.nullable_in_clean) spec.null_rate = 0.1;
    if (auto it = a.find("null_rate"); it != a.end()) {
      if (!spec.nullable_in_clean) throw ConfigError(where + ": null_rate requires nullable_in_clean");
      spec.null_rate = number(*it, where + ".null_rate");
      if (spec.null_rate < 0 || spec.null_rate >= 1) throw ConfigError(where + ": null_rate must be in [0, 1)");
    }
    if (spec.unique && spec.nullable_in_clean) throw ConfigError(where + ": unique attributes cannot be nullable");

    if (auto it = a.find("source"); it != a.end()) {
      spec.source_key = it->dump();
      parse_source(spec, *it, where);
      has_source_.insert(spec.name);
    } else if (spec.admissible_set) {
      spec.source_kind = SourceKind::kAdmissibleSet;
      spec.source_key = "admissible:" + Json(spec.name).dump();
      spec.domain = make_explicit(*spec.admissible_set);
    }
    config_.schema.push_back(std::move(spec));
  }

  void parse_synonyms(AttributeSpec& spec, const Json& s, const std::string& where) {
    if (spec.datatype != Datatype::kString) throw ConfigError(where + ": synonyms require a string attribute");
    if (!s.is_object()) throw ConfigError(where + ".synonyms: expected an object");
    for (auto it = s.begin(); it != s.end(); ++it) {
      if (!it->is_array() || it->empty())
        throw ConfigError(where + ".synonyms: '" + it.key() + "' needs a non-empty list");
      std::vector<std::string> list;
      for (const auto& syn : *it) {
        std::string v = string(syn, where + ".synonyms");
        if (v == it.key()) throw ConfigError(where + ".synonyms: '" + v + "' is a synonym of itself");
        if (std::find(list.begin(), list.end(), v) != list.end())
          throw ConfigError(where + ".synonyms: duplicate synonym '" + v + "'");
        list.push_back(std::move(v));
      }
      spec.synonyms.emplace(it.key(), std::move(list));
    }
  }

  void parse_source(AttributeSpec& spec, const Json& src, const std::string& where) {
    const std::string sw = where + ".source";
    if (!src.is_object()) throw ConfigError(sw + ": expected an object");
    const std::string kind = string(require(src, "kind", sw), sw + ".kind");
    const bool integer = spec.datatype == Datatype::kInteger;

    if (kind == "lexicon") {
      check_keys(src, {"kind", "name", "path"}, sw);
      if (spec.datatype != Datatype::kString) throw ConfigError(sw + ": lexicons require a string attribute");
      const bool has_name = src.contains("name"), has_path = src.contains("path");
      if (has_name == has_path) throw ConfigError(sw + ": give exactly one of 'name' or 'path'");
      spec.lexicon = string(has_name ? src["name"] : src["path"], sw);
      if (has_name && !is_bundled_lexicon(spec.lexicon))
        throw ConfigError(sw + ": unknown bundled lexicon '" + spec.lexicon + "'");
      spec.source_kind = SourceKind::kLexicon;
      std::vector<Value> values;
      for (const auto& s : lexicon(spec.lexicon)) values.emplace_back(s);
      spec.domain = make_explicit(std::move(values));
    } else if (kind == "uniform") {
      check_keys(src, {"kind", "min", "max"}, sw);
      if (!is_numeric(spec.datatype)) throw ConfigError(sw + ": uniform requires a numeric attribute");
      const double lo = number(require(src, "min", sw), sw + ".min");
      const double hi = number(require(src, "max", sw), sw + ".max");
      if (!(lo < hi)) throw ConfigError(sw + ": uniform requires min < max");
      spec.source_kind = SourceKind::kUniform;
      spec.distribution = Distribution{(lo + hi) / 2, (hi - lo) / std::sqrt(12.0)};
      if (integer) {
        spec.domain = RangeDomain{static_cast<std::int64_t>(std::ceil(lo)), static_cast<std::int64_t>(std::floor(hi))};
      } else {
        spec.domain = ContinuousDomain{false, lo, hi};
      }
    } else if (kind == "normal") {
      check_keys(src, {"kind", "mean", "stddev"}, sw);
      if (!is_numeric(spec.datatype)) throw ConfigError(sw + ": normal requires a numeric attribute");
      const double mean = number(require(src, "mean", sw), sw + ".mean");
      const double sd = number(require(src, "stddev", sw), sw + ".stddev");
      if (!(sd > 0)) throw ConfigError(sw + ": normal requires stddev > 0");
      spec.source_kind = SourceKind::kNormal;
      spec.distribution = Distribution{mean, sd};
      spec.domain = ContinuousDomain{true, mean, sd};
    } else if (kind == "template") {
      check_keys(src, {"kind", "template"}, sw);
      if (spec.datatype != Datatype::kString) throw ConfigError(sw + ": template requires a string attribute");
      spec.source_kind = SourceKind::kTemplate;
      spec.domain = parse_template(string(require(src, "template", sw), sw + ".template"));
    } else if (kind == "sequence") {
      check_keys(src, {"kind", "start", "step"}, sw);
      if (!is_numeric(spec.datatype)) throw ConfigError(sw + ": sequence requires a numeric attribute");
      SequenceDomain d;
      d.start = typed_value(require(src, "start", sw), spec.datatype, sw + ".start");
      d.step = src.contains("step") ? typed_value(src["step"], spec.datatype, sw + ".step")
                                    : (integer ? Value(std::int64_t{1}) : Value(1.0));
      if (as_double(d.step) == 0) throw ConfigError(sw + ": sequence step must be non-zero");
      spec.source_kind = SourceKind::kSequence;
      spec.domain = d;
    } else if (kind == "set") {
      check_keys(src, {"kind", "values", "weights"}, sw);
      std::vector<Value> values;
      require_scalar_set(require(src, "values", sw), spec.datatype, sw + ".values", values);
      std::vector<double> weights;
      if (auto it = src.find("weights"); it != src.end()) {
        if (!it->is_array() || it->size() != values.size())
          throw ConfigError(sw + ": weights must match values in length");
        for (const auto& w : *it) {
          double x = number(w, sw + ".weights");
          if (!(x > 0)) throw ConfigError(sw + ": weights must be positive");
          weights.push_back(x);
        }
      }
      spec.source_kind = SourceKind::kConstantSet;
      spec.domain = make_explicit(std::move(values), std::move(weights));
    } else {
      throw ConfigError(sw + ": unknown source kind '" + kind + "'");
    }
    restrict_domain(spec, where);
  }

  // Intersects the source domain with the declared constraints.
  void restrict_domain(AttributeSpec& spec, const std::string& where) {
    if (spec.admissible_set) {
      const auto* weighted = std::get_if<ExplicitDomain>(&spec.domain);
      std::vector<Value> members;
      std::vector<double> weights;
      for (const auto& m : *spec.admissible_set) {
        if (!in_domain(spec, m)) continue;
        if (weighted && !weighted->cumulative.empty()) {
          auto pos = std::find(weighted->values.begin(), weighted->values.end(), m) - weighted->values.begin();
          const double prev = pos == 0 ? 0.0 : weighted->cumulative[pos - 1];
          weights.push_back(weighted->cumulative[pos] - prev);
        }
        members.push_back(m);
      }
      if (members.empty()) throw ConfigError(where + ": constraint contradiction: no admissible_set member can be produced by the source");
      spec.domain = make_explicit(std::move(members), std::move(weights));
    }
    if (auto* ex = std::get_if<ExplicitDomain>(&spec.domain)) {
      std::vector<Value> kept;
      std::vector<double> weights;
      for (std::size_t i = 0; i < ex->values.size(); ++i) {
        if (!satisfies_constraints(spec, ex->values[i])) continue;
        kept.push_back(ex->values[i]);
        if (!ex->cumulative.empty()) weights.push_back(ex->cumulative[i] - (i ? ex->cumulative[i - 1] : 0.0));
      }
      if (kept.empty()) throw ConfigError(where + ": constraint contradiction: no source value satisfies the constraints");
      if (kept.size() != ex->values.size()) spec.domain = make_explicit(std::move(kept), std::move(weights));
    } else if (auto* r = std::get_if<RangeDomain>(&spec.domain)) {
      if (spec.interval) {
        r->lo = std::max(r->lo, static_cast<std::int64_t>(std::ceil(spec.interval->first)));
        r->hi = std::min(r->hi, static_cast<std::int64_t>(std::floor(spec.interval->second)));
      }
      if (r->lo > r->hi) throw ConfigError(where + ": constraint contradiction: source range and interval are disjoint");
    } else if (auto* c = std::get_if<ContinuousDomain>(&spec.domain)) {
      if (!c->normal && spec.interval && (c->b < spec.interval->first || c->a > spec.interval->second))
        throw ConfigError(where + ": constraint contradiction: source range and interval are disjoint");
    }
  }

  // --- dependency rules ---------------------------------------------------

  void parse_dependency(const Json& d, std::size_t index) {
    const std::string where = "dependencies[" + std::to_string(index) + "]";
    check_keys(d, {"determinant", "dependent", "mapping"}, where);
    DependencyRule rule;
    rule.determinant = string(require(d, "determinant", where), where + ".determinant");
    rule.dependent = string(require(d, "dependent", where), where + ".dependent");
    if (rule.determinant == rule.dependent) throw ConfigError(where + ": determinant equals dependent");
    auto det = config_.position(rule.determinant);
    auto dep = config_.position(rule.dependent);
    if (!det) throw ConfigError(where + ": unknown attribute '" + rule.determinant + "'");
    if (!dep) throw ConfigError(where + ": unknown attribute '" + rule.dependent + "'");
    AttributeSpec& dependent = config_.schema[*dep];
    if (dependent.dependency) throw ConfigError(where + ": '" + rule.dependent + "' already has a rule");
    if (has_source_.count(rule.dependent))
      throw ConfigError(where + ": dependent attribute '" + rule.dependent + "' must not declare a source");
    if (dependent.unique) throw ConfigError(where + ": dependent attribute cannot be unique");

    const Json& mapping = require(d, "mapping", where);
    if (!mapping.is_object() || mapping.empty()) throw ConfigError(where + ".mapping: expected a non-empty object");
    const Datatype det_type = config_.schema[*det].datatype;
    for (auto it = mapping.begin(); it != mapping.end(); ++it) {
      Value key = typed_key(it.key(), det_type, where + ".mapping");
      Value val = typed_value(it.value(), dependent.datatype, where + ".mapping['" + it.key() + "']");
      if (!satisfies_constraints(dependent, val))
        throw ConfigError(where + ": constraint contradiction: mapped value " + to_json(val) +
                          " violates the constraints of '" + rule.dependent + "'");
      rule.index.emplace(to_json(key), rule.mapping.size());
      rule.mapping.emplace_back(std::move(key), std::move(val));
    }
    dependent.dependency = config_.dependencies.size();
    dependent.source_kind = SourceKind::kDependent;
    dependent.source_key = "dependent:" + rule.determinant;
    config_.dependencies.push_back(std::move(rule));
  }

  // Resolves dependent domains determinant-first and checks that every
  // mapping is total over its determinant's clean domain.
  void build_dependent_domains() {
    std::vector<bool> done(config_.schema.size());
    for (std::size_t i = 0; i < config_.schema.size(); ++i) {
      const auto& s = config_.schema[i];
      if (!s.dependency) {
        if (!has_source_.count(s.name) && !s.admissible_set)
          throw ConfigError("attribute '" + s.name + "': missing source");
        done[i] = true;
      }
    }
    bool progress = true;
    while (progress) {
      progress = false;
      for (std::size_t i = 0; i < config_.schema.size(); ++i) {
        if (done[i]) continue;
        const DependencyRule& rule = config_.dependencies[*config_.schema[i].dependency];
        const std::size_t det = *config_.position(rule.determinant);
        if (!done[det]) continue;
        check_total(rule, config_.schema[det]);
        std::vector<Value> image;
        std::set<std::string> seen;
        for (const auto& [k, v] : rule.mapping)
          if (seen.insert(to_json(v)).second) image.push_back(v);
        config_.schema[i].domain = make_explicit(std::move(image));
        if (config_.schema[i].admissible_set) restrict_domain(config_.schema[i], "attribute '" + config_.schema[i].name + "'");
        done[i] = true;
        progress = true;
      }
    }
    for (std::size_t i = 0; i < done.size(); ++i)
      if (!done[i]) throw ConfigError("dependency cycle involving attribute '" + config_.schema[i].name + "'");
  }

  void check_total(const DependencyRule& rule, const AttributeSpec& det) {
    const std::string where = "dependency " + rule.determinant + " -> " + rule.dependent;
    auto size = enumerable_size(det);
    const bool finite = std::holds_alternative<ExplicitDomain>(det.domain) ||
                        (std::holds_alternative<RangeDomain>(det.domain) && size && *size <= 1'000'000);
    if (!finite) throw ConfigError(where + ": determinant must have a finite list or small integer range domain");
    for (std::uint64_t k = 0; k < *size; ++k) {
      Value v = domain_at(det, k);
      if (!rule.lookup(v)) throw ConfigError(where + ": mapping is not total, no entry for " + to_json(v));
    }
    if (det.nullable_in_clean) throw ConfigError(where + ": determinant cannot be nullable");
  }

  void replicate_columns() {
    const std::size_t k = config_.scaling.column_replication;
    if (k == 0) return;
    std::set<std::string> in_rules;
    for (const auto& r : config_.dependencies) {
      in_rules.insert(r.determinant);
      in_rules.insert(r.dependent);
    }
    std::vector<AttributeSpec> out;
    for (auto& spec : config_.schema) {
      out.push_back(spec);
      if (in_rules.count(spec.name)) continue;
      for (std::size_t j = 1; j <= k; ++j) {
        AttributeSpec clone = spec;
        clone.name = spec.name + "_" + std::to_string(j);
        clone.replica_of = spec.name;
        out.push_back(std::move(clone));
      }
    }
    std::set<std::string> names;
    for (const auto& s : out)
      if (!names.insert(s.name).second) throw ConfigError("column replication produces duplicate name '" + s.name + "'");
    config_.schema = std::move(out);
  }

  void compute_generation_order() {
    const std::size_t n = config_.schema.size();
    std::vector<bool> placed(n);
    while (config_.generation_order.size() < n) {
      for (std::size_t i = 0; i < n; ++i) {
        if (placed[i]) continue;
        const auto& s = config_.schema[i];
        if (s.dependency) {
          auto det = *config_.position(config_.dependencies[*s.dependency].determinant);
          if (!placed[det]) continue;
        }
        placed[i] = true;
        config_.generation_order.push_back(i);
      }
    }
  }

  void check_unique_capacity() {
    for (const auto& s : config_.schema) {
      if (!s.unique) continue;
      auto size = enumerable_size(s);
      if (!size) throw ConfigError("attribute '" + s.name + "': unique requires an enumerable source");
      if (*size < config_.tuple_count)
        throw ConfigError("attribute '" + s.name + "': unique source exhausted: " + std::to_string(*size) +
                          " distinct values for " + std::to_string(config_.tuple_count) + " tuples");
      if (const auto* seq = std::get_if<SequenceDomain>(&s.domain); seq && config_.tuple_count > 0) {
        for (std::uint64_t k : {std::uint64_t{0}, config_.tuple_count - 1})
          if (!satisfies_constraints(s, sequence_at(*seq, k)))
            throw ConfigError("attribute '" + s.name + "': sequence leaves the declared constraints within " +
                              std::to_string(config_.tuple_count) + " tuples");
      }
    }
  }

  // --- error specs --------------------------------------------------------

  // Returns an empty string when `type` can be injected into `attr`,
  // otherwise the reason it cannot.
  std::string inapplicable_reason(ErrorType type, const AttributeSpec& attr) const {
    const bool is_sequence = std::holds_alternative<SequenceDomain>(attr.domain);
    switch (type) {
      case ErrorType::kMissingValue:
      case ErrorType::kMeaninglessValue:
      case ErrorType::kMissingAttribute:
        return {};
      case ErrorType::kSyntaxViolation:
        return attr.has_pattern() ? "" : "attribute declares no pattern";
      case ErrorType::kIntervalViolation:
        return attr.interval ? "" : "attribute declares no interval";
      case ErrorType::kSetViolation:
        return attr.admissible_set ? "" : "attribute declares no admissible_set";
      case ErrorType::kMisspelling:
        return attr.datatype == Datatype::kString ? "" : "attribute is not a string";
      case ErrorType::kInadequateValueToAttributeContext:
        for (const auto& o : config_.schema)
          if (o.name != attr.name && o.source_key != attr.source_key && !std::holds_alternative<SequenceDomain>(o.domain))
            return {};
        return "no other attribute with a distinct value source";
      case ErrorType::kValueItemsBeyondAttributeContext:
        if (attr.datatype != Datatype::kString) return "attribute is not a string";
        for (const auto& o : config_.schema)
          if (o.name != attr.name && !std::holds_alternative<SequenceDomain>(o.domain)) return {};
        return "no other attribute to draw tokens from";
      case ErrorType::kErroneousEntry: {
        if (is_sequence) return "sequence sources have no alternative values";
        auto size = enumerable_size(attr);
        return (!size || *size >= 2) ? "" : "value source has fewer than two values";
      }
      case ErrorType::kUniquenessValueViolation:
        return attr.unique ? "" : "attribute is not unique";
      case ErrorType::kSynonymsExistence: {
        if (attr.synonyms.empty()) return "attribute declares no synonyms";
        if (const auto* ex = std::get_if<ExplicitDomain>(&attr.domain)) {
          for (const auto& [k, list] : attr.synonyms)
            if (ex->contains(Value(k))) return {};
          return "no synonym key occurs in the attribute's value domain";
        }
        return {};
      }
      case ErrorType::kOutlier:
      case ErrorType::kNoise:
        return attr.distribution ? "" : "attribute has no uniform or normal source";
      default:
        return "type is not attribute-scoped";
    }
  }

  static bool takes_targets(ErrorType t) {
    return plan_level(t) == PlanLevel::kCell ||
           (plan_level(t) == PlanLevel::kColumn && t != ErrorType::kBias) ||
           t == ErrorType::kInconsistencyAmongAttributeValues;
  }

  void parse_error_spec(const Json& e, std::size_t index) {
    std::string where = "errors[" + std::to_string(index) + "]";
    check_keys(e, {"type", "rate", "attributes", "params"}, where);
    const std::string type_name = string(require(e, "type", where), where + ".type");
    auto type = error_type_from_name(type_name);
    if (!type) throw ConfigError(where + ": unknown error_type '" + type_name + "'");
    where += " (" + type_name + ")";
    ErrorSpec spec;
    spec.type = *type;
    spec.rate = number(require(e, "rate", where), where + ".rate");
    if (!(spec.rate >= 0 && spec.rate <= 1)) throw ConfigError(where + ": rate must be in [0, 1]");

    if (auto it = e.find("attributes"); it != e.end()) {
      if (!takes_targets(spec.type)) throw ConfigError(where + ": this type does not take target attributes");
      if (!it->is_array() || it->empty()) throw ConfigError(where + ".attributes: expected a non-empty array");
      for (const auto& a : *it) {
        std::string name = string(a, where + ".attributes");
        if (!config_.position(name)) throw ConfigError(where + ": unknown attribute '" + name + "'");
        if (std::find(spec.targets.begin(), spec.targets.end(), name) != spec.targets.end())
          throw ConfigError(where + ": attribute '" + name + "' listed twice");
        spec.targets.push_back(std::move(name));
      }
      spec.explicit_targets = true;
    }

    const Json params = e.contains("params") ? e["params"] : Json::object();
    parse_params(spec, params, where);

    if (spec.type == ErrorType::kInconsistencyAmongAttributeValues) {
      std::vector<std::string> usable;
      for (const auto& r : config_.dependencies) {
        const auto& dep = config_.attribute(r.dependent);
        if (enumerable_size(dep).value_or(0) >= 2) usable.push_back(r.dependent);
      }
      if (usable.empty()) throw ConfigError(where + ": type not applicable: no dependency rule with two or more mapped values");
      if (spec.explicit_targets) {
        for (const auto& t : spec.targets)
          if (std::find(usable.begin(), usable.end(), t) == usable.end())
            throw ConfigError(where + ": type not applicable to attribute '" + t + "': not a dependent with alternatives");
      } else {
        spec.targets = usable;
      }
    } else if (takes_targets(spec.type)) {
      if (spec.explicit_targets) {
        for (const auto& t : spec.targets) {
          std::string reason = inapplicable_reason(spec.type, config_.attribute(t));
          if (!reason.empty()) throw ConfigError(where + ": type not applicable to attribute '" + t + "': " + reason);
        }
      } else {
        for (const auto& a : config_.schema)
          if (inapplicable_reason(spec.type, a).empty()) spec.targets.push_back(a.name);
        if (spec.targets.empty()) throw ConfigError(where + ": type not applicable to any attribute");
      }
    }
    check_row_and_insertion_applicability(spec, where);

    const std::uint64_t population = applicable_population(spec, config_.tuple_count);
    const std::uint64_t count = target_count(spec.rate, population);
    std::uint64_t capacity = population;
    if (spec.type == ErrorType::kUniquenessValueViolation)
      capacity = spec.targets.size() * (config_.tuple_count ? config_.tuple_count - 1 : 0);
    if (count > capacity)
      throw ConfigError(where + ": infeasible rate: " + std::to_string(count) + " errors exceed the applicable population of " +
                        std::to_string(capacity));
    config_.errors.push_back(std::move(spec));
  }

  void check_row_and_insertion_applicability(ErrorSpec& spec, const std::string& where) {
    auto non_unique = [&](auto pred) {
      std::size_t n = 0;
      for (const auto& a : config_.schema)
        if (!a.unique && pred(a)) ++n;
      return n;
    };
    switch (spec.type) {
      case ErrorType::kSemiEmptyTuple:
        if (config_.schema.size() < 2) throw ConfigError(where + ": type not applicable: needs at least two attributes");
        break;
      case ErrorType::kRedundancyAboutEntity:
        if (spec.params.near_duplicate && spec.params.perturbed_attributes > 0 &&
            non_unique([](const AttributeSpec& a) { return a.datatype == Datatype::kString; }) <
                spec.params.perturbed_attributes)
          throw ConfigError(where + ": type not applicable: not enough non-key string attributes to perturb");
        break;
      case ErrorType::kInconsistencyAboutEntity:
        if (non_unique([&](const AttributeSpec& a) {
              return inapplicable_reason(ErrorType::kErroneousEntry, a).empty();
            }) == 0)
          throw ConfigError(where + ": type not applicable: no non-key attribute with alternative values");
        break;
      default:
        break;
    }
  }

  void parse_params(ErrorSpec& spec, const Json& p, const std::string& where) {
    const std::string pw = where + ".params";
    auto& out = spec.params;
    switch (spec.type) {
      case ErrorType::kSemiEmptyTuple:
        check_keys(p, {"empty_fraction"}, pw);
        if (p.contains("empty_fraction")) {
          out.empty_fraction = number(p["empty_fraction"], pw + ".empty_fraction");
          if (!(out.empty_fraction > 0 && out.empty_fraction <= 1))
            throw ConfigError(pw + ": empty_fraction must be in (0, 1]");
        }
        break;
      case ErrorType::kRedundancyAboutEntity:
        check_keys(p, {"near_duplicate", "perturbed_attributes"}, pw);
        if (p.contains("near_duplicate")) out.near_duplicate = boolean(p["near_duplicate"], pw + ".near_duplicate");
        if (p.contains("perturbed_attributes"))
          out.perturbed_attributes = unsigned_integer(p["perturbed_attributes"], pw + ".perturbed_attributes");
        break;
      case ErrorType::kOutlier:
        check_keys(p, {"k"}, pw);
        if (p.contains("k")) {
          out.k = number(p["k"], pw + ".k");
          if (!(out.k > 0)) throw ConfigError(pw + ": k must be positive");
        }
        break;
      case ErrorType::kNoise:
        check_keys(p, {"alpha"}, pw);
        if (p.contains("alpha")) {
          out.alpha = number(p["alpha"], pw + ".alpha");
          if (!(out.alpha > 0)) throw ConfigError(pw + ": alpha must be positive");
        }
        break;
      case ErrorType::kIrrelevantObservation:
        check_keys(p, {"offdomain"}, pw);
        if (p.contains("offdomain")) {
          const Json& od = p["offdomain"];
          if (!od.is_object()) throw ConfigError(pw + ".offdomain: expected an object");
          for (auto it = od.begin(); it != od.end(); ++it) {
            auto pos = config_.position(it.key());
            if (!pos) throw ConfigError(pw + ".offdomain: unknown attribute '" + it.key() + "'");
            AttributeSpec s;
            s.name = it.key();
            s.datatype = config_.schema[*pos].datatype;
            s.source_key = it->dump();
            parse_source(s, *it, pw + ".offdomain['" + it.key() + "']");
            out.offdomain.push_back(std::move(s));
          }
        }
        break;
      case ErrorType::kBias:
        parse_bias(spec, p, pw);
        break;
      default:
        if (!p.is_object() || !p.empty()) throw ConfigError(pw + ": this type takes no parameters");
    }
  }

  void parse_bias(ErrorSpec& spec, const Json& p, const std::string& pw) {
    check_keys(p, {"group_attribute", "group_value", "target_attribute", "shift", "skewed_weights"}, pw);
    auto& out = spec.params;
    out.group_attribute = string(require(p, "group_attribute", pw), pw + ".group_attribute");
    out.target_attribute = string(require(p, "target_attribute", pw), pw + ".target_attribute");
    if (!config_.position(out.group_attribute)) throw ConfigError(pw + ": unknown attribute '" + out.group_attribute + "'");
    if (!config_.position(out.target_attribute)) throw ConfigError(pw + ": unknown attribute '" + out.target_attribute + "'");
    if (out.group_attribute == out.target_attribute) throw ConfigError(pw + ": group and target attribute must differ");
    const auto& group = config_.attribute(out.group_attribute);
    const auto& target = config_.attribute(out.target_attribute);
    out.group_value = typed_value(require(p, "group_value", pw), group.datatype, pw + ".group_value");
    spec.targets = {out.target_attribute};
    if (is_numeric(target.datatype)) {
      if (p.contains("skewed_weights")) throw ConfigError(pw + ": skewed_weights apply to categorical targets only");
      double shift;
      if (p.contains("shift")) {
        shift = number(p["shift"], pw + ".shift");
      } else if (target.distribution) {
        shift = target.distribution->stddev;
      } else {
        throw ConfigError(pw + ": shift is required when the target has no uniform or normal source");
      }
      if (target.datatype == Datatype::kInteger) shift = static_cast<double>(std::llround(shift));
      if (shift == 0) throw ConfigError(pw + ": shift must be non-zero");
      out.shift = shift;
    } else {
      if (p.contains("shift")) throw ConfigError(pw + ": shift applies to numeric targets only");
      const Json& w = require(p, "skewed_weights", pw);
      if (!w.is_object() || w.empty()) throw ConfigError(pw + ".skewed_weights: expected a non-empty object");
      double total = 0;
      for (auto it = w.begin(); it != w.end(); ++it) {
        double x = number(it.value(), pw + ".skewed_weights");
        if (x < 0) throw ConfigError(pw + ".skewed_weights: weights must be non-negative");
        total += x;
        out.skewed_weights.emplace_back(Value(it.key()), x);
      }
      if (!(total > 0)) throw ConfigError(pw + ".skewed_weights: at least one weight must be positive");
      std::size_t positive = 0;
      for (const auto& [v, x] : out.skewed_weights) positive += x > 0;
      if (positive < 2 && out.skewed_weights.size() < 2)
        throw ConfigError(pw + ".skewed_weights: need at least two values so a re-draw can differ");
    }
  }

  void check_duplicate_specs() {
    std::set<std::pair<ErrorType, std::string>> seen;
    for (const auto& s : config_.errors) {
      std::vector<std::string> keys = s.targets;
      if (keys.empty() || is_insertion(s.type) || plan_level(s.type) == PlanLevel::kRow) keys = {"*"};
      for (const auto& k : keys) {
        if (!seen.insert({s.type, k}).second)
          throw ConfigError("errors: more than one " + std::string(name_of(s.type)) + " spec for attribute '" + k + "'");
      }
    }
  }

  ParseOptions options_;
  GeneratorConfig config_;
  std::set<std::string> has_source_;
  std::map<std::string, std::vector<std::string>> lexicon_cache_;
};

}  // namespace config_detail

// Parses and validates a configuration document. Lexicon files are resolved
// and loaded; the result satisfies every structural invariant the generator
// and injectors rely on.
inline GeneratorConfig parse_config(std::string_view text, const ParseOptions& options = {}) {
  return config_detail::Parser(options).run(text);
}

inline GeneratorConfig load_config(const std::filesystem::path& path, ParseOptions options = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (options.base_dir.empty()) options.base_dir = path.parent_path();
  return parse_config(buf.str(), options);
}

}  // namespace dirtygen
