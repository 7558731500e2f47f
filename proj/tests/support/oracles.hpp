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

// Test-side oracles. These work from the raw configuration document and
// plain data; they do not call into the library's validation or injection
// code.

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "dirtygen/inject.hpp"
#include "dirtygen/value.hpp"

namespace oracle {

using dirtygen::Record;
using dirtygen::Value;
using Json = nlohmann::json;

inline std::vector<std::string> read_lines_trimmed(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto b = line.find_first_not_of(" \t\r");
    auto e = line.find_last_not_of(" \t\r");
    if (b == std::string::npos) continue;
    out.push_back(line.substr(b, e - b + 1));
  }
  return out;
}

inline bool value_equals_json(const Value& v, const Json& j) {
  if (j.is_string()) return std::holds_alternative<std::string>(v) && std::get<std::string>(v) == j.get<std::string>();
  if (j.is_number_integer())
    return std::holds_alternative<std::int64_t>(v) && std::get<std::int64_t>(v) == j.get<std::int64_t>();
  if (j.is_number_float()) return std::holds_alternative<double>(v) && std::get<double>(v) == j.get<double>();
  return false;
}

inline bool template_match(const std::string& tmpl, const std::string& s) {
  std::size_t p = 0;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    char t = tmpl[i];
    if (p >= s.size()) return false;
    char c = s[p++];
    if (t == '\\') {
      if (c != tmpl[++i]) return false;
    } else if (t == '#') {
      if (c < '0' || c > '9') return false;
    } else if (t == 'A') {
      if (c < 'A' || c > 'Z') return false;
    } else if (t == 'a') {
      if (c < 'a' || c > 'z') return false;
    } else if (c != t) {
      return false;
    }
  }
  return p == s.size();
}

// Checks clean records against every constraint declared in the document.
// Returns human-readable violations (empty = valid).
inline std::vector<std::string> check_clean(const Json& doc, const std::vector<Record>& records,
                                            const std::filesystem::path& lexicon_dir) {
  std::vector<std::string> bad;
  const auto& schema = doc.at("schema");
  std::size_t replication = 0;
  if (doc.at("generation").contains("column_replication"))
    replication = doc["generation"]["column_replication"].get<std::size_t>();
  std::set<std::string> in_rules;
  if (doc.contains("dependencies"))
    for (const auto& r : doc["dependencies"]) {
      in_rules.insert(r["determinant"].get<std::string>());
      in_rules.insert(r["dependent"].get<std::string>());
    }

  for (const auto& a : schema) {
    const std::string base = a["name"].get<std::string>();
    std::vector<std::string> names{base};
    if (!in_rules.count(base))
      for (std::size_t j = 1; j <= replication; ++j) names.push_back(base + "_" + std::to_string(j));
    const std::string type = a["type"].get<std::string>();
    const bool nullable = a.value("nullable_in_clean", false);
    std::optional<std::regex> re;
    if (a.contains("pattern")) re.emplace(a["pattern"].get<std::string>());
    std::vector<std::string> lexicon;
    if (a.contains("source") && a["source"]["kind"] == "lexicon") {
      const auto& s = a["source"];
      lexicon = s.contains("name") ? read_lines_trimmed(lexicon_dir / (s["name"].get<std::string>() + ".txt"))
                                   : read_lines_trimmed(s["path"].get<std::string>());
    }
    for (const auto& name : names) {
      std::set<std::string> seen;
      for (std::size_t i = 0; i < records.size(); ++i) {
        const std::string where = "tuple " + std::to_string(i) + " attribute " + name;
        const Value* v = records[i].find(name);
        if (!v) {
          bad.push_back(where + ": absent");
          continue;
        }
        if (dirtygen::is_null(*v)) {
          if (!nullable) bad.push_back(where + ": null");
          continue;
        }
        const bool type_ok = (type == "string" && std::holds_alternative<std::string>(*v)) ||
                             (type == "integer" && std::holds_alternative<std::int64_t>(*v)) ||
                             (type == "float" && std::holds_alternative<double>(*v));
        if (!type_ok) {
          bad.push_back(where + ": wrong type");
          continue;
        }
        if (re && !std::regex_match(std::get<std::string>(*v), *re)) bad.push_back(where + ": pattern");
        if (a.contains("interval")) {
          const double x = dirtygen::as_double(*v);
          if (x < a["interval"][0].get<double>() || x > a["interval"][1].get<double>()) bad.push_back(where + ": interval");
        }
        if (a.contains("admissible_set")) {
          bool found = false;
          for (const auto& m : a["admissible_set"]) found |= value_equals_json(*v, m);
          if (!found) bad.push_back(where + ": admissible_set");
        }
        if (a.contains("source")) {
          const auto& s = a["source"];
          const std::string kind = s["kind"];
          if (kind == "lexicon") {
            if (std::find(lexicon.begin(), lexicon.end(), std::get<std::string>(*v)) == lexicon.end())
              bad.push_back(where + ": not in lexicon");
          } else if (kind == "set") {
            bool found = false;
            for (const auto& m : s["values"]) found |= value_equals_json(*v, m);
            if (!found) bad.push_back(where + ": not in source set");
          } else if (kind == "uniform") {
            const double x = dirtygen::as_double(*v);
            if (x < s["min"].get<double>() || x > s["max"].get<double>()) bad.push_back(where + ": outside uniform range");
          } else if (kind == "template") {
            if (!template_match(s["template"].get<std::string>(), std::get<std::string>(*v)))
              bad.push_back(where + ": template");
          } else if (kind == "sequence") {
            const double step = s.contains("step") ? s["step"].get<double>() : 1.0;
            if (dirtygen::as_double(*v) != s["start"].get<double>() + step * static_cast<double>(i))
              bad.push_back(where + ": sequence");
          }
        }
        if (a.value("unique", false) && !seen.insert(dirtygen::to_json(*v)).second)
          bad.push_back(where + ": duplicate of a unique value");
      }
    }
  }
  if (doc.contains("dependencies")) {
    for (const auto& r : doc["dependencies"]) {
      const std::string det = r["determinant"], dep = r["dependent"];
      for (std::size_t i = 0; i < records.size(); ++i) {
        const Value* d = records[i].find(det);
        const Value* v = records[i].find(dep);
        if (!d || !v) {
          bad.push_back("tuple " + std::to_string(i) + ": rule attributes absent");
          continue;
        }
        const std::string key = dirtygen::to_text(*d);
        if (!r["mapping"].contains(key) || !value_equals_json(*v, r["mapping"][key]))
          bad.push_back("tuple " + std::to_string(i) + ": rule " + det + " -> " + dep + " violated");
      }
    }
  }
  return bad;
}

// Unrestricted Damerau-Levenshtein distance over code points
// (Lowrance-Wagner).
inline std::size_t damerau(const std::string& a8, const std::string& b8) {
  const std::u32string a = dirtygen::to_u32(a8), b = dirtygen::to_u32(b8);
  const std::size_t n = a.size(), m = b.size(), inf = n + m;
  std::map<char32_t, std::size_t> last_row;
  std::vector<std::vector<std::size_t>> d(n + 2, std::vector<std::size_t>(m + 2, 0));
  d[0][0] = inf;
  for (std::size_t i = 0; i <= n; ++i) {
    d[i + 1][0] = inf;
    d[i + 1][1] = i;
  }
  for (std::size_t j = 0; j <= m; ++j) {
    d[0][j + 1] = inf;
    d[1][j + 1] = j;
  }
  for (std::size_t i = 1; i <= n; ++i) {
    std::size_t last_col = 0;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t i1 = last_row.count(b[j - 1]) ? last_row[b[j - 1]] : 0;
      const std::size_t j1 = last_col;
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      if (cost == 0) last_col = j;
      d[i + 1][j + 1] = std::min({d[i][j] + cost, d[i + 1][j] + 1, d[i][j + 1] + 1,
                                  d[i1][j1] + (i - i1 - 1) + 1 + (j - j1 - 1)});
    }
    last_row[a[i - 1]] = i;
  }
  return d[n + 1][m + 1];
}

// Rebuilds the dirty dataset (in file order) from the clean dataset and the
// log alone.
inline std::vector<Record> replay(const std::vector<Record>& clean, const std::vector<dirtygen::ErrorLogEntry>& log,
                                  const std::vector<std::string>& schema_order) {
  std::vector<Record> base = clean;
  std::map<std::uint64_t, std::map<std::string, Value>> inserted_cells;
  std::map<std::uint64_t, std::optional<std::uint64_t>> inserted_source;
  for (const auto& e : log) {
    if (dirtygen::is_insertion(e.type)) {
      if (!e.attribute) inserted_source[e.dirty_index] = e.clean_index;
      else inserted_cells[e.dirty_index][*e.attribute] = *e.dirty_value;
      continue;
    }
    if (!e.attribute) continue;  // row marker
    Record& r = base.at(e.dirty_index);
    if (e.dirty_value) r.set(*e.attribute, *e.dirty_value);
    else r.erase(*e.attribute);
  }
  auto build = [&](std::uint64_t idx) {
    std::vector<Record::Field> f;
    for (const auto& name : schema_order) f.emplace_back(name, inserted_cells[idx].at(name));
    return Record(std::move(f));
  };
  std::vector<Record> out;
  for (std::uint64_t i = 0; i < base.size(); ++i) {
    out.push_back(base[i]);
    for (const auto& [idx, src] : inserted_source)
      if (src && *src == i) out.push_back(build(idx));
  }
  for (const auto& [idx, src] : inserted_source)
    if (!src) out.push_back(build(idx));
  return out;
}

// Whether disjoint subsets of sizes a and b exist in an n-element set,
// by enumerating every pair of subsets.
inline bool disjoint_placement_exists(unsigned n, unsigned a, unsigned b) {
  for (std::uint32_t x = 0; x < (1u << n); ++x) {
    if (static_cast<unsigned>(__builtin_popcount(x)) != a) continue;
    for (std::uint32_t y = 0; y < (1u << n); ++y)
      if (static_cast<unsigned>(__builtin_popcount(y)) == b && (x & y) == 0) return true;
  }
  return false;
}

}  // namespace oracle
