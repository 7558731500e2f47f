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

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "dirtygen/errors.hpp"

namespace dirtygen {

struct Null {
  friend bool operator==(Null, Null) { return true; }
};

// A single cell. Absent cells are modelled by the key missing from a Record.
using Value = std::variant<Null, std::int64_t, double, std::string>;

inline bool is_null(const Value& v) { return std::holds_alternative<Null>(v); }
inline bool is_string(const Value& v) { return std::holds_alternative<std::string>(v); }
inline bool is_numeric(const Value& v) {
  return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v);
}

inline double as_double(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  throw Error("value is not numeric");
}

// Shortest round-trip decimal form. Integral doubles keep a ".0" suffix so
// that they read back as floating point.
inline std::string format_double(double d) {
  if (!std::isfinite(d)) throw GenerationError("cannot serialize non-finite number");
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), d);
  std::string out(buf, end);
  if (out.find_first_of(".e") == std::string::npos) out += ".0";
  return out;
}

inline void append_json_string(std::string& out, std::string_view s) {
  static constexpr char kHex[] = "0123456789abcdef";
  out.push_back('"');
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          out += "\\u00";
          out.push_back(kHex[c >> 4]);
          out.push_back(kHex[c & 0xF]);
        } else {
          out.push_back(static_cast<char>(c));
        }
    }
  }
  out.push_back('"');
}

inline void append_json(std::string& out, const Value& v) {
  std::visit(
      [&out](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Null>) {
          out += "null";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          out += std::to_string(x);
        } else if constexpr (std::is_same_v<T, double>) {
          out += format_double(x);
        } else {
          append_json_string(out, x);
        }
      },
      v);
}

inline std::string to_json(const Value& v) {
  std::string out;
  append_json(out, v);
  return out;
}

// Plain-text rendering used when a value is spliced into a string.
inline std::string to_text(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return to_json(v);
}

// Converts a parsed JSON scalar. Booleans, arrays and objects are rejected.
template <typename Json>
Value value_from_json(const Json& j) {
  if (j.is_null()) return Null{};
  if (j.is_string()) return j.template get<std::string>();
  if (j.is_number_unsigned()) {
    auto u = j.template get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
      throw Error("integer out of range");
    return static_cast<std::int64_t>(u);
  }
  if (j.is_number_integer()) return j.template get<std::int64_t>();
  if (j.is_number_float()) return j.template get<double>();
  throw Error("unsupported JSON value: " + j.dump());
}

inline Value parse_json_value(std::string_view text) {
  auto j = nlohmann::json::parse(text.begin(), text.end());
  return value_from_json(j);
}

// One tuple: attribute name -> value in schema order. A missing key is an
// absent attribute, distinct from an explicit null.
class Record {
 public:
  using Field = std::pair<std::string, Value>;

  Record() = default;
  explicit Record(std::vector<Field> fields) : fields_(std::move(fields)) {}

  const std::vector<Field>& fields() const { return fields_; }
  std::size_t size() const { return fields_.size(); }
  bool empty() const { return fields_.empty(); }

  const Value* find(std::string_view name) const {
    for (const auto& f : fields_)
      if (f.first == name) return &f.second;
    return nullptr;
  }
  Value* find(std::string_view name) {
    for (auto& f : fields_)
      if (f.first == name) return &f.second;
    return nullptr;
  }
  bool contains(std::string_view name) const { return find(name) != nullptr; }

  // Replaces the value in place, or appends a new key at the end.
  void set(std::string_view name, Value v) {
    if (Value* slot = find(name)) {
      *slot = std::move(v);
    } else {
      fields_.emplace_back(std::string(name), std::move(v));
    }
  }

  bool erase(std::string_view name) {
    for (auto it = fields_.begin(); it != fields_.end(); ++it) {
      if (it->first == name) {
        fields_.erase(it);
        return true;
      }
    }
    return false;
  }

  friend bool operator==(const Record&, const Record&) = default;

 private:
  std::vector<Field> fields_;
};

inline void append_json(std::string& out, const Record& r) {
  out.push_back('{');
  bool first = true;
  for (const auto& [name, value] : r.fields()) {
    if (!first) out.push_back(',');
    first = false;
    append_json_string(out, name);
    out.push_back(':');
    append_json(out, value);
  }
  out.push_back('}');
}

inline std::string to_json(const Record& r) {
  std::string out;
  append_json(out, r);
  return out;
}

inline Record record_from_json(const nlohmann::ordered_json& j) {
  if (!j.is_object()) throw Error("expected a JSON object");
  std::vector<Record::Field> fields;
  fields.reserve(j.size());
  for (auto it = j.begin(); it != j.end(); ++it) {
    fields.emplace_back(it.key(), value_from_json(it.value()));
  }
  return Record(std::move(fields));
}

}  // namespace dirtygen
