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

// File formats. See docs/formats.md for the byte-level description.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dirtygen/errors.hpp"
#include "dirtygen/inject.hpp"
#include "dirtygen/rng.hpp"
#include "dirtygen/schema.hpp"
#include "dirtygen/value.hpp"

namespace dirtygen {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kLogFormatVersion = "dirtygen-errors/1";

inline std::string extension_for(OutputMode mode) { return mode == OutputMode::kNdjson ? ".ndjson" : ".json"; }

// "clean.ndjson", or "clean-0002-of-0004.ndjson" when sharded.
inline std::string dataset_file_name(const std::string& which, OutputMode mode, std::size_t shard,
                                     std::size_t shard_count) {
  if (shard_count <= 1) return which + extension_for(mode);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "-%04zu-of-%04zu", shard + 1, shard_count);
  return which + buf + extension_for(mode);
}

inline std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

class OutputFile {
 public:
  explicit OutputFile(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot open for writing: " + path.string());
  }
  void write(std::string_view s) {
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!out_) throw IoError("write failed: " + path_.string());
  }
  void close() {
    out_.close();
    if (out_.fail()) throw IoError("close failed: " + path_.string());
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

// Writes one dataset file. A deleted row (repaired files only) is the
// literal `null`.
class DatasetWriter {
 public:
  DatasetWriter(const std::filesystem::path& path, OutputMode mode) : file_(path), mode_(mode) {}

  void write(const Record& r) {
    buf_.clear();
    append_json(buf_, r);
    put(buf_);
  }
  void write_deleted() { put("null"); }

  void close() {
    if (mode_ == OutputMode::kJsonArray) file_.write(count_ ? "\n]\n" : "[]\n");
    file_.close();
  }

 private:
  void put(std::string_view line) {
    if (mode_ == OutputMode::kNdjson) {
      file_.write(line);
      file_.write("\n");
    } else {
      file_.write(count_ ? ",\n" : "[\n");
      file_.write(line);
    }
    ++count_;
  }

  OutputFile file_;
  OutputMode mode_;
  std::string buf_;
  std::uint64_t count_ = 0;
};

// Splits a dataset across shards by contiguous base-tuple ranges. Rows with
// index >= base_count stay in the shard of the row written before them.
class ShardedWriter {
 public:
  ShardedWriter(const std::filesystem::path& dir, const std::string& which, OutputMode mode, std::size_t shards,
                std::uint64_t base_count)
      : base_count_(base_count) {
    if (shards == 0) shards = 1;
    for (std::size_t s = 0; s < shards; ++s)
      writers_.push_back(std::make_unique<DatasetWriter>(dir / dataset_file_name(which, mode, s, shards), mode));
  }

  std::size_t shard_of(std::uint64_t base_index) const {
    if (base_count_ == 0) return 0;
    return static_cast<std::size_t>(static_cast<unsigned __int128>(base_index) * writers_.size() / base_count_);
  }

  void write(std::uint64_t index, const Record& r) {
    if (index < base_count_) current_ = shard_of(index);
    writers_[current_]->write(r);
  }

  void close() {
    for (auto& w : writers_) w->close();
  }

  std::vector<std::filesystem::path> paths(const std::filesystem::path& dir, const std::string& which,
                                           OutputMode mode) const {
    std::vector<std::filesystem::path> out;
    for (std::size_t s = 0; s < writers_.size(); ++s) out.push_back(dir / dataset_file_name(which, mode, s, writers_.size()));
    return out;
  }

 private:
  std::uint64_t base_count_;
  std::size_t current_ = 0;
  std::vector<std::unique_ptr<DatasetWriter>> writers_;
};

inline void write_dataset(const std::filesystem::path& path, const std::vector<Record>& records, OutputMode mode) {
  DatasetWriter w(path, mode);
  for (const auto& r : records) w.write(r);
  w.close();
}

// --- reading datasets -----------------------------------------------------------

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return buf.str();
}

// One row per line; nullopt marks a deleted row.
using Rows = std::vector<std::optional<Record>>;

inline std::optional<Record> row_from_json(const nlohmann::ordered_json& j, std::size_t line) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_object()) throw FormatError(line, "expected a JSON object or null");
  try {
    return record_from_json(j);
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(line, e.what());
  }
}

inline Rows parse_ndjson(std::string_view text) {
  Rows rows;
  std::size_t line_no = 0, start = 0;
  while (start < text.size()) {
    ++line_no;
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) throw FormatError(line_no, "missing final newline");
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (line.empty()) throw FormatError(line_no, "empty line");
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(line.begin(), line.end());
    } catch (const std::exception& e) {
      throw FormatError(line_no, std::string("invalid JSON: ") + e.what());
    }
    rows.push_back(row_from_json(j, line_no));
  }
  return rows;
}

inline Rows parse_json_array(std::string_view text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text.begin(), text.end());
  } catch (const std::exception& e) {
    throw FormatError(1, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_array()) throw FormatError(1, "expected a JSON array");
  Rows rows;
  for (std::size_t i = 0; i < j.size(); ++i) rows.push_back(row_from_json(j[i], i + 1));
  return rows;
}

inline OutputMode mode_for_path(const std::filesystem::path& path) {
  return path.extension() == ".json" ? OutputMode::kJsonArray : OutputMode::kNdjson;
}

inline Rows read_rows(const std::filesystem::path& path, std::optional<OutputMode> mode = std::nullopt) {
  const std::string text = read_file(path);
  try {
    return mode.value_or(mode_for_path(path)) == OutputMode::kNdjson ? parse_ndjson(text) : parse_json_array(text);
  } catch (const FormatError& e) {
    throw FormatError(e.line(), path.string() + ": " + e.what());
  }
}

// Like read_rows but deleted rows are an error.
inline std::vector<Record> read_dataset(const std::filesystem::path& path, std::optional<OutputMode> mode = std::nullopt) {
  std::vector<Record> out;
  std::size_t line = 0;
  for (auto& r : read_rows(path, mode)) {
    ++line;
    if (!r) throw FormatError(line, path.string() + ": unexpected null row");
    out.push_back(std::move(*r));
  }
  return out;
}

// --- error log -----------------------------------------------------------------

inline std::string log_header(std::uint64_t seed, std::uint64_t config_hash) {
  return std::string("# ") + kLogFormatVersion +
         " columns=dirty_index,clean_index,attribute,error_type,clean_value,dirty_value seed=" + std::to_string(seed) +
         " config_hash=" + hex64(config_hash) + "\n";
}

inline void append_log_line(std::string& out, const ErrorLogEntry& e) {
  out += std::to_string(e.dirty_index);
  out += '\t';
  out += e.clean_index ? std::to_string(*e.clean_index) : "-";
  out += '\t';
  out += e.attribute ? *e.attribute : "-";
  out += '\t';
  out += name_of(e.type);
  out += '\t';
  if (e.clean_value) append_json(out, *e.clean_value); else out += '-';
  out += '\t';
  if (e.dirty_value) append_json(out, *e.dirty_value); else out += '-';
  out += '\n';
}

class LogWriter {
 public:
  LogWriter(const std::filesystem::path& path, std::uint64_t seed, std::uint64_t config_hash) : file_(path) {
    file_.write(log_header(seed, config_hash));
  }
  void write(const ErrorLogEntry& e) {
    buf_.clear();
    append_log_line(buf_, e);
    file_.write(buf_);
  }
  void close() { file_.close(); }

 private:
  OutputFile file_;
  std::string buf_;
};

inline void write_error_log(const std::filesystem::path& path, const std::vector<ErrorLogEntry>& entries,
                            std::uint64_t seed, std::uint64_t config_hash) {
  LogWriter w(path, seed, config_hash);
  for (const auto& e : entries) w.write(e);
  w.close();
}

namespace output_detail {

inline std::uint64_t parse_index(std::string_view s, std::size_t line, const char* what) {
  std::uint64_t x = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size())
    throw FormatError(line, std::string("bad ") + what + ": '" + std::string(s) + "'");
  return x;
}

inline std::optional<Value> parse_cell(std::string_view s, std::size_t line, const char* what) {
  if (s == "-") return std::nullopt;
  try {
    return parse_json_value(s);
  } catch (const std::exception& e) {
    throw FormatError(line, std::string("bad ") + what + ": " + e.what());
  }
}

}  // namespace output_detail

inline ErrorLogEntry parse_log_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string_view> f;
  std::size_t start = 0;
  for (;;) {
    std::size_t tab = line.find('\t', start);
    f.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  if (f.size() != 6) throw FormatError(line_no, "expected 6 tab-separated fields, found " + std::to_string(f.size()));
  ErrorLogEntry e;
  e.dirty_index = output_detail::parse_index(f[0], line_no, "dirty_index");
  if (f[1] != "-") e.clean_index = output_detail::parse_index(f[1], line_no, "clean_index");
  if (f[2].empty()) throw FormatError(line_no, "empty attribute field");
  if (f[2] != "-") e.attribute = std::string(f[2]);
  auto type = error_type_from_name(f[3]);
  if (!type) throw FormatError(line_no, "unknown error type '" + std::string(f[3]) + "'");
  e.type = *type;
  e.clean_value = output_detail::parse_cell(f[4], line_no, "clean_value");
  e.dirty_value = output_detail::parse_cell(f[5], line_no, "dirty_value");
  return e;
}

inline std::vector<ErrorLogEntry> parse_error_log(std::string_view text) {
  std::vector<ErrorLogEntry> out;
  std::size_t line_no = 0, start = 0;
  while (start < text.size()) {
    ++line_no;
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    out.push_back(parse_log_line(line, line_no));
  }
  return out;
}

inline std::vector<ErrorLogEntry> read_error_log(const std::filesystem::path& path) {
  try {
    return parse_error_log(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(e.line(), path.string() + ": " + e.what());
  }
}

// --- manifest ------------------------------------------------------------------

// FNV-1a over the file bytes, read in chunks.
inline std::uint64_t file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read file: " + path.string());
  std::uint64_t h = kFnvOffset;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h = fnv1a64(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())), h);
  }
  if (in.bad()) throw IoError("read failed: " + path.string());
  return h;
}

struct RunManifest {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::uint64_t base_count = 0;
  std::uint64_t inserted_count = 0;
  std::array<std::uint64_t, kErrorTypeCount> events{};
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, std::uint64_t>> files;  // name -> digest
  double duration_seconds = 0;

  std::string to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = "dirtygen";
    j["version"] = kToolVersion;
    j["config_hash"] = hex64(config_hash);
    j["seed"] = seed;
    j["tuple_count"] = base_count;
    j["inserted_count"] = inserted_count;
    j["dirty_count"] = base_count + inserted_count;
    nlohmann::ordered_json counts = nlohmann::ordered_json::object();
    for (ErrorType t : kAllErrorTypes)
      if (events[static_cast<std::size_t>(t)]) counts[std::string(name_of(t))] = events[static_cast<std::size_t>(t)];
    j["error_counts"] = counts;
    j["warnings"] = warnings;
    nlohmann::ordered_json fs = nlohmann::ordered_json::object();
    for (const auto& [name, digest] : files) fs[name] = hex64(digest);
    j["file_digests"] = fs;
    j["duration_seconds"] = duration_seconds;
    return j.dump(2) + "\n";
  }
};

}  // namespace dirtygen
