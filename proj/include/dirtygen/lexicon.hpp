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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "dirtygen/errors.hpp"
#include "dirtygen/text.hpp"

#ifndef DIRTYGEN_DEFAULT_LEXICON_DIR
#define DIRTYGEN_DEFAULT_LEXICON_DIR "lexicons"
#endif

namespace dirtygen {

inline constexpr std::array<std::string_view, 5> kBundledLexicons = {
    "first_names", "last_names", "cities", "streets", "words"};

inline constexpr const char* kLexiconDirEnv = "DIRTYGEN_LEXICON_DIR";

// Directory holding the bundled lexicons; the environment variable wins over
// the compiled-in default.
inline std::filesystem::path bundled_lexicon_dir() {
  if (const char* env = std::getenv(kLexiconDirEnv); env && *env) return env;
  return DIRTYGEN_DEFAULT_LEXICON_DIR;
}

inline bool is_bundled_lexicon(std::string_view name) {
  for (auto b : kBundledLexicons)
    if (b == name) return true;
  return false;
}

// Splits lexicon text into trimmed, non-empty, first-occurrence-unique lines.
inline std::vector<std::string> parse_lexicon(std::string_view text, const std::string& origin) {
  if (!is_valid_utf8(text)) throw ConfigError("lexicon is not valid UTF-8: " + origin);
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line = trim(text.substr(start, end - start));
    if (!line.empty() && seen.insert(line).second) out.push_back(std::move(line));
    start = end + 1;
  }
  if (out.empty()) throw ConfigError("empty lexicon: " + origin);
  return out;
}

// Resolves a bundled lexicon name or a file path. Relative paths are taken
// against `base_dir`.
inline std::vector<std::string> load_lexicon(std::string_view name_or_path,
                                             const std::filesystem::path& base_dir = {}) {
  std::filesystem::path path;
  if (is_bundled_lexicon(name_or_path)) {
    path = bundled_lexicon_dir() / (std::string(name_or_path) + ".txt");
  } else {
    path = std::filesystem::path(std::string(name_or_path));
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("missing lexicon file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw ConfigError("unreadable lexicon file: " + path.string());
  return parse_lexicon(buf.str(), path.string());
}

}  // namespace dirtygen
