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

#include <chrono>
#include <filesystem>
#include <string>

#include "dirtygen/errorplan.hpp"
#include "dirtygen/inject.hpp"
#include "dirtygen/output.hpp"

namespace dirtygen {

inline std::string plan_line(const GeneratorConfig& config, const PlanEntry& e) {
  static constexpr const char* kScope[] = {"cell", "row", "column", "insertion"};
  std::string out = std::string(name_of(e.type)) + "\tspec=" + std::to_string(e.spec_index) + "\t" +
                    kScope[static_cast<int>(e.scope)] + "\ttuple=" + std::to_string(e.tuple_index) + "\tattribute=" +
                    (e.attribute.empty() ? "-" : e.attribute);
  if (e.source) out += "\tsource=" + std::to_string(*e.source);
  if (e.donor) out += "\tdonor=" + std::to_string(*e.donor);
  (void)config;
  return out + "\n";
}

struct GenerateOptions {
  bool emit_plan = false;
};

// Writes clean, dirty, errors.log and run-manifest.json into `dir`.
inline RunManifest generate_files(const GeneratorConfig& config, const std::filesystem::path& dir,
                                  const GenerateOptions& options = {}) {
  const auto started = std::chrono::steady_clock::now();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  ErrorPlan plan(config);
  if (options.emit_plan) {
    OutputFile f(dir / "plan.txt");
    for (const auto& e : plan.entries()) f.write(plan_line(config, e));
    f.close();
  }

  const OutputMode mode = config.output.mode;
  const std::size_t shards = config.scaling.shard_count;
  ShardedWriter clean(dir, "clean", mode, shards, config.tuple_count);
  ShardedWriter dirty(dir, "dirty", mode, shards, config.tuple_count);
  LogWriter log(dir / "errors.log", config.seed, config.config_hash);
  RunStats stats = apply_plan(
      plan, [&](std::uint64_t i, const Record& r) { clean.write(i, r); },
      [&](std::uint64_t i, const Record& r) { dirty.write(i, r); }, [&](const ErrorLogEntry& e) { log.write(e); });
  clean.close();
  dirty.close();
  log.close();

  RunManifest m;
  m.config_hash = config.config_hash;
  m.seed = config.seed;
  m.base_count = stats.base_count;
  m.inserted_count = stats.inserted_count;
  m.events = stats.events;
  m.warnings = stats.warnings;
  std::vector<std::filesystem::path> files = clean.paths(dir, "clean", mode);
  for (auto& p : dirty.paths(dir, "dirty", mode)) files.push_back(p);
  files.push_back(dir / "errors.log");
  for (const auto& p : files) m.files.emplace_back(p.filename().string(), file_digest(p));
  m.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  OutputFile f(dir / "run-manifest.json");
  f.write(m.to_json());
  f.close();
  return m;
}

}  // namespace dirtygen
