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

// dirtygen: generate | validate | evaluate

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "dirtygen/config.hpp"
#include "dirtygen/errorplan.hpp"
#include "dirtygen/evalkit.hpp"
#include "dirtygen/output.hpp"
#include "dirtygen/pipeline.hpp"

namespace {

using namespace dirtygen;

constexpr int kExitConfig = 1;
constexpr int kExitGeneration = 2;
constexpr int kExitShape = 2;
constexpr int kExitIo = 3;

GeneratorConfig load(const std::string& path, std::optional<std::uint64_t> seed) {
  ParseOptions options;
  options.seed_override = seed;
  return load_config(path, options);
}

int cmd_generate(const std::string& config_path, std::optional<std::uint64_t> seed, std::string out,
                 bool emit_plan) {
  try {
    GeneratorConfig config = load(config_path, seed);
    if (out.empty()) out = config.output.directory.empty() ? "out" : config.output.directory;
    RunManifest m = generate_files(config, out, {emit_plan});
    std::printf("wrote %s: %llu clean tuples, %llu dirty tuples (seed %llu)\n", out.c_str(),
                static_cast<unsigned long long>(m.base_count),
                static_cast<unsigned long long>(m.base_count + m.inserted_count),
                static_cast<unsigned long long>(m.seed));
    std::printf("%-40s %10s\n", "error_type", "count");
    for (ErrorType t : kAllErrorTypes) {
      const auto n = m.events[static_cast<std::size_t>(t)];
      bool configured = false;
      for (const auto& e : config.errors) configured |= e.type == t;
      if (configured) std::printf("%-40s %10llu\n", std::string(name_of(t)).c_str(), static_cast<unsigned long long>(n));
    }
    for (const auto& w : m.warnings) std::printf("warning: %s\n", w.c_str());
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "generation error: " << e.what() << "\n";
    return kExitGeneration;
  }
}

int cmd_validate(const std::string& config_path) {
  try {
    GeneratorConfig config = load(config_path, std::nullopt);
    ErrorPlan plan(config);
    std::printf("config ok: %zu attributes, %llu tuples, seed %llu\n", config.schema.size(),
                static_cast<unsigned long long>(config.tuple_count), static_cast<unsigned long long>(config.seed));
    std::printf("%-5s %-38s %-24s %12s %10s\n", "spec", "error_type", "attributes", "population", "target");
    for (std::size_t i = 0; i < config.errors.size(); ++i) {
      const auto& s = plan.spec_plan(i);
      std::string targets = join_names(config.errors[i].targets);
      if (targets.empty()) targets = "-";
      std::printf("%-5zu %-38s %-24s %12llu %10llu\n", i, std::string(name_of(s.type)).c_str(), targets.c_str(),
                  static_cast<unsigned long long>(s.population), static_cast<unsigned long long>(s.target));
    }
    for (const auto& w : plan.warnings()) std::printf("warning: %s\n", w.c_str());
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

int cmd_evaluate(const std::string& clean, const std::string& dirty, const std::string& repaired,
                 const std::string& log, const std::string& report) {
  try {
    RepairMetrics m = score(read_dataset(clean), read_rows(dirty), read_rows(repaired), read_error_log(log));
    const std::string json = report_json(m);
    if (!report.empty()) {
      OutputFile f(report);
      f.write(json);
      f.close();
    }
    const auto& o = m.overall;
    std::printf("%-12s %9s %9s %9s\n", "", "precision", "recall", "f1");
    std::printf("%-12s %9.4f %9.4f %9.4f\n", "detection", o.detection_precision, o.detection_recall, o.detection_f1);
    std::printf("%-12s %9.4f %9.4f %9.4f\n", "repair", o.repair_precision, o.repair_recall, o.repair_f1);
    std::printf("units %llu, errors %llu, flagged %llu, tp %llu, fp %llu, fn %llu\n",
                static_cast<unsigned long long>(m.units), static_cast<unsigned long long>(o.errors),
                static_cast<unsigned long long>(o.flagged), static_cast<unsigned long long>(o.true_positives),
                static_cast<unsigned long long>(o.false_positives), static_cast<unsigned long long>(o.false_negatives));
    return 0;
  } catch (const ShapeMismatch& e) {
    std::cerr << "shape mismatch: " << e.what() << "\n";
    return kExitShape;
  } catch (const std::exception& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic dirty-data generator with ground truth and an error log"};
  app.require_subcommand(1);

  std::string config_path, out;
  std::optional<std::uint64_t> seed;
  bool emit_plan = false;
  auto* gen = app.add_subcommand("generate", "generate clean and dirty data, error log and manifest");
  gen->add_option("--config", config_path, "configuration file")->required();
  gen->add_option("--seed", seed, "seed, overrides the configuration");
  gen->add_option("--out", out, "output directory (default: output.directory or ./out)");
  gen->add_flag("--emit-plan", emit_plan, "also write plan.txt");

  std::string validate_path;
  auto* val = app.add_subcommand("validate", "check a configuration and print planned error counts");
  val->add_option("--config", validate_path, "configuration file")->required();

  std::string clean, dirty, repaired, log, report;
  auto* ev = app.add_subcommand("evaluate", "score a repaired dataset");
  ev->add_option("--clean", clean, "clean dataset")->required();
  ev->add_option("--dirty", dirty, "dirty dataset")->required();
  ev->add_option("--repaired", repaired, "repaired dataset (null line = deleted row)")->required();
  ev->add_option("--log", log, "error log")->required();
  ev->add_option("--report", report, "JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  if (*gen) return cmd_generate(config_path, seed, out, emit_plan);
  if (*val) return cmd_validate(validate_path);
  return cmd_evaluate(clean, dirty, repaired, log, report);
}
