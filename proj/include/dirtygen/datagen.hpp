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

// Clean (ground-truth) record generation.
//
// Record i is a pure function of (config, seed, i): each cell draws from the
// stream derive_stream(seed, "clean", i, attribute). Unique attributes take
// the value at position perm(i) of their enumerable domain, where perm is a
// seeded Feistel permutation, so values never collide and the first N records
// do not change when N grows.

#pragma once

#include <cstdint>
#include <vector>

#include "dirtygen/domain.hpp"
#include "dirtygen/rng.hpp"
#include "dirtygen/schema.hpp"

namespace dirtygen {

class CleanGenerator {
 public:
  explicit CleanGenerator(const GeneratorConfig& config) : config_(&config) {
    unique_.resize(config.schema.size());
    for (std::size_t i = 0; i < config.schema.size(); ++i) {
      const auto& spec = config.schema[i];
      if (!spec.unique || std::holds_alternative<SequenceDomain>(spec.domain)) continue;
      auto size = enumerable_size(spec);
      if (!size) throw GenerationError("attribute '" + spec.name + "': unique requires an enumerable source");
      unique_[i] = IndexPermutation(*size, stream_key(config.seed, "unique", 0, spec.name));
    }
    determinant_.resize(config.schema.size());
    for (std::size_t i = 0; i < config.schema.size(); ++i) {
      if (const auto& dep = config.schema[i].dependency)
        determinant_[i] = *config.position(config.dependencies[*dep].determinant);
    }
  }

  const GeneratorConfig& config() const { return *config_; }

  Value value_at(std::size_t position, std::uint64_t tuple_index, const std::vector<Value>& row) const {
    const auto& spec = config_->schema[position];
    if (spec.dependency) {
      const DependencyRule& rule = config_->dependencies[*spec.dependency];
      const std::size_t det = determinant_[position];
      const Value* mapped = rule.lookup(row[det]);
      if (!mapped)
        throw GenerationError("dependency " + rule.determinant + " -> " + rule.dependent + " has no entry for " +
                              to_json(row[det]));
      return *mapped;
    }
    if (spec.unique) return unique_value(position, tuple_index);
    RngStream rng = derive_stream(config_->seed, "clean", tuple_index, spec.name);
    return generate_value(spec, rng, tuple_index);
  }

  Record generate(std::uint64_t tuple_index) const {
    const auto& schema = config_->schema;
    std::vector<Value> row(schema.size());
    for (std::size_t pos : config_->generation_order) row[pos] = value_at(pos, tuple_index, row);
    std::vector<Record::Field> fields;
    fields.reserve(schema.size());
    for (std::size_t i = 0; i < schema.size(); ++i) fields.emplace_back(schema[i].name, std::move(row[i]));
    return Record(std::move(fields));
  }

 private:
  Value unique_value(std::size_t position, std::uint64_t tuple_index) const {
    const auto& spec = config_->schema[position];
    Value v;
    if (const auto* seq = std::get_if<SequenceDomain>(&spec.domain)) {
      v = sequence_at(*seq, tuple_index);
    } else {
      const IndexPermutation& perm = unique_[position];
      if (tuple_index >= perm.size())
        throw GenerationError("attribute '" + spec.name + "': unique domain exhausted at tuple " +
                              std::to_string(tuple_index));
      v = domain_at(spec, perm.forward(tuple_index));
    }
    if (!satisfies_constraints(spec, v))
      throw GenerationError("attribute '" + spec.name + "': unique value " + to_json(v) +
                            " violates the declared constraints");
    return v;
  }

  const GeneratorConfig* config_;
  std::vector<IndexPermutation> unique_;
  std::vector<std::size_t> determinant_;
};

inline Record generate_record(const GeneratorConfig& config, std::uint64_t tuple_index) {
  return CleanGenerator(config).generate(tuple_index);
}

// Calls sink(record) for tuple indices 0..N-1 in order.
template <typename Sink>
void generate_clean_dataset(const GeneratorConfig& config, Sink&& sink) {
  CleanGenerator gen(config);
  for (std::uint64_t i = 0; i < config.tuple_count; ++i) sink(gen.generate(i));
}

inline std::vector<Record> generate_clean_records(const GeneratorConfig& config) {
  std::vector<Record> out;
  out.reserve(config.tuple_count);
  generate_clean_dataset(config, [&](Record r) { out.push_back(std::move(r)); });
  return out;
}

}  // namespace dirtygen
