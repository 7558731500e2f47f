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

#include <stdexcept>
#include <string>

namespace dirtygen {

// Base of every error thrown by the library. The CLI maps the concrete
// subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration document or lexicon (exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The combined error specs cannot be placed without collisions.
class PlanInfeasible : public ConfigError {
 public:
  PlanInfeasible(std::size_t spec_index, const std::string& message)
      : ConfigError(message), spec_index_(spec_index) {}
  std::size_t spec_index() const { return spec_index_; }

 private:
  std::size_t spec_index_;
};

// Data could not be produced from a valid config (exit code 2).
class GenerationError : public Error {
 public:
  using Error::Error;
};

// File system failure (exit code 3).
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed dataset or error-log input. Carries the 1-based line number.
class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Evaluation inputs do not line up (record counts or attribute sets).
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace dirtygen
