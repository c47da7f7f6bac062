// Copyright 2026 The UAE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uae {

using TokenId = std::uint32_t;
using TokenSeq = std::vector<TokenId>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: malformed files, dangling references, bad configs.
/// The CLI maps these to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IngestError : public ValidationError {
 public:
  IngestError(const std::string& what, std::size_t line = 0)
      : ValidationError(line == 0 ? what
                                  : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ReferentialError : public IngestError {
 public:
  ReferentialError(const std::string& what, std::string missing_id,
                   std::size_t line = 0)
      : IngestError(what, line), missing_id_(std::move(missing_id)) {}
  const std::string& missing_id() const { return missing_id_; }

 private:
  std::string missing_id_;
};

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A stage was asked to run before its inputs exist.
class MissingInputError : public ValidationError {
 public:
  explicit MissingInputError(const std::string& path)
      : ValidationError("missing input file: " + path), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Corrupt, truncated or version-mismatched binary artifacts.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Non-finite losses and similar numerical failures during training.
class TrainingError : public Error {
 public:
  using Error::Error;
};

/// 64-bit FNV-1a. Stable across platforms; used for per-pair RNG streams.
constexpr std::uint64_t fnv1a64(std::string_view s,
                                std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent seed for a named pipeline stage from the global seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage) {
  return splitmix64(seed ^ fnv1a64(stage));
}

}  // namespace uae
