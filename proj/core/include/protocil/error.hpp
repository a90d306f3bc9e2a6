// Copyright 2026 The protocil Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
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

namespace protocil {

// Every failure surfaced by the library maps onto one of these. The CLI turns
// them into exit codes (usage=2, data=3, numeric=4).
enum class ErrorCategory { kUsage, kData, kNumeric };

std::string_view to_string(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

// Invalid configuration or arguments: negative lambda, indivisible class
// counts, label out of range for a classifier, and so on.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorCategory::kUsage, message) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& message)
      : Error(ErrorCategory::kData, message) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& message)
      : Error(ErrorCategory::kNumeric, message) {}
};

enum class LoadErrorKind {
  kIo,
  kBadHeader,
  kTruncated,
  kDimensionMismatch,
  kNonFinite,
  kEmptyClass,
  kBadValue,
};

std::string_view to_string(LoadErrorKind kind);

// Raised by the feature-file readers. `location` is a byte offset for FEATSET
// files and a 1-based line number for CSV files.
class LoadError : public DataError {
 public:
  LoadError(LoadErrorKind kind, std::uint64_t location, const std::string& message)
      : DataError(message), kind_(kind), location_(location) {}

  LoadErrorKind kind() const noexcept { return kind_; }
  std::uint64_t location() const noexcept { return location_; }

 private:
  LoadErrorKind kind_;
  std::uint64_t location_;
};

}  // namespace protocil
