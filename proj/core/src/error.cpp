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

#include "protocil/error.hpp"

namespace protocil {

std::string_view to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kUsage:
      return "usage";
    case ErrorCategory::kData:
      return "data";
    case ErrorCategory::kNumeric:
      return "numeric";
  }
  return "unknown";
}

std::string_view to_string(LoadErrorKind kind) {
  switch (kind) {
    case LoadErrorKind::kIo:
      return "io";
    case LoadErrorKind::kBadHeader:
      return "bad-header";
    case LoadErrorKind::kTruncated:
      return "truncated";
    case LoadErrorKind::kDimensionMismatch:
      return "dimension-mismatch";
    case LoadErrorKind::kNonFinite:
      return "non-finite";
    case LoadErrorKind::kEmptyClass:
      return "empty-class";
    case LoadErrorKind::kBadValue:
      return "bad-value";
  }
  return "unknown";
}

}  // namespace protocil
