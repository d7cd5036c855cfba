// wsm/error.hpp

// Copyright 2026  The wsm authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef WSM_ERROR_HPP
#define WSM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace wsm {

enum class ErrorCode {
  MissingFile,
  MalformedManifest,
  DimensionMismatch,
  LengthMismatch,
  LayoutMismatch,
  RankDeficient,
  NoSamePairsAvailable,
  MissingEmbedding,
  MissingPhone,
  NoHeldOutTokens,
  InsufficientVectors,
  ConfigInfeasible,
  DivergedLoss,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

/// True for failures of the numerics rather than of the input data
/// (distinct process exit code in the CLI).
bool is_numeric_failure(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace wsm

#endif  // WSM_ERROR_HPP
