// wsm/error.cpp

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

#include "wsm/error.hpp"

namespace wsm {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile:
      return "MissingFile";
    case ErrorCode::MalformedManifest:
      return "MalformedManifest";
    case ErrorCode::DimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::LengthMismatch:
      return "LengthMismatch";
    case ErrorCode::LayoutMismatch:
      return "LayoutMismatch";
    case ErrorCode::RankDeficient:
      return "RankDeficient";
    case ErrorCode::NoSamePairsAvailable:
      return "NoSamePairsAvailable";
    case ErrorCode::MissingEmbedding:
      return "MissingEmbedding";
    case ErrorCode::MissingPhone:
      return "MissingPhone";
    case ErrorCode::NoHeldOutTokens:
      return "NoHeldOutTokens";
    case ErrorCode::InsufficientVectors:
      return "InsufficientVectors";
    case ErrorCode::ConfigInfeasible:
      return "ConfigInfeasible";
    case ErrorCode::DivergedLoss:
      return "DivergedLoss";
    case ErrorCode::InvalidArgument:
      return "InvalidArgument";
  }
  return "UnknownError";
}

bool is_numeric_failure(ErrorCode code) {
  return code == ErrorCode::DivergedLoss || code == ErrorCode::RankDeficient;
}

}  // namespace wsm
