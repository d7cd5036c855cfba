// wsm/types.hpp

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

#ifndef WSM_TYPES_HPP
#define WSM_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wsm/error.hpp"

namespace wsm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Annotation frames are stored at this rate regardless of the native rate of
/// any feature stream.
inline constexpr double kCanonicalFps = 100.0;

/// A time-major feature stream: row t is the feature vector of frame t.
struct FeatureSeq {
  Matrix data;  // T x D
  double fps = kCanonicalFps;

  Index frames() const { return data.rows(); }
  Index dim() const { return data.cols(); }

  void check_valid() const {
    if (data.rows() < 1 || data.cols() < 1)
      fail(ErrorCode::InvalidArgument, "feature sequence must be at least 1x1");
    if (!data.allFinite())
      fail(ErrorCode::InvalidArgument, "feature sequence has non-finite values");
  }
};

struct ModalityInfo {
  std::string name;
  int dim = 0;
  double fps = kCanonicalFps;
};

/// Ordered block structure of a concatenated feature vector.
struct ModalityLayout {
  std::vector<std::pair<std::string, int>> blocks;  // (modality name, width)

  int total_dim() const {
    int total = 0;
    for (const auto& [name, width] : blocks) total += width;
    return total;
  }

  bool has(const std::string& name) const {
    for (const auto& [block_name, width] : blocks)
      if (block_name == name) return true;
    return false;
  }

  /// Layout of `times` consecutive copies, as produced by frame stacking.
  ModalityLayout repeated(int times) const {
    ModalityLayout out;
    out.blocks.reserve(blocks.size() * static_cast<std::size_t>(times));
    for (int t = 0; t < times; ++t)
      out.blocks.insert(out.blocks.end(), blocks.begin(), blocks.end());
    return out;
  }
};

/// Which modalities survive a knockout; everything else is zeroed.
struct ModalityMask {
  std::set<std::string> kept;

  bool keeps(const std::string& name) const { return kept.count(name) > 0; }

  static ModalityMask keeping(std::initializer_list<std::string> names) {
    ModalityMask mask;
    mask.kept.insert(names.begin(), names.end());
    return mask;
  }

  static ModalityMask all(const ModalityLayout& layout) {
    ModalityMask mask;
    for (const auto& [name, width] : layout.blocks) mask.kept.insert(name);
    return mask;
  }

  bool operator==(const ModalityMask& other) const = default;
};

/// One labelled annotation span, frames at the canonical rate, [start, end).
struct Segment {
  std::string label;
  std::int64_t start_frame = 0;
  std::int64_t end_frame = 0;

  std::int64_t length() const { return end_frame - start_frame; }
};

}  // namespace wsm

#endif  // WSM_TYPES_HPP
