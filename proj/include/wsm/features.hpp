// wsm/features.hpp

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

#ifndef WSM_FEATURES_HPP
#define WSM_FEATURES_HPP

#include <filesystem>

#include "wsm/types.hpp"

namespace wsm {

/// PCA whitener: y = projection * (x - mean). Row k of `projection` is the
/// k-th principal axis scaled by the inverse square root of its eigenvalue,
/// eigenvalues in decreasing order. Covariance uses the 1/N convention, so
/// the projected fitting set has population variance exactly 1 per component.
struct PcaModel {
  Vector mean;
  Matrix projection;   // K x D
  Vector eigenvalues;  // K, decreasing

  int input_dim() const { return static_cast<int>(projection.cols()); }
  int output_dim() const { return static_cast<int>(projection.rows()); }
};

/// Per-dimension mean and standard deviation (1/N convention), std floored
/// at 1e-8 so constant dimensions stay usable.
struct Moments {
  Vector mean;
  Vector std;
};

inline constexpr double kStdFloor = 1e-8;
inline constexpr double kEigenvalueFloor = 1e-10;

/// Integer-factor upsampling by frame repetition; fps scales by the factor.
FeatureSeq repeat_upsample(const FeatureSeq& seq, int factor);

/// Natural cubic spline resampling per dimension over frame indices mapped to
/// [0, 1], sampled at `target_len` uniformly spaced points; the first and
/// last input frames are preserved bit-exactly. Length-1 input replicates.
FeatureSeq cubic_resample(const FeatureSeq& seq, Index target_len);

PcaModel fit_pca_whitener(const Matrix& frames, int out_dim);
FeatureSeq apply_pca(const PcaModel& model, const FeatureSeq& seq);
Matrix apply_pca(const PcaModel& model, const Matrix& frames);

Moments compute_moments(const Matrix& frames);
FeatureSeq apply_moments(const Moments& moments, const FeatureSeq& seq);
Matrix apply_moments(const Moments& moments, const Matrix& frames);

/// Window must be odd. Output frame t is the concatenation of input frames
/// t-w/2 .. t+w/2 with out-of-range indices clamped to the sequence edges;
/// length is preserved and the output dimension is window * D.
FeatureSeq stack_frames(const FeatureSeq& seq, int window);

/// Concatenate along the feature axis; `a` comes first. Lengths and frame
/// rates must match.
FeatureSeq concat_modalities(const FeatureSeq& a, const FeatureSeq& b);

/// Zero every layout block whose modality the mask drops.
FeatureSeq knockout(const FeatureSeq& seq, const ModalityMask& mask,
                    const ModalityLayout& layout);
Matrix knockout(const Matrix& frames, const ModalityMask& mask,
                const ModalityLayout& layout);

// WSMF serialization with a one-line JSON sidecar (same path + ".json").
void save_pca(const std::filesystem::path& path, const PcaModel& model);
PcaModel load_pca(const std::filesystem::path& path);
void save_moments(const std::filesystem::path& path, const Moments& moments);
Moments load_moments(const std::filesystem::path& path);

}  // namespace wsm

#endif  // WSM_FEATURES_HPP
