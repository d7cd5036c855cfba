// wsm/prep.hpp

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

#ifndef WSM_PREP_HPP
#define WSM_PREP_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wsm/corpus.hpp"
#include "wsm/features.hpp"
#include "wsm/types.hpp"

namespace wsm {

struct PrepConfig {
  int stack_window = 7;
  /// Modalities to whiten, name -> output dimension. Others pass through to
  /// mean-variance normalization directly.
  std::map<std::string, int> pca_dims;
};

struct ModalityPrep {
  std::string name;
  double source_fps = kCanonicalFps;
  std::optional<PcaModel> pca;
  Moments moments;
  int out_dim = 0;
};

/// Deterministic per-modality pipeline fitted on a training corpus:
/// rate conversion to the canonical 100 fps, optional PCA whitening, then
/// mean-variance normalization, with frame stacking on the concatenation.
/// Immutable once fitted; safe to share across threads.
class Preprocessor {
 public:
  static Preprocessor fit(const Corpus& train, const PrepConfig& config);

  /// Convert one modality stream to the canonical frame rate: frame
  /// repetition when the rate divides evenly, cubic resampling otherwise.
  static FeatureSeq to_canonical_rate(const FeatureSeq& seq);

  FeatureSeq preprocess_modality(const UtteranceRecord& utt,
                                 const std::string& modality) const;

  /// All modalities preprocessed and concatenated in corpus order.
  FeatureSeq concat_preprocessed(const UtteranceRecord& utt) const;

  /// concat_preprocessed followed by frame stacking.
  FeatureSeq stacked(const UtteranceRecord& utt) const;

  const ModalityLayout& layout() const { return layout_; }
  ModalityLayout stacked_layout() const {
    return layout_.repeated(stack_window_);
  }
  int stack_window() const { return stack_window_; }
  const std::vector<ModalityPrep>& modalities() const { return modalities_; }
  const ModalityPrep* find(const std::string& name) const;

  /// Name of the modality used as the alignment reference: "audio" when
  /// present, otherwise the first modality.
  const std::string& reference_modality() const { return reference_; }

  void save(const std::filesystem::path& dir) const;
  static Preprocessor load(const std::filesystem::path& dir);

 private:
  std::vector<ModalityPrep> modalities_;
  ModalityLayout layout_;
  std::string reference_;
  int stack_window_ = 7;
};

}  // namespace wsm

#endif  // WSM_PREP_HPP
