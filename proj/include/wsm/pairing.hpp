// wsm/pairing.hpp

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

#ifndef WSM_PAIRING_HPP
#define WSM_PAIRING_HPP

#include <unordered_map>
#include <utility>
#include <vector>

#include "wsm/corpus.hpp"
#include "wsm/prep.hpp"
#include "wsm/rng.hpp"
#include "wsm/types.hpp"

namespace wsm {

/// Monotone alignment between two sequences: starts at (0,0), ends at
/// (Ta-1, Tb-1), consecutive steps in {(1,0), (0,1), (1,1)}.
using AlignmentPath = std::vector<std::pair<Index, Index>>;

struct DtwResult {
  AlignmentPath path;
  double total_cost = 0.0;
};

/// Minimum-total-cost monotone path over a precomputed frame cost matrix.
/// Ties break toward the diagonal step, then (1,0), then (0,1).
DtwResult dtw_align_cost(const Matrix& cost);

/// DTW with frame cost = cosine distance between rows of a and b.
DtwResult dtw_align(const Matrix& a, const Matrix& b);
DtwResult dtw_align(const FeatureSeq& a, const FeatureSeq& b);

/// Straight-line alignment: with L = max(len_a, len_b), step t pairs
/// (round(t*(len_a-1)/(L-1)), round(t*(len_b-1)/(L-1))), round half up.
AlignmentPath diagonal_align(Index len_a, Index len_b);

double path_cost(const Matrix& cost, const AlignmentPath& path);

struct WordPair {
  WordToken a;
  WordToken b;
  bool same = false;
};

struct PairingConstraints {};  // reserved

struct SampledPairs {
  std::vector<WordPair> pairs;
  std::size_t missing_same = 0;  // requested beyond what exists
  std::size_t missing_diff = 0;
};

/// Uniform same/different word-pair sampling without replacement within each
/// category; deterministic given the generator state.
SampledPairs sample_word_pairs(const std::vector<WordToken>& tokens,
                               std::size_t n_same, std::size_t n_diff,
                               Rng& rng,
                               const PairingConstraints& constraints = {});

enum class TrainMode { Raw, MonoA, MonoV, MonoAV, Multi };

const char* train_mode_name(TrainMode mode);
TrainMode train_mode_from_name(const std::string& name);

struct ModalityCombo {
  ModalityMask branch1;
  ModalityMask branch2;
};

/// Mono modes return their fixed mask on both branches; multi draws one of
/// {(AV,AV), (A,A), (V,V), (A,V)} with probability 1/4 each.
ModalityCombo draw_combo(TrainMode mode, Rng& rng,
                         const std::string& audio_name = "audio",
                         const std::string& visual_name = "visual");

/// Resolve a test-mask spec ("a", "v", "av") against the corpus modalities:
/// by name when the corpus uses audio/visual, by declaration order otherwise.
ModalityMask mask_from_spec(const std::vector<ModalityInfo>& modalities,
                            const std::string& spec);

struct PairExample {
  Vector x1;
  Vector x2;
  int label = 0;  // 1 = same word
};

/// Realizes aligned frame-stack pairs; caches per-utterance preprocessed
/// sequences, so keep one realizer per (corpus, prep) pair. Not thread-safe.
class PairRealizer {
 public:
  PairRealizer(const Corpus& corpus, const Preprocessor& prep);

  /// Same-word pairs align by DTW over the reference modality's preprocessed
  /// frames; different-word pairs along the diagonal. One example per path
  /// step; inputs are stacked full-layout vectors with the combo's masks
  /// applied after stacking.
  std::vector<PairExample> realize(const WordPair& pair,
                                   const ModalityCombo& combo) const;

  const Preprocessor& prep() const { return prep_; }
  const Corpus& corpus() const { return corpus_; }

 private:
  const Matrix& concat(std::size_t utterance_index) const;
  const Matrix& reference(std::size_t utterance_index) const;

  const Corpus& corpus_;
  const Preprocessor& prep_;
  ModalityLayout stacked_layout_;
  mutable std::unordered_map<std::size_t, Matrix> concat_cache_;
  mutable std::unordered_map<std::size_t, Matrix> reference_cache_;
};

std::vector<PairExample> realize_pair(const WordPair& pair,
                                      const Corpus& corpus,
                                      const ModalityCombo& combo,
                                      const Preprocessor& prep);

struct PairStreamConfig {
  std::size_t pairs_per_epoch = 144;  // split evenly between same/different
  TrainMode mode = TrainMode::MonoAV;
  double heldout_label_fraction = 0.1;
  std::size_t heldout_pairs = 60;
  std::uint64_t seed = 0;
};

/// Deterministic per-epoch stream of realized training examples plus a fixed
/// held-out set drawn from a label-disjoint 10% of word types.
class PairStream {
 public:
  PairStream(const Corpus& corpus, const Preprocessor& prep,
             const PairStreamConfig& config);

  std::vector<PairExample> epoch_examples(std::size_t epoch) const;
  const std::vector<PairExample>& heldout_examples() const { return heldout_; }
  std::size_t training_labels() const { return train_tokens_by_label_.size(); }
  std::size_t heldout_labels() const { return heldout_label_count_; }

 private:
  std::vector<PairExample> realize_sample(const std::vector<WordToken>& tokens,
                                          std::size_t n_pairs, Rng& rng) const;

  PairRealizer realizer_;
  PairStreamConfig config_;
  std::vector<WordToken> train_tokens_;
  std::map<std::string, std::vector<std::size_t>> train_tokens_by_label_;
  std::size_t heldout_label_count_ = 0;
  std::vector<PairExample> heldout_;
};

}  // namespace wsm

#endif  // WSM_PAIRING_HPP
