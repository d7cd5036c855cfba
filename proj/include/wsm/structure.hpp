// wsm/structure.hpp

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

#ifndef WSM_STRUCTURE_HPP
#define WSM_STRUCTURE_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "wsm/corpus.hpp"
#include "wsm/embedding.hpp"
#include "wsm/network.hpp"
#include "wsm/prep.hpp"
#include "wsm/rng.hpp"
#include "wsm/types.hpp"

namespace wsm {

struct PhoneCentroids {
  std::map<std::string, Vector> centroids;
  std::vector<std::string> missing;  // inventory phones with no tokens
};

/// Token-balanced phone representatives: mean of frame embeddings per token,
/// then unweighted mean over tokens.
PhoneCentroids phone_centroids(const EmbeddingArchive& archive,
                               const Corpus& corpus);

/// Ordered per-feature difference vectors: for each pair (negative, positive)
/// the vector is centroid(positive) - centroid(negative). Pairs with a
/// missing centroid are skipped; zero vectors are kept (the parallelism score
/// excludes them later).
using FeatureVectorSets =
    std::vector<std::pair<std::string, std::vector<Vector>>>;

FeatureVectorSets feature_difference_vectors(const PhoneCentroids& centroids,
                                             const PhoneInventory& inventory);

struct ParallelismReport {
  struct FeatureScore {
    std::string feature;
    double score = 0.0;
    std::size_t vectors = 0;
    std::size_t zero_excluded = 0;
  };
  std::vector<FeatureScore> features;
  std::vector<std::string> excluded;  // features with < 2 usable vectors

  Json to_json() const;
};

/// Rank statistic per feature: over all (same-feature cosine, cross-feature
/// cosine) pairs, the fraction where the same-feature cosine is higher (ties
/// count 0.5). 1 = relatively parallel, 0 = relatively orthogonal or
/// anti-collinear, 0.5 = indistinguishable from cross-feature structure.
ParallelismReport parallelism_score(const FeatureVectorSets& vectors);

struct McGurkConfig {
  std::string audio_phone = "b";
  std::string competitor_phone = "d";
  std::vector<std::string> visual_variants = {"b", "p", "g"};
  std::set<std::string> held_out_speakers;  // template source, never tested
  std::size_t budget_per_cell = 1000;
};

struct McGurkReport {
  std::string audio_phone;
  std::string competitor_phone;
  struct VariantResult {
    std::string variant;
    double accuracy = 0.0;
    std::size_t triplets = 0;
  };
  std::vector<VariantResult> variants;

  Json to_json() const;
};

/// Speaker-generic visual exemplar of a phone: every held-out token's
/// preprocessed visual sequence is cubic-resampled to target_len and the
/// template is the elementwise mean.
FeatureSeq generic_visual_template(const Corpus& corpus,
                                   const std::string& phone,
                                   const std::set<std::string>& held_out,
                                   Index target_len, const Preprocessor& prep);

/// Embed one audio/visual stimulus through the training input path:
/// concatenate per-modality preprocessed frames, stack, forward.
Matrix embed_stimulus(const Network& net, const Preprocessor& prep,
                      const Matrix& audio, const Matrix& visual);

/// ABX discrimination between audio-phone tokens whose visual stream is
/// replaced by a generic held-out template of each variant, and unmodified
/// competitor tokens. Within-speaker triplets where possible.
McGurkReport mcgurk_eval(const Network& net, const Corpus& corpus,
                         const McGurkConfig& config, const Preprocessor& prep,
                         Rng& rng);

}  // namespace wsm

#endif  // WSM_STRUCTURE_HPP
