// wsm/abx.hpp

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

#ifndef WSM_ABX_HPP
#define WSM_ABX_HPP

#include <unordered_map>
#include <vector>

#include "wsm/corpus.hpp"
#include "wsm/embedding.hpp"
#include "wsm/rng.hpp"
#include "wsm/types.hpp"

namespace wsm {

enum class AbxTask { WithinSpeaker, AcrossSpeaker };

const char* abx_task_name(AbxTask task);
AbxTask abx_task_from_name(const std::string& name);

/// Sequence divergence: the smallest mean frame cosine distance over all
/// monotone paths (steps {(1,0),(0,1),(1,1)}, mean over path nodes).
/// Symmetric, and exactly 0 for identical sequences.
double divergence(const Matrix& x, const Matrix& y);
double divergence_cost(const Matrix& cost);

/// A, B and X index into the token list; X belongs to A's category.
struct AbxTriplet {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t x = 0;
  std::string phone_a;  // center phone of the A/X category
  std::string phone_b;
  AbxTask task = AbxTask::WithinSpeaker;
};

/// Enumerate triplets for every ordered contrast and shared context under the
/// task's speaker constraints; cells larger than `budget_per_cell` are
/// subsampled uniformly. Deterministic given the generator state.
struct TripletSet {
  std::vector<AbxTriplet> triplets;
  std::size_t empty_cells = 0;
  std::size_t subsampled_cells = 0;
};

TripletSet build_triplets(const std::vector<TriphoneToken>& tokens,
                          const PhoneInventory& inventory, AbxTask task,
                          std::size_t budget_per_cell, Rng& rng);

/// Memoized pairwise divergences between token embedding spans.
class DivergenceCache {
 public:
  DivergenceCache(const std::vector<TriphoneToken>& tokens,
                  const EmbeddingArchive& archive);

  double between(std::size_t i, std::size_t j);

 private:
  const std::vector<TriphoneToken>& tokens_;
  const EmbeddingArchive& archive_;
  std::unordered_map<std::uint64_t, double> cache_;
};

/// 1 if D(A,X) < D(B,X), 0 if greater, 0.5 on an exact tie.
double score_triplet(const AbxTriplet& triplet,
                     const std::vector<TriphoneToken>& tokens,
                     const EmbeddingArchive& archive);
double score_triplet(const AbxTriplet& triplet, DivergenceCache& cache);

struct AbxReport {
  AbxTask task = AbxTask::WithinSpeaker;
  double overall_error = 0.0;
  std::size_t triplet_count = 0;
  std::size_t empty_cells = 0;

  struct ContrastStat {
    std::string phone_a;  // lexicographically smaller
    std::string phone_b;
    double accuracy = 0.0;
    std::size_t count = 0;
  };
  std::vector<ContrastStat> per_contrast;

  struct FeatureStat {
    std::string feature;
    double accuracy = 0.0;
    std::size_t count = 0;
  };
  std::vector<FeatureStat> per_feature;

  Json to_json() const;
  static AbxReport from_json(const Json& doc);
};

/// Flat mean over triplets; per-contrast and per-feature accuracies are means
/// over the triplets whose unordered contrast matches.
AbxReport abx_report(const TripletSet& triplets,
                     const std::vector<TriphoneToken>& tokens,
                     const EmbeddingArchive& archive,
                     const PhoneInventory& inventory);

}  // namespace wsm

#endif  // WSM_ABX_HPP
