// wsm/abx.cpp

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

#include "wsm/abx.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "wsm/distance.hpp"
#include "wsm/error.hpp"

namespace wsm {

const char* abx_task_name(AbxTask task) {
  return task == AbxTask::WithinSpeaker ? "within" : "across";
}

AbxTask abx_task_from_name(const std::string& name) {
  if (name == "within") return AbxTask::WithinSpeaker;
  if (name == "across") return AbxTask::AcrossSpeaker;
  fail(ErrorCode::InvalidArgument, "unknown ABX task `" + name + "`");
}

double divergence_cost(const Matrix& cost) {
  const Index ta = cost.rows();
  const Index tb = cost.cols();
  if (ta < 1 || tb < 1)
    fail(ErrorCode::InvalidArgument, "divergence needs non-empty sequences");

  // Minimum mean is not the minimum total divided by its length: a longer
  // path can have a smaller mean. Run the DP layered by node count k and
  // minimize cost/k at the terminal over all k.
  const double inf = std::numeric_limits<double>::infinity();
  const Index max_nodes = ta + tb - 1;
  Matrix prev = Matrix::Constant(ta, tb, inf);
  Matrix cur = Matrix::Constant(ta, tb, inf);
  prev(0, 0) = cost(0, 0);

  double best = prev(ta - 1, tb - 1) / 1.0;  // k = 1 is terminal only if 1x1
  if (!(ta == 1 && tb == 1)) best = inf;

  for (Index k = 2; k <= max_nodes; ++k) {
    cur.setConstant(inf);
    // With k nodes, a cell (i,j) is reachable iff max(i,j)+1 <= k <= i+j+1.
    const Index nodes_before = k - 2;  // i+j of predecessors
    for (Index i = std::max<Index>(0, nodes_before + 1 - (tb - 1));
         i < ta; ++i) {
      for (Index j = std::max<Index>(0, nodes_before + 1 - i); j < tb; ++j) {
        if (i + j + 1 < k) continue;  // cannot have spent k nodes yet
        double in = inf;
        if (i > 0 && j > 0) in = std::min(in, prev(i - 1, j - 1));
        if (i > 0) in = std::min(in, prev(i - 1, j));
        if (j > 0) in = std::min(in, prev(i, j - 1));
        if (in != inf) cur(i, j) = in + cost(i, j);
      }
    }
    const double terminal = cur(ta - 1, tb - 1);
    if (terminal != inf)
      best = std::min(best, terminal / static_cast<double>(k));
    std::swap(prev, cur);
  }
  return best;
}

double divergence(const Matrix& x, const Matrix& y) {
  return divergence_cost(cosine_cost_matrix(x, y));
}

namespace {

// token ids grouped by (left, right, center, speaker)
struct CellKey {
  std::string left, right, center, speaker;
  bool operator<(const CellKey& other) const {
    return std::tie(left, right, center, speaker) <
           std::tie(other.left, other.right, other.center, other.speaker);
  }
};

using CellMap = std::map<CellKey, std::vector<std::size_t>>;

std::vector<std::pair<std::string, std::string>> ordered_contrasts(
    const PhoneInventory& inventory) {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& [feature, pairs] : inventory.features) {
    for (const auto& [lo, hi] : pairs) {
      // Both presentation orders, so the A-category asymmetry cannot bias
      // per-pair accuracy.
      for (const auto& ordered :
           {std::make_pair(lo, hi), std::make_pair(hi, lo)}) {
        if (seen.insert(ordered).second) out.push_back(ordered);
      }
    }
  }
  return out;
}

}  // namespace

TripletSet build_triplets(const std::vector<TriphoneToken>& tokens,
                          const PhoneInventory& inventory, AbxTask task,
                          std::size_t budget_per_cell, Rng& rng) {
  TripletSet out;
  if (budget_per_cell == 0)
    fail(ErrorCode::InvalidArgument, "triplet budget must be positive");

  CellMap cells;
  std::set<std::pair<std::string, std::string>> contexts;
  std::set<std::string> speakers;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const TriphoneToken& t = tokens[i];
    cells[{t.left, t.right, t.center, t.speaker_id}].push_back(i);
    contexts.insert({t.left, t.right});
    speakers.insert(t.speaker_id);
  }

  const auto find_cell = [&](const std::string& left, const std::string& right,
                             const std::string& center,
                             const std::string& speaker)
      -> const std::vector<std::size_t>* {
    const auto it = cells.find({left, right, center, speaker});
    return it == cells.end() ? nullptr : &it->second;
  };

  const auto emit = [&](const std::vector<std::size_t>& a_pool,
                        const std::vector<std::size_t>& b_pool,
                        const std::vector<std::size_t>& x_pool, bool x_is_a,
                        const std::string& pa, const std::string& pb) {
    const std::size_t na = a_pool.size();
    const std::size_t nb = b_pool.size();
    const std::size_t nx = x_is_a ? na - 1 : x_pool.size();
    const std::size_t total = na * nb * nx;
    if (total == 0) {
      ++out.empty_cells;
      return;
    }
    std::vector<std::uint64_t> picks;
    if (total > budget_per_cell) {
      picks = rng.sample_indices(total, budget_per_cell);
      ++out.subsampled_cells;
    } else {
      picks.resize(total);
      for (std::size_t i = 0; i < total; ++i) picks[i] = i;
    }
    for (const std::uint64_t linear : picks) {
      const std::size_t ai = linear / (nb * nx);
      const std::size_t rem = linear % (nb * nx);
      const std::size_t bi = rem / nx;
      std::size_t xi = rem % nx;
      if (x_is_a && xi >= ai) ++xi;  // skip A itself
      AbxTriplet triplet;
      triplet.a = a_pool[ai];
      triplet.b = b_pool[bi];
      triplet.x = x_is_a ? a_pool[xi] : x_pool[xi];
      triplet.phone_a = pa;
      triplet.phone_b = pb;
      triplet.task = task;
      out.triplets.push_back(std::move(triplet));
    }
  };

  static const std::vector<std::size_t> kEmpty;
  for (const auto& [pa, pb] : ordered_contrasts(inventory)) {
    for (const auto& [left, right] : contexts) {
      if (task == AbxTask::WithinSpeaker) {
        for (const std::string& speaker : speakers) {
          const auto* a_pool = find_cell(left, right, pa, speaker);
          const auto* b_pool = find_cell(left, right, pb, speaker);
          if (a_pool == nullptr || a_pool->size() < 2 || b_pool == nullptr) {
            ++out.empty_cells;
            continue;
          }
          emit(*a_pool, *b_pool, kEmpty, /*x_is_a=*/true, pa, pb);
        }
      } else {
        for (const std::string& s1 : speakers) {
          const auto* a_pool = find_cell(left, right, pa, s1);
          const auto* b_pool = find_cell(left, right, pb, s1);
          for (const std::string& s2 : speakers) {
            if (s1 == s2) continue;
            const auto* x_pool = find_cell(left, right, pa, s2);
            if (a_pool == nullptr || b_pool == nullptr || x_pool == nullptr) {
              ++out.empty_cells;
              continue;
            }
            emit(*a_pool, *b_pool, *x_pool, /*x_is_a=*/false, pa, pb);
          }
        }
      }
    }
  }
  return out;
}

DivergenceCache::DivergenceCache(const std::vector<TriphoneToken>& tokens,
                                 const EmbeddingArchive& archive)
    : tokens_(tokens), archive_(archive) {}

double DivergenceCache::between(std::size_t i, std::size_t j) {
  const std::uint64_t key =
      (static_cast<std::uint64_t>(std::min(i, j)) << 32) |
      static_cast<std::uint64_t>(std::max(i, j));
  const auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  const TriphoneToken& ta = tokens_[i];
  const TriphoneToken& tb = tokens_[j];
  const double value =
      divergence(archive_.slice(ta.utterance_id, ta.start_frame, ta.end_frame),
                 archive_.slice(tb.utterance_id, tb.start_frame, tb.end_frame));
  cache_.emplace(key, value);
  return value;
}

double score_triplet(const AbxTriplet& triplet, DivergenceCache& cache) {
  const double dax = cache.between(triplet.a, triplet.x);
  const double dbx = cache.between(triplet.b, triplet.x);
  if (dax < dbx) return 1.0;
  if (dax > dbx) return 0.0;
  return 0.5;
}

double score_triplet(const AbxTriplet& triplet,
                     const std::vector<TriphoneToken>& tokens,
                     const EmbeddingArchive& archive) {
  DivergenceCache cache(tokens, archive);
  return score_triplet(triplet, cache);
}

AbxReport abx_report(const TripletSet& set,
                     const std::vector<TriphoneToken>& tokens,
                     const EmbeddingArchive& archive,
                     const PhoneInventory& inventory) {
  if (set.triplets.empty())
    fail(ErrorCode::InvalidArgument, "no triplets to score");

  AbxReport report;
  report.task = set.triplets.front().task;
  report.empty_cells = set.empty_cells;
  report.triplet_count = set.triplets.size();

  DivergenceCache cache(tokens, archive);
  double total = 0.0;
  std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>>
      by_contrast;
  for (const AbxTriplet& triplet : set.triplets) {
    const double score = score_triplet(triplet, cache);
    total += score;
    auto& [sum, count] =
        by_contrast[std::minmax(triplet.phone_a, triplet.phone_b)];
    sum += score;
    count += 1;
  }
  report.overall_error = 1.0 - total / static_cast<double>(set.triplets.size());

  for (const auto& [contrast, stat] : by_contrast) {
    AbxReport::ContrastStat entry;
    entry.phone_a = contrast.first;
    entry.phone_b = contrast.second;
    entry.accuracy = stat.first / static_cast<double>(stat.second);
    entry.count = stat.second;
    report.per_contrast.push_back(std::move(entry));
  }

  for (const auto& [feature, pairs] : inventory.features) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& [lo, hi] : pairs) {
      const auto it = by_contrast.find(std::minmax(lo, hi));
      if (it == by_contrast.end()) continue;
      sum += it->second.first;
      count += it->second.second;
    }
    if (count == 0) continue;
    AbxReport::FeatureStat entry;
    entry.feature = feature;
    entry.accuracy = sum / static_cast<double>(count);
    entry.count = count;
    report.per_feature.push_back(std::move(entry));
  }
  return report;
}

Json AbxReport::to_json() const {
  Json doc;
  doc["task"] = abx_task_name(task);
  doc["overall_error"] = overall_error;
  doc["triplets"] = triplet_count;
  doc["empty_cells"] = empty_cells;
  Json contrasts = Json::array();
  for (const ContrastStat& c : per_contrast) {
    Json entry;
    entry["a"] = c.phone_a;
    entry["b"] = c.phone_b;
    entry["accuracy"] = c.accuracy;
    entry["count"] = c.count;
    contrasts.push_back(std::move(entry));
  }
  doc["per_contrast"] = std::move(contrasts);
  Json features = Json::array();
  for (const FeatureStat& f : per_feature) {
    Json entry;
    entry["feature"] = f.feature;
    entry["accuracy"] = f.accuracy;
    entry["count"] = f.count;
    features.push_back(std::move(entry));
  }
  doc["per_feature"] = std::move(features);
  return doc;
}

AbxReport AbxReport::from_json(const Json& doc) {
  AbxReport report;
  report.task = abx_task_from_name(doc.at("task").get<std::string>());
  report.overall_error = doc.at("overall_error").get<double>();
  report.triplet_count = doc.at("triplets").get<std::size_t>();
  report.empty_cells = doc.value("empty_cells", std::size_t{0});
  for (const auto& entry : doc.at("per_contrast")) {
    AbxReport::ContrastStat c;
    c.phone_a = entry.at("a").get<std::string>();
    c.phone_b = entry.at("b").get<std::string>();
    c.accuracy = entry.at("accuracy").get<double>();
    c.count = entry.at("count").get<std::size_t>();
    report.per_contrast.push_back(std::move(c));
  }
  for (const auto& entry : doc.at("per_feature")) {
    AbxReport::FeatureStat f;
    f.feature = entry.at("feature").get<std::string>();
    f.accuracy = entry.at("accuracy").get<double>();
    f.count = entry.at("count").get<std::size_t>();
    report.per_feature.push_back(std::move(f));
  }
  return report;
}

}  // namespace wsm
