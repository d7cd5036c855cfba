// wsm/pairing.cpp

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

#include "wsm/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "wsm/distance.hpp"
#include "wsm/error.hpp"

namespace wsm {

DtwResult dtw_align_cost(const Matrix& cost) {
  const Index ta = cost.rows();
  const Index tb = cost.cols();
  if (ta < 1 || tb < 1)
    fail(ErrorCode::InvalidArgument, "DTW needs non-empty sequences");

  // 0 = diagonal, 1 = advance row, 2 = advance column; preference in that
  // order on cost ties.
  Matrix acc(ta, tb);
  Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic> step(ta, tb);
  acc(0, 0) = cost(0, 0);
  step(0, 0) = -1;
  for (Index i = 1; i < ta; ++i) {
    acc(i, 0) = acc(i - 1, 0) + cost(i, 0);
    step(i, 0) = 1;
  }
  for (Index j = 1; j < tb; ++j) {
    acc(0, j) = acc(0, j - 1) + cost(0, j);
    step(0, j) = 2;
  }
  for (Index i = 1; i < ta; ++i) {
    for (Index j = 1; j < tb; ++j) {
      const double diag = acc(i - 1, j - 1);
      const double up = acc(i - 1, j);
      const double left = acc(i, j - 1);
      double best = diag;
      std::int8_t which = 0;
      if (up < best) {
        best = up;
        which = 1;
      }
      if (left < best) {
        best = left;
        which = 2;
      }
      acc(i, j) = best + cost(i, j);
      step(i, j) = which;
    }
  }

  DtwResult result;
  result.total_cost = acc(ta - 1, tb - 1);
  Index i = ta - 1;
  Index j = tb - 1;
  result.path.emplace_back(i, j);
  while (i != 0 || j != 0) {
    switch (step(i, j)) {
      case 0:
        --i;
        --j;
        break;
      case 1:
        --i;
        break;
      default:
        --j;
        break;
    }
    result.path.emplace_back(i, j);
  }
  std::reverse(result.path.begin(), result.path.end());
  return result;
}

DtwResult dtw_align(const Matrix& a, const Matrix& b) {
  return dtw_align_cost(cosine_cost_matrix(a, b));
}

DtwResult dtw_align(const FeatureSeq& a, const FeatureSeq& b) {
  return dtw_align(a.data, b.data);
}

AlignmentPath diagonal_align(Index len_a, Index len_b) {
  if (len_a < 1 || len_b < 1)
    fail(ErrorCode::InvalidArgument, "diagonal alignment needs lengths >= 1");
  const Index steps = std::max(len_a, len_b);
  AlignmentPath path;
  path.reserve(steps);
  if (steps == 1) {
    path.emplace_back(0, 0);
    return path;
  }
  const auto round_half_up = [](double x) {
    return static_cast<Index>(std::floor(x + 0.5));
  };
  for (Index t = 0; t < steps; ++t) {
    const double frac = static_cast<double>(t) / static_cast<double>(steps - 1);
    path.emplace_back(round_half_up(frac * static_cast<double>(len_a - 1)),
                      round_half_up(frac * static_cast<double>(len_b - 1)));
  }
  return path;
}

double path_cost(const Matrix& cost, const AlignmentPath& path) {
  double total = 0.0;
  for (const auto& [i, j] : path) total += cost(i, j);
  return total;
}

SampledPairs sample_word_pairs(const std::vector<WordToken>& tokens,
                               std::size_t n_same, std::size_t n_diff,
                               Rng& rng, const PairingConstraints&) {
  SampledPairs out;

  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < tokens.size(); ++i)
    by_label[tokens[i].label].push_back(i);

  // Same-word pairs: explicit enumeration (groups are small), then a uniform
  // subset without replacement.
  std::vector<std::pair<std::size_t, std::size_t>> same_pool;
  for (const auto& [label, ids] : by_label)
    for (std::size_t a = 0; a < ids.size(); ++a)
      for (std::size_t b = a + 1; b < ids.size(); ++b)
        same_pool.emplace_back(ids[a], ids[b]);

  if (n_same > 0 && same_pool.empty())
    fail(ErrorCode::NoSamePairsAvailable, "no word label has two tokens");

  if (n_same >= same_pool.size()) {
    out.missing_same = n_same - same_pool.size();
    for (const auto& [a, b] : same_pool)
      out.pairs.push_back({tokens[a], tokens[b], true});
  } else {
    const auto picks = rng.sample_indices(same_pool.size(), n_same);
    for (const std::uint64_t p : picks)
      out.pairs.push_back({tokens[same_pool[p].first],
                           tokens[same_pool[p].second], true});
  }

  // Different-word pairs: the pool is quadratic, so rejection-sample unless
  // everything was requested.
  const std::size_t n = tokens.size();
  const std::size_t all_pairs = n * (n - 1) / 2;
  const std::size_t diff_total = all_pairs - same_pool.size();
  if (n_diff >= diff_total) {
    out.missing_diff = n_diff - diff_total;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (tokens[a].label != tokens[b].label)
          out.pairs.push_back({tokens[a], tokens[b], false});
  } else {
    std::set<std::pair<std::size_t, std::size_t>> chosen;
    while (chosen.size() < n_diff) {
      std::size_t a = static_cast<std::size_t>(rng.uniform_int(n));
      std::size_t b = static_cast<std::size_t>(rng.uniform_int(n));
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      if (tokens[a].label == tokens[b].label) continue;
      if (!chosen.insert({a, b}).second) continue;
      out.pairs.push_back({tokens[a], tokens[b], false});
    }
  }
  return out;
}

const char* train_mode_name(TrainMode mode) {
  switch (mode) {
    case TrainMode::Raw:
      return "raw";
    case TrainMode::MonoA:
      return "mono-a";
    case TrainMode::MonoV:
      return "mono-v";
    case TrainMode::MonoAV:
      return "mono-av";
    case TrainMode::Multi:
      return "multi";
  }
  return "?";
}

TrainMode train_mode_from_name(const std::string& name) {
  if (name == "raw") return TrainMode::Raw;
  if (name == "mono-a") return TrainMode::MonoA;
  if (name == "mono-v") return TrainMode::MonoV;
  if (name == "mono-av") return TrainMode::MonoAV;
  if (name == "multi") return TrainMode::Multi;
  fail(ErrorCode::InvalidArgument, "unknown training mode `" + name + "`");
}

ModalityCombo draw_combo(TrainMode mode, Rng& rng,
                         const std::string& audio_name,
                         const std::string& visual_name) {
  const ModalityMask audio = ModalityMask::keeping({audio_name});
  const ModalityMask visual = ModalityMask::keeping({visual_name});
  const ModalityMask both = ModalityMask::keeping({audio_name, visual_name});
  switch (mode) {
    case TrainMode::MonoA:
      return {audio, audio};
    case TrainMode::MonoV:
      return {visual, visual};
    case TrainMode::MonoAV:
      return {both, both};
    case TrainMode::Multi:
      switch (rng.uniform_int(4)) {
        case 0:
          return {both, both};
        case 1:
          return {audio, audio};
        case 2:
          return {visual, visual};
        default:
          return {audio, visual};
      }
    case TrainMode::Raw:
      break;
  }
  fail(ErrorCode::InvalidArgument, "raw mode has no training combos");
}

ModalityMask mask_from_spec(const std::vector<ModalityInfo>& modalities,
                            const std::string& spec) {
  if (modalities.empty())
    fail(ErrorCode::InvalidArgument, "corpus declares no modalities");
  const auto named_or_position = [&](const std::string& name,
                                     std::size_t position) -> std::string {
    for (const ModalityInfo& m : modalities)
      if (m.name == name) return name;
    if (position >= modalities.size())
      fail(ErrorCode::InvalidArgument,
           "corpus has no modality for mask `" + spec + "`");
    return modalities[position].name;
  };
  ModalityMask mask;
  if (spec == "a") {
    mask.kept.insert(named_or_position("audio", 0));
  } else if (spec == "v") {
    mask.kept.insert(named_or_position("visual", 1));
  } else if (spec == "av") {
    for (const ModalityInfo& m : modalities) mask.kept.insert(m.name);
  } else {
    fail(ErrorCode::InvalidArgument, "unknown test mask `" + spec + "`");
  }
  return mask;
}

PairRealizer::PairRealizer(const Corpus& corpus, const Preprocessor& prep)
    : corpus_(corpus), prep_(prep), stacked_layout_(prep.stacked_layout()) {}

const Matrix& PairRealizer::reference(std::size_t utterance_index) const {
  auto it = reference_cache_.find(utterance_index);
  if (it == reference_cache_.end()) {
    const UtteranceRecord& utt = corpus_.utterance_at(utterance_index);
    it = reference_cache_
             .emplace(utterance_index,
                      prep_.preprocess_modality(utt, prep_.reference_modality())
                          .data)
             .first;
  }
  return it->second;
}

const Matrix& PairRealizer::concat(std::size_t utterance_index) const {
  auto it = concat_cache_.find(utterance_index);
  if (it == concat_cache_.end()) {
    const UtteranceRecord& utt = corpus_.utterance_at(utterance_index);
    it = concat_cache_
             .emplace(utterance_index, prep_.concat_preprocessed(utt).data)
             .first;
  }
  return it->second;
}

std::vector<PairExample> PairRealizer::realize(
    const WordPair& pair, const ModalityCombo& combo) const {
  const Index len_a = pair.a.length();
  const Index len_b = pair.b.length();

  // Stacking runs inside the token span, so a token realizes identically
  // regardless of its surrounding utterance.
  const auto span_stacked = [&](const WordToken& token) {
    FeatureSeq span;
    span.data = concat(token.utterance_index)
                    .middleRows(token.start_frame, token.length());
    return stack_frames(span, prep_.stack_window()).data;
  };

  AlignmentPath path;
  if (pair.same) {
    const Matrix ref_a = reference(pair.a.utterance_index)
                             .middleRows(pair.a.start_frame, len_a);
    const Matrix ref_b = reference(pair.b.utterance_index)
                             .middleRows(pair.b.start_frame, len_b);
    path = dtw_align(ref_a, ref_b).path;
  } else {
    path = diagonal_align(len_a, len_b);
  }

  const Matrix x1 =
      knockout(span_stacked(pair.a), combo.branch1, stacked_layout_);
  const Matrix x2 =
      knockout(span_stacked(pair.b), combo.branch2, stacked_layout_);

  std::vector<PairExample> examples;
  examples.reserve(path.size());
  for (const auto& [i, j] : path) {
    PairExample ex;
    ex.x1 = x1.row(i).transpose();
    ex.x2 = x2.row(j).transpose();
    ex.label = pair.same ? 1 : 0;
    examples.push_back(std::move(ex));
  }
  return examples;
}

std::vector<PairExample> realize_pair(const WordPair& pair,
                                      const Corpus& corpus,
                                      const ModalityCombo& combo,
                                      const Preprocessor& prep) {
  return PairRealizer(corpus, prep).realize(pair, combo);
}

PairStream::PairStream(const Corpus& corpus, const Preprocessor& prep,
                       const PairStreamConfig& config)
    : realizer_(corpus, prep), config_(config) {
  const std::vector<WordToken> all_tokens = word_tokens(corpus);
  std::vector<std::string> labels;
  {
    std::set<std::string> seen;
    for (const WordToken& t : all_tokens)
      if (seen.insert(t.label).second) labels.push_back(t.label);
  }
  std::sort(labels.begin(), labels.end());

  std::set<std::string> heldout_labels;
  if (labels.size() >= 2 && config.heldout_label_fraction > 0.0) {
    const auto n_held = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(
               config.heldout_label_fraction * static_cast<double>(labels.size()))));
    Rng rng = substream(config.seed, "pairing.heldout");
    std::vector<std::string> shuffled = labels;
    rng.shuffle(shuffled);
    heldout_labels.insert(shuffled.begin(),
                          shuffled.begin() + std::min(n_held, shuffled.size() - 1));
  }
  heldout_label_count_ = heldout_labels.size();

  std::vector<WordToken> heldout_tokens;
  for (const WordToken& t : all_tokens) {
    if (heldout_labels.count(t.label))
      heldout_tokens.push_back(t);
    else
      train_tokens_.push_back(t);
  }
  train_tokens_by_label_ = group_tokens_by_label(train_tokens_);

  if (!heldout_tokens.empty() && config.heldout_pairs > 0) {
    Rng rng = substream(config.seed, "pairing.validation");
    heldout_ = realize_sample(heldout_tokens, config.heldout_pairs, rng);
  }
}

std::vector<PairExample> PairStream::realize_sample(
    const std::vector<WordToken>& tokens, std::size_t n_pairs, Rng& rng) const {
  const std::size_t n_same = n_pairs / 2;
  const std::size_t n_diff = n_pairs - n_same;
  SampledPairs sampled;
  try {
    sampled = sample_word_pairs(tokens, n_same, n_diff, rng);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoSamePairsAvailable) throw;
    sampled = sample_word_pairs(tokens, 0, n_diff, rng);
  }
  std::vector<PairExample> examples;
  for (const WordPair& pair : sampled.pairs) {
    const ModalityCombo combo = draw_combo(config_.mode, rng);
    auto realized = realizer_.realize(pair, combo);
    examples.insert(examples.end(), std::make_move_iterator(realized.begin()),
                    std::make_move_iterator(realized.end()));
  }
  rng.shuffle(examples);
  return examples;
}

std::vector<PairExample> PairStream::epoch_examples(std::size_t epoch) const {
  Rng rng =
      substream(config_.seed, "pairing.epoch." + std::to_string(epoch));
  return realize_sample(train_tokens_, config_.pairs_per_epoch, rng);
}

}  // namespace wsm
