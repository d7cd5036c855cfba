// wsm/structure.cpp

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

#include "wsm/structure.hpp"

#include <algorithm>

#include "wsm/abx.hpp"
#include "wsm/distance.hpp"
#include "wsm/error.hpp"
#include "wsm/features.hpp"

namespace wsm {

PhoneCentroids phone_centroids(const EmbeddingArchive& archive,
                               const Corpus& corpus) {
  std::map<std::string, Vector> sums;
  std::map<std::string, std::size_t> counts;
  for (const UtteranceRecord& utt : corpus.utterances) {
    for (const Segment& seg : utt.phones) {
      const Matrix span = archive.slice(utt.id, seg.start_frame, seg.end_frame);
      const Vector token_mean = span.colwise().mean().transpose();
      auto it = sums.find(seg.label);
      if (it == sums.end())
        sums.emplace(seg.label, token_mean);
      else
        it->second += token_mean;
      counts[seg.label] += 1;
    }
  }
  PhoneCentroids out;
  for (const auto& [phone, sum] : sums)
    out.centroids.emplace(phone, sum / static_cast<double>(counts.at(phone)));
  for (const std::string& phone : corpus.inventory.phones)
    if (out.centroids.find(phone) == out.centroids.end())
      out.missing.push_back(phone);
  return out;
}

FeatureVectorSets feature_difference_vectors(const PhoneCentroids& centroids,
                                             const PhoneInventory& inventory) {
  FeatureVectorSets out;
  for (const auto& [feature, pairs] : inventory.features) {
    std::vector<Vector> vectors;
    for (const auto& [neg, pos] : pairs) {
      const auto it_neg = centroids.centroids.find(neg);
      const auto it_pos = centroids.centroids.find(pos);
      if (it_neg == centroids.centroids.end() ||
          it_pos == centroids.centroids.end())
        continue;
      vectors.push_back(it_pos->second - it_neg->second);
    }
    out.emplace_back(feature, std::move(vectors));
  }
  return out;
}

ParallelismReport parallelism_score(const FeatureVectorSets& vectors) {
  // Drop zero vectors up front; a zero difference carries no direction.
  std::vector<std::vector<Vector>> usable(vectors.size());
  ParallelismReport report;
  for (std::size_t f = 0; f < vectors.size(); ++f)
    for (const Vector& v : vectors[f].second)
      if (v.squaredNorm() > 0.0) usable[f].push_back(v);

  bool any_scored = false;
  for (std::size_t f = 0; f < vectors.size(); ++f) {
    std::size_t others = 0;
    for (std::size_t g = 0; g < vectors.size(); ++g)
      if (g != f) others += usable[g].size();
    if (usable[f].size() < 2 || others == 0) {
      report.excluded.push_back(vectors[f].first);
      continue;
    }

    std::vector<double> same;
    for (std::size_t i = 0; i < usable[f].size(); ++i)
      for (std::size_t j = i + 1; j < usable[f].size(); ++j)
        same.push_back(cosine_similarity(usable[f][i], usable[f][j]));
    std::vector<double> cross;
    for (std::size_t g = 0; g < vectors.size(); ++g) {
      if (g == f) continue;
      for (const Vector& v : usable[f])
        for (const Vector& w : usable[g])
          cross.push_back(cosine_similarity(v, w));
    }

    double wins = 0.0;
    for (const double s : same)
      for (const double d : cross)
        wins += s > d ? 1.0 : (s == d ? 0.5 : 0.0);

    ParallelismReport::FeatureScore entry;
    entry.feature = vectors[f].first;
    entry.score = wins / (static_cast<double>(same.size()) *
                          static_cast<double>(cross.size()));
    entry.vectors = usable[f].size();
    entry.zero_excluded = vectors[f].second.size() - usable[f].size();
    report.features.push_back(std::move(entry));
    any_scored = true;
  }

  if (!any_scored)
    fail(ErrorCode::InsufficientVectors,
         "no feature has two usable difference vectors against another feature");
  return report;
}

Json ParallelismReport::to_json() const {
  Json doc;
  Json list = Json::array();
  for (const FeatureScore& f : features) {
    Json entry;
    entry["feature"] = f.feature;
    entry["score"] = f.score;
    entry["vectors"] = f.vectors;
    entry["zero_excluded"] = f.zero_excluded;
    list.push_back(std::move(entry));
  }
  doc["per_feature"] = std::move(list);
  doc["excluded"] = excluded;
  return doc;
}

namespace {

const std::string& visual_modality_name(const Preprocessor& prep) {
  for (const ModalityPrep& mp : prep.modalities())
    if (mp.name == "visual") return mp.name;
  if (prep.modalities().size() > 1) return prep.modalities()[1].name;
  return prep.modalities()[0].name;
}

struct PhoneSpan {
  std::size_t utterance_index;
  std::string speaker;
  std::int64_t start;
  std::int64_t end;
};

std::vector<PhoneSpan> collect_phone_spans(const Corpus& corpus,
                                           const std::string& phone,
                                           const std::set<std::string>& speakers,
                                           bool speakers_are_allowed) {
  std::vector<PhoneSpan> spans;
  for (std::size_t ui = 0; ui < corpus.utterances.size(); ++ui) {
    const UtteranceRecord& utt = corpus.utterances[ui];
    const bool in_set = speakers.count(utt.speaker) > 0;
    if (in_set != speakers_are_allowed) continue;
    for (const Segment& seg : utt.phones)
      if (seg.label == phone)
        spans.push_back({ui, utt.speaker, seg.start_frame, seg.end_frame});
  }
  return spans;
}

}  // namespace

FeatureSeq generic_visual_template(const Corpus& corpus,
                                   const std::string& phone,
                                   const std::set<std::string>& held_out,
                                   Index target_len, const Preprocessor& prep) {
  if (target_len < 1)
    fail(ErrorCode::InvalidArgument, "template length must be >= 1");
  const std::string& visual = visual_modality_name(prep);
  const std::vector<PhoneSpan> spans =
      collect_phone_spans(corpus, phone, held_out, /*speakers_are_allowed=*/true);
  if (spans.empty())
    fail(ErrorCode::NoHeldOutTokens,
         "no held-out token of phone `" + phone + "`");

  Matrix sum;
  for (const PhoneSpan& span : spans) {
    const UtteranceRecord& utt = corpus.utterance_at(span.utterance_index);
    FeatureSeq seq;
    seq.data = prep.preprocess_modality(utt, visual)
                   .data.middleRows(span.start, span.end - span.start);
    const FeatureSeq resampled = cubic_resample(seq, target_len);
    if (sum.size() == 0)
      sum = resampled.data;
    else
      sum += resampled.data;
  }
  FeatureSeq out;
  out.data = sum / static_cast<double>(spans.size());
  out.fps = kCanonicalFps;
  return out;
}

Matrix embed_stimulus(const Network& net, const Preprocessor& prep,
                      const Matrix& audio, const Matrix& visual) {
  FeatureSeq concat;
  concat.fps = kCanonicalFps;
  bool first = true;
  for (const auto& [name, width] : prep.layout().blocks) {
    const Matrix* block = nullptr;
    if (name == "audio")
      block = &audio;
    else if (name == visual_modality_name(prep))
      block = &visual;
    if (block == nullptr)
      fail(ErrorCode::LayoutMismatch,
           "stimulus assembly expects audio/visual blocks, layout has " + name);
    FeatureSeq part{*block, kCanonicalFps};
    concat = first ? part : concat_modalities(concat, part);
    first = false;
  }
  return net.forward(stack_frames(concat, prep.stack_window()).data);
}

McGurkReport mcgurk_eval(const Network& net, const Corpus& corpus,
                         const McGurkConfig& config, const Preprocessor& prep,
                         Rng& rng) {
  if (config.visual_variants.empty())
    fail(ErrorCode::InvalidArgument, "no visual variants configured");
  const std::string& visual = visual_modality_name(prep);

  const std::vector<PhoneSpan> a_spans = collect_phone_spans(
      corpus, config.audio_phone, config.held_out_speakers, false);
  const std::vector<PhoneSpan> b_spans = collect_phone_spans(
      corpus, config.competitor_phone, config.held_out_speakers, false);
  if (a_spans.empty())
    fail(ErrorCode::MissingPhone,
         "no test tokens of audio phone `" + config.audio_phone + "`");
  if (b_spans.empty())
    fail(ErrorCode::MissingPhone,
         "no test tokens of competitor `" + config.competitor_phone + "`");

  // Per-utterance preprocessed streams, computed once.
  std::map<std::size_t, Matrix> audio_cache, visual_cache;
  const auto prep_utt = [&](std::size_t ui) {
    if (audio_cache.count(ui)) return;
    const UtteranceRecord& utt = corpus.utterance_at(ui);
    audio_cache[ui] = prep.preprocess_modality(utt, "audio").data;
    visual_cache[ui] = prep.preprocess_modality(utt, visual).data;
  };

  // Competitor stimuli are unmodified matched audio+visual tokens.
  std::vector<Matrix> b_embeds;
  for (const PhoneSpan& span : b_spans) {
    prep_utt(span.utterance_index);
    const Index len = span.end - span.start;
    b_embeds.push_back(embed_stimulus(
        net, prep, audio_cache[span.utterance_index].middleRows(span.start, len),
        visual_cache[span.utterance_index].middleRows(span.start, len)));
  }

  McGurkReport report;
  report.audio_phone = config.audio_phone;
  report.competitor_phone = config.competitor_phone;

  for (const std::string& variant : config.visual_variants) {
    std::map<Index, FeatureSeq> template_by_len;
    std::vector<Matrix> a_embeds;
    for (const PhoneSpan& span : a_spans) {
      prep_utt(span.utterance_index);
      const Index len = span.end - span.start;
      auto it = template_by_len.find(len);
      if (it == template_by_len.end())
        it = template_by_len
                 .emplace(len, generic_visual_template(
                                   corpus, variant, config.held_out_speakers,
                                   len, prep))
                 .first;
      a_embeds.push_back(embed_stimulus(
          net, prep,
          audio_cache[span.utterance_index].middleRows(span.start, len),
          it->second.data));
    }

    // ABX triplets: A and X are mismatched stimuli, B a matched competitor,
    // within speaker when any speaker supports it.
    std::map<std::string, std::vector<std::size_t>> a_by_speaker, b_by_speaker;
    for (std::size_t i = 0; i < a_spans.size(); ++i)
      a_by_speaker[a_spans[i].speaker].push_back(i);
    for (std::size_t i = 0; i < b_spans.size(); ++i)
      b_by_speaker[b_spans[i].speaker].push_back(i);

    double total = 0.0;
    std::size_t count = 0;
    const auto score_cell = [&](const std::vector<std::size_t>& a_pool,
                                const std::vector<std::size_t>& b_pool) {
      const std::size_t na = a_pool.size();
      const std::size_t nb = b_pool.size();
      const std::size_t cell = na * (na - 1) * nb;
      std::vector<std::uint64_t> picks;
      if (cell > config.budget_per_cell)
        picks = rng.sample_indices(cell, config.budget_per_cell);
      else {
        picks.resize(cell);
        for (std::size_t i = 0; i < cell; ++i) picks[i] = i;
      }
      for (const std::uint64_t linear : picks) {
        const std::size_t ai = linear / ((na - 1) * nb);
        const std::size_t rem = linear % ((na - 1) * nb);
        std::size_t xi = rem / nb;
        const std::size_t bi = rem % nb;
        if (xi >= ai) ++xi;
        const double dax = divergence(a_embeds[a_pool[ai]], a_embeds[a_pool[xi]]);
        const double dbx = divergence(b_embeds[b_pool[bi]], a_embeds[a_pool[xi]]);
        total += dax < dbx ? 1.0 : (dax > dbx ? 0.0 : 0.5);
        count += 1;
      }
    };

    bool any_within = false;
    for (const auto& [speaker, a_pool] : a_by_speaker) {
      const auto it = b_by_speaker.find(speaker);
      if (a_pool.size() < 2 || it == b_by_speaker.end()) continue;
      any_within = true;
      score_cell(a_pool, it->second);
    }
    if (!any_within && a_spans.size() >= 2) {
      // Fall back to pooled speakers so tiny corpora still evaluate.
      std::vector<std::size_t> all_a(a_spans.size()), all_b(b_spans.size());
      for (std::size_t i = 0; i < all_a.size(); ++i) all_a[i] = i;
      for (std::size_t i = 0; i < all_b.size(); ++i) all_b[i] = i;
      score_cell(all_a, all_b);
    }
    if (count == 0)
      fail(ErrorCode::ConfigInfeasible,
           "no ABX triplets for variant `" + variant + "`");

    McGurkReport::VariantResult result;
    result.variant = variant;
    result.accuracy = total / static_cast<double>(count);
    result.triplets = count;
    report.variants.push_back(std::move(result));
  }
  return report;
}

Json McGurkReport::to_json() const {
  Json doc;
  doc["audio_phone"] = audio_phone;
  doc["competitor_phone"] = competitor_phone;
  Json list = Json::array();
  for (const VariantResult& v : variants) {
    Json entry;
    entry["visual_variant"] = v.variant;
    entry["accuracy"] = v.accuracy;
    entry["triplets"] = v.triplets;
    list.push_back(std::move(entry));
  }
  doc["variants"] = std::move(list);
  return doc;
}

}  // namespace wsm
