// wsm/prep.cpp

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

#include "wsm/prep.hpp"

#include <cmath>

#include "wsm/error.hpp"
#include "wsm/io.hpp"

namespace wsm {

FeatureSeq Preprocessor::to_canonical_rate(const FeatureSeq& seq) {
  if (seq.fps == kCanonicalFps) return seq;
  const double factor = kCanonicalFps / seq.fps;
  const double rounded = std::round(factor);
  if (rounded >= 1.0 && std::abs(factor - rounded) < 1e-9)
    return repeat_upsample(seq, static_cast<int>(rounded));
  const auto target = static_cast<Index>(
      std::llround(static_cast<double>(seq.frames()) * factor));
  FeatureSeq out = cubic_resample(seq, std::max<Index>(target, 1));
  out.fps = kCanonicalFps;
  return out;
}

Preprocessor Preprocessor::fit(const Corpus& train, const PrepConfig& config) {
  if (train.modalities.empty())
    fail(ErrorCode::InvalidArgument, "corpus declares no modalities");
  Preprocessor prep;
  prep.stack_window_ = config.stack_window;

  for (const ModalityInfo& info : train.modalities) {
    ModalityPrep mp;
    mp.name = info.name;
    mp.source_fps = info.fps;

    // Gather all training frames at the canonical rate.
    std::vector<Matrix> chunks;
    Index total = 0;
    for (const UtteranceRecord& utt : train.utterances) {
      const auto it = utt.features.find(info.name);
      if (it == utt.features.end())
        fail(ErrorCode::MalformedManifest,
             utt.id + ": missing modality " + info.name);
      chunks.push_back(to_canonical_rate(it->second).data);
      total += chunks.back().rows();
    }
    Matrix frames(total, info.dim);
    Index row = 0;
    for (const Matrix& chunk : chunks) {
      frames.middleRows(row, chunk.rows()) = chunk;
      row += chunk.rows();
    }

    const auto pca_it = config.pca_dims.find(info.name);
    if (pca_it != config.pca_dims.end()) {
      mp.pca = fit_pca_whitener(frames, pca_it->second);
      frames = apply_pca(*mp.pca, frames);
    }
    mp.moments = compute_moments(frames);
    mp.out_dim = static_cast<int>(frames.cols());

    prep.layout_.blocks.emplace_back(mp.name, mp.out_dim);
    prep.modalities_.push_back(std::move(mp));
  }

  prep.reference_ = prep.layout_.has("audio")
                        ? std::string("audio")
                        : prep.modalities_.front().name;
  return prep;
}

const ModalityPrep* Preprocessor::find(const std::string& name) const {
  for (const ModalityPrep& mp : modalities_)
    if (mp.name == name) return &mp;
  return nullptr;
}

FeatureSeq Preprocessor::preprocess_modality(const UtteranceRecord& utt,
                                             const std::string& modality) const {
  const ModalityPrep* mp = find(modality);
  if (mp == nullptr)
    fail(ErrorCode::LayoutMismatch, "preprocessor has no modality " + modality);
  const auto it = utt.features.find(modality);
  if (it == utt.features.end())
    fail(ErrorCode::MalformedManifest,
         utt.id + ": missing modality " + modality);
  FeatureSeq seq = to_canonical_rate(it->second);
  if (mp->pca) seq = apply_pca(*mp->pca, seq);
  return apply_moments(mp->moments, seq);
}

FeatureSeq Preprocessor::concat_preprocessed(const UtteranceRecord& utt) const {
  FeatureSeq out = preprocess_modality(utt, modalities_.front().name);
  for (std::size_t i = 1; i < modalities_.size(); ++i)
    out = concat_modalities(out, preprocess_modality(utt, modalities_[i].name));
  return out;
}

FeatureSeq Preprocessor::stacked(const UtteranceRecord& utt) const {
  return stack_frames(concat_preprocessed(utt), stack_window_);
}

void Preprocessor::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  Json doc;
  doc["format_version"] = 1;
  doc["stack_window"] = stack_window_;
  doc["reference_modality"] = reference_;
  Json mods = Json::array();
  for (const ModalityPrep& mp : modalities_) {
    Json entry;
    entry["name"] = mp.name;
    entry["source_fps"] = mp.source_fps;
    entry["out_dim"] = mp.out_dim;
    const std::string moments_file = "moments." + mp.name + ".wsmf";
    save_moments(dir / moments_file, mp.moments);
    entry["moments"] = moments_file;
    if (mp.pca) {
      const std::string pca_file = "pca." + mp.name + ".wsmf";
      save_pca(dir / pca_file, *mp.pca);
      entry["pca"] = pca_file;
    } else {
      entry["pca"] = nullptr;
    }
    mods.push_back(std::move(entry));
  }
  doc["modalities"] = std::move(mods);
  write_json_file(dir / "prep.json", doc);
}

Preprocessor Preprocessor::load(const std::filesystem::path& dir) {
  const Json doc = read_json_file(dir / "prep.json");
  Preprocessor prep;
  prep.stack_window_ = doc.at("stack_window").get<int>();
  prep.reference_ = doc.at("reference_modality").get<std::string>();
  for (const auto& entry : doc.at("modalities")) {
    ModalityPrep mp;
    mp.name = entry.at("name").get<std::string>();
    mp.source_fps = entry.at("source_fps").get<double>();
    mp.out_dim = entry.at("out_dim").get<int>();
    mp.moments = load_moments(dir / entry.at("moments").get<std::string>());
    if (!entry.at("pca").is_null())
      mp.pca = load_pca(dir / entry.at("pca").get<std::string>());
    prep.layout_.blocks.emplace_back(mp.name, mp.out_dim);
    prep.modalities_.push_back(std::move(mp));
  }
  return prep;
}

}  // namespace wsm
