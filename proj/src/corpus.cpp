// wsm/corpus.cpp

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

#include "wsm/corpus.hpp"

#include <algorithm>
#include <cmath>

#include "wsm/error.hpp"
#include "wsm/io.hpp"

namespace wsm {

std::int64_t UtteranceRecord::canonical_frames() const {
  // All modalities must describe the same duration; use the first.
  if (features.empty()) return 0;
  const FeatureSeq& seq = features.begin()->second;
  return static_cast<std::int64_t>(
      std::llround(static_cast<double>(seq.frames()) * kCanonicalFps / seq.fps));
}

const PhoneInventory::PairList* PhoneInventory::find_feature(
    const std::string& name) const {
  for (const auto& [feature, pairs] : features)
    if (feature == name) return &pairs;
  return nullptr;
}

bool PhoneInventory::is_visual(const std::string& feature) const {
  return std::find(visual_features.begin(), visual_features.end(), feature) !=
         visual_features.end();
}

bool PhoneInventory::participates_in_opposition(
    const std::string& phone) const {
  for (const auto& [feature, pairs] : features)
    for (const auto& [lo, hi] : pairs)
      if (lo == phone || hi == phone) return true;
  return false;
}

PhoneInventory::PairList PhoneInventory::unordered_contrasts() const {
  PairList out;
  for (const auto& [feature, pairs] : features) {
    for (const auto& [lo, hi] : pairs) {
      std::pair<std::string, std::string> key = std::minmax(lo, hi);
      if (std::find(out.begin(), out.end(), key) == out.end())
        out.push_back(std::move(key));
    }
  }
  return out;
}

const ModalityInfo* Corpus::find_modality(const std::string& name) const {
  for (const ModalityInfo& m : modalities)
    if (m.name == name) return &m;
  return nullptr;
}

const UtteranceRecord* Corpus::find_utterance(const std::string& id) const {
  for (const UtteranceRecord& utt : utterances)
    if (utt.id == id) return &utt;
  return nullptr;
}

PhoneInventory load_inventory(const std::filesystem::path& path) {
  const Json doc = read_json_file(path);
  if (!doc.is_object() || !doc.contains("phones") || !doc.contains("features"))
    fail(ErrorCode::MalformedManifest,
         path.string() + ": inventory needs `phones` and `features`");
  PhoneInventory inv;
  for (const auto& p : doc.at("phones")) inv.phones.push_back(p.get<std::string>());
  for (const auto& [feature, pairs] : doc.at("features").items()) {
    PhoneInventory::PairList list;
    for (const auto& pair : pairs) {
      if (!pair.is_array() || pair.size() != 2)
        fail(ErrorCode::MalformedManifest,
             path.string() + ": opposition pairs must be two-element arrays");
      list.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
    }
    inv.features.emplace_back(feature, std::move(list));
  }
  if (doc.contains("visual_features"))
    for (const auto& f : doc.at("visual_features"))
      inv.visual_features.push_back(f.get<std::string>());
  return inv;
}

void write_inventory(const std::filesystem::path& path,
                     const PhoneInventory& inventory) {
  Json doc;
  doc["phones"] = inventory.phones;
  Json features = Json::object();
  for (const auto& [feature, pairs] : inventory.features) {
    Json list = Json::array();
    for (const auto& [lo, hi] : pairs) list.push_back(Json::array({lo, hi}));
    features[feature] = std::move(list);
  }
  doc["features"] = std::move(features);
  doc["visual_features"] = inventory.visual_features;
  write_json_file(path, doc);
}

namespace {

std::vector<Segment> load_tier(const std::filesystem::path& base,
                               const std::string& relative) {
  return read_segments_tsv(base / relative);
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& manifest_path) {
  const Json doc = read_json_file(manifest_path);
  if (!doc.is_object() || !doc.contains("modalities") ||
      !doc.contains("utterances") || !doc.contains("inventory"))
    fail(ErrorCode::MalformedManifest,
         manifest_path.string() +
             ": manifest needs `modalities`, `utterances`, `inventory`");
  const std::filesystem::path base = manifest_path.parent_path();

  Corpus corpus;
  for (const auto& m : doc.at("modalities")) {
    ModalityInfo info;
    info.name = m.at("name").get<std::string>();
    info.dim = m.at("dim").get<int>();
    info.fps = m.at("fps").get<double>();
    if (info.dim < 1 || info.fps <= 0.0)
      fail(ErrorCode::MalformedManifest,
           "modality " + info.name + " has invalid dim or fps");
    corpus.modalities.push_back(std::move(info));
  }

  corpus.inventory =
      load_inventory(base / doc.at("inventory").get<std::string>());

  for (const auto& u : doc.at("utterances")) {
    UtteranceRecord utt;
    utt.id = u.at("id").get<std::string>();
    utt.speaker = u.at("speaker").get<std::string>();
    for (const auto& [modality, rel_path] : u.at("features").items()) {
      const ModalityInfo* info = corpus.find_modality(modality);
      if (info == nullptr)
        fail(ErrorCode::MalformedManifest,
             utt.id + ": feature stream for undeclared modality " + modality);
      FeatureSeq seq;
      seq.data = read_wsmf(base / rel_path.get<std::string>());
      seq.fps = info->fps;
      if (seq.dim() != info->dim)
        fail(ErrorCode::DimensionMismatch,
             utt.id + "/" + modality + ": file has " +
                 std::to_string(seq.dim()) + " columns, modality declares " +
                 std::to_string(info->dim));
      utt.features.emplace(modality, std::move(seq));
    }
    utt.words = load_tier(base, u.at("words").get<std::string>());
    utt.phones = load_tier(base, u.at("phones").get<std::string>());
    corpus.speakers.insert(utt.speaker);
    corpus.utterances.push_back(std::move(utt));
  }

  const ValidationReport report = validate_corpus(corpus);
  if (!report.ok())
    fail(ErrorCode::MalformedManifest,
         manifest_path.string() + ": " + report.violations.front().where +
             ": " + report.violations.front().message);
  return corpus;
}

namespace {

void validate_tier(const UtteranceRecord& utt, const std::vector<Segment>& tier,
                   const char* tier_name, std::int64_t frames,
                   ValidationReport& report) {
  for (std::size_t i = 0; i < tier.size(); ++i) {
    const Segment& seg = tier[i];
    if (seg.start_frame >= seg.end_frame)
      report.violations.push_back(
          {utt.id, std::string(tier_name) + " segment `" + seg.label +
                       "` has start >= end"});
    if (seg.start_frame < 0 || seg.end_frame > frames)
      report.violations.push_back(
          {utt.id, std::string(tier_name) + " segment `" + seg.label +
                       "` [" + std::to_string(seg.start_frame) + "," +
                       std::to_string(seg.end_frame) + ") outside utterance (" +
                       std::to_string(frames) + " frames)"});
    if (i > 0) {
      const Segment& prev = tier[i - 1];
      if (seg.start_frame < prev.start_frame)
        report.violations.push_back(
            {utt.id, std::string(tier_name) + " segments `" + prev.label +
                         "` and `" + seg.label + "` are out of order"});
      else if (seg.start_frame < prev.end_frame)
        report.violations.push_back(
            {utt.id, std::string(tier_name) + " segments `" + prev.label +
                         "` and `" + seg.label + "` overlap"});
    }
  }
}

}  // namespace

ValidationReport validate_corpus(const Corpus& corpus) {
  ValidationReport report;

  for (const auto& [feature, pairs] : corpus.inventory.features) {
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& [lo, hi] : pairs) {
      for (const std::string& phone : {lo, hi}) {
        if (std::find(corpus.inventory.phones.begin(),
                      corpus.inventory.phones.end(),
                      phone) == corpus.inventory.phones.end())
          report.violations.push_back(
              {"", "inventory: phone `" + phone + "` of feature " + feature +
                       " missing from phone list"});
      }
      if (!seen.insert(std::minmax(lo, hi)).second)
        report.violations.push_back(
            {"", "inventory: pair [" + lo + "," + hi +
                     "] listed twice under feature " + feature});
    }
  }

  for (const std::string& speaker : corpus.speakers)
    report.utterances_per_speaker[speaker] = 0;

  for (const UtteranceRecord& utt : corpus.utterances) {
    if (corpus.speakers.count(utt.speaker) == 0)
      report.violations.push_back(
          {utt.id, "references unknown speaker `" + utt.speaker + "`"});
    else
      report.utterances_per_speaker[utt.speaker] += 1;

    for (const ModalityInfo& info : corpus.modalities) {
      const auto it = utt.features.find(info.name);
      if (it == utt.features.end()) {
        report.violations.push_back(
            {utt.id, "missing feature stream for modality " + info.name});
        continue;
      }
      if (it->second.dim() != info.dim)
        report.violations.push_back(
            {utt.id, "modality " + info.name + " has dimension " +
                         std::to_string(it->second.dim()) + ", declared " +
                         std::to_string(info.dim)});
      if (!it->second.data.allFinite())
        report.violations.push_back(
            {utt.id, "modality " + info.name + " has non-finite values"});
    }

    const std::int64_t frames = utt.canonical_frames();
    validate_tier(utt, utt.words, "word", frames, report);
    validate_tier(utt, utt.phones, "phone", frames, report);

    for (const Segment& word : utt.words)
      report.tokens_per_word[word.label] += 1;
  }

  for (const auto& [speaker, count] : report.utterances_per_speaker)
    if (count == 0)
      report.warnings.push_back(
          {"", "speaker `" + speaker + "` has no utterances"});

  return report;
}

std::vector<WordToken> word_tokens(const Corpus& corpus) {
  std::vector<WordToken> tokens;
  for (std::size_t ui = 0; ui < corpus.utterances.size(); ++ui) {
    const UtteranceRecord& utt = corpus.utterances[ui];
    for (const Segment& word : utt.words) {
      WordToken token;
      token.label = word.label;
      token.utterance_id = utt.id;
      token.speaker_id = utt.speaker;
      token.start_frame = word.start_frame;
      token.end_frame = word.end_frame;
      token.utterance_index = ui;
      tokens.push_back(std::move(token));
    }
  }
  return tokens;
}

std::map<std::string, std::vector<std::size_t>> group_tokens_by_label(
    const std::vector<WordToken>& tokens) {
  std::map<std::string, std::vector<std::size_t>> index;
  for (std::size_t i = 0; i < tokens.size(); ++i)
    index[tokens[i].label].push_back(i);
  return index;
}

std::vector<TriphoneToken> triphone_tokens(const Corpus& corpus,
                                           const PhoneInventory& inventory) {
  std::vector<TriphoneToken> tokens;
  for (std::size_t ui = 0; ui < corpus.utterances.size(); ++ui) {
    const UtteranceRecord& utt = corpus.utterances[ui];
    if (utt.phones.size() < 3) continue;
    for (std::size_t i = 0; i + 2 < utt.phones.size(); ++i) {
      const Segment& left = utt.phones[i];
      const Segment& center = utt.phones[i + 1];
      const Segment& right = utt.phones[i + 2];
      if (!inventory.participates_in_opposition(center.label)) continue;
      TriphoneToken token;
      token.left = left.label;
      token.center = center.label;
      token.right = right.label;
      token.utterance_id = utt.id;
      token.speaker_id = utt.speaker;
      token.start_frame = left.start_frame;
      token.end_frame = right.end_frame;
      token.center_start = center.start_frame;
      token.center_end = center.end_frame;
      token.utterance_index = ui;
      tokens.push_back(std::move(token));
    }
  }
  return tokens;
}

}  // namespace wsm
