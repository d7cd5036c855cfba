// wsm/synth.cpp

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

#include "wsm/synth.hpp"

#include <algorithm>
#include <set>

#include "wsm/error.hpp"
#include "wsm/rng.hpp"

namespace wsm {

SynthConfig SynthConfig::defaults() {
  SynthConfig cfg;
  cfg.phones = {"a",  "an", "E", "En", "e", "eu", "i", "y", "b",
                "d",  "p",  "t", "g",  "k", "m",  "n", "v", "s"};
  cfg.feature_pairs = {
      {"round", {{"e", "eu"}, {"i", "y"}}},
      {"coronal_labial", {{"d", "b"}, {"t", "p"}, {"n", "m"}}},
      {"coronal_dorsal", {{"d", "g"}, {"t", "k"}}},
      {"continuant", {{"b", "v"}, {"t", "s"}}},
      {"nasal_vowel", {{"a", "an"}, {"E", "En"}}},
      {"nasal_consonant", {{"b", "m"}, {"d", "n"}}},
      {"mid_high", {{"e", "i"}, {"eu", "y"}}},
      {"voice", {{"p", "b"}, {"t", "d"}, {"k", "g"}}},
  };
  cfg.visual_features = {"round", "coronal_labial"};
  // Lip rounding is visible on vowels, labiality on consonants; everything
  // else leaves the mouth image unchanged.
  const std::vector<std::string> rounded = {"eu", "y"};
  const std::vector<std::string> unrounded = {"E", "En", "e", "i"};
  const std::vector<std::string> labial = {"b", "p", "m", "v"};
  const std::vector<std::string> nonlabial = {"d", "t", "g", "k", "n", "s"};
  for (const std::string& p : cfg.phones)
    cfg.visual_values[p] = {{"round", 0}, {"coronal_labial", 0}};
  for (const std::string& p : rounded) cfg.visual_values[p]["round"] = 1;
  for (const std::string& p : unrounded) cfg.visual_values[p]["round"] = -1;
  for (const std::string& p : labial)
    cfg.visual_values[p]["coronal_labial"] = 1;
  for (const std::string& p : nonlabial)
    cfg.visual_values[p]["coronal_labial"] = -1;
  return cfg;
}

PhoneInventory SynthConfig::inventory() const {
  PhoneInventory inv;
  inv.phones = phones;
  inv.features = feature_pairs;
  inv.visual_features = visual_features;
  return inv;
}

void SynthConfig::check_valid() const {
  if (speakers < 2)
    fail(ErrorCode::ConfigInfeasible, "across-speaker tasks need >= 2 speakers");
  if (phones.size() < 2 || feature_pairs.empty())
    fail(ErrorCode::ConfigInfeasible, "inventory too small");
  if (word_min_phones < 1 || word_max_phones < word_min_phones)
    fail(ErrorCode::ConfigInfeasible, "bad word length range");
  if (frames_per_phone_min < 1 || frames_per_phone_max < frames_per_phone_min)
    fail(ErrorCode::ConfigInfeasible, "bad phone duration range");
  if (smoothing_width < 1 || smoothing_width % 2 == 0)
    fail(ErrorCode::ConfigInfeasible, "smoothing width must be odd");
  if (eval_tokens_per_word_per_speaker < 2)
    fail(ErrorCode::ConfigInfeasible,
         "within-speaker ABX needs >= 2 evaluation tokens per word");
  for (const auto& [feature, pairs] : feature_pairs)
    for (const auto& [lo, hi] : pairs)
      for (const std::string& p : {lo, hi})
        if (std::find(phones.begin(), phones.end(), p) == phones.end())
          fail(ErrorCode::ConfigInfeasible,
               "opposition phone `" + p + "` not in phone list");
  for (const std::string& p : phones)
    if (visual_values.find(p) == visual_values.end())
      fail(ErrorCode::ConfigInfeasible,
           "phone `" + p + "` has no visual feature values");
}

namespace {

using VisualKey = std::vector<int>;

VisualKey visual_key(const SynthConfig& cfg, const std::string& phone) {
  VisualKey key;
  const auto& values = cfg.visual_values.at(phone);
  for (const std::string& feature : cfg.visual_features) {
    const auto it = values.find(feature);
    key.push_back(it == values.end() ? 0 : it->second);
  }
  return key;
}

Vector draw_separated_unit(Rng& rng, int dim,
                           const std::vector<Vector>& existing,
                           double min_distance) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = rng.normal();
    const double norm = v.norm();
    if (norm == 0.0) continue;
    v /= norm;
    bool ok = true;
    for (const Vector& other : existing)
      if ((v - other).norm() < min_distance) ok = false;
    if (ok) return v;
  }
  fail(ErrorCode::ConfigInfeasible,
       "cannot place prototypes at the requested minimum distance");
}

Matrix smooth_moving_average(const Matrix& frames, int width) {
  if (width == 1) return frames;
  const int half = width / 2;
  Matrix out(frames.rows(), frames.cols());
  for (Index t = 0; t < frames.rows(); ++t) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(frames.cols());
    for (int k = -half; k <= half; ++k) {
      const Index src = std::clamp<Index>(t + k, 0, frames.rows() - 1);
      acc += frames.row(src);
    }
    out.row(t) = acc / static_cast<double>(width);
  }
  return out;
}

struct PlannedWord {
  std::string label;
  std::vector<std::string> phones;
};

struct PlannedUtterance {
  std::string id;
  std::string speaker;
  std::vector<const PlannedWord*> words;
};

}  // namespace

SynthOutput generate_corpus(const SynthConfig& config,
                            const std::filesystem::path& out_dir) {
  config.check_valid();
  Rng rng = substream(config.seed, "synth");

  // Prototypes: unit vectors with enforced pairwise separation. Audio is
  // keyed by phone identity; visual only by the visual feature value tuple.
  std::map<std::string, Vector> audio_proto;
  {
    std::vector<Vector> drawn;
    for (const std::string& phone : config.phones) {
      drawn.push_back(draw_separated_unit(rng, config.audio_dim, drawn,
                                          config.min_prototype_distance));
      audio_proto[phone] = drawn.back();
    }
  }
  std::map<std::string, Vector> visual_proto;  // phone -> class prototype
  {
    std::vector<VisualKey> keys;
    std::vector<Vector> drawn;
    for (const std::string& phone : config.phones) {
      const VisualKey key = visual_key(config, phone);
      const auto it = std::find(keys.begin(), keys.end(), key);
      if (it == keys.end()) {
        keys.push_back(key);
        drawn.push_back(draw_separated_unit(rng, config.visual_dim, drawn,
                                            config.min_visual_class_distance));
        visual_proto[phone] = drawn.back();
      } else {
        visual_proto[phone] = drawn[static_cast<std::size_t>(
            std::distance(keys.begin(), it))];
      }
    }
  }

  std::vector<std::string> speakers;
  std::map<std::string, Vector> offset_audio, offset_visual;
  for (int s = 0; s < config.speakers; ++s) {
    char name[16];
    std::snprintf(name, sizeof(name), "spk%02d", s);
    speakers.emplace_back(name);
    Vector oa(config.audio_dim), ov(config.visual_dim);
    for (int i = 0; i < config.audio_dim; ++i)
      oa[i] = rng.normal() * config.speaker_offset_scale;
    for (int i = 0; i < config.visual_dim; ++i)
      ov[i] = rng.normal() * config.speaker_offset_scale;
    offset_audio[speakers.back()] = std::move(oa);
    offset_visual[speakers.back()] = std::move(ov);
  }

  // Training lexicon: short words, most arranged in minimal pairs that swap
  // one phone, preferring a swap within the same visual class. Dense lexical
  // neighborhoods are what forces the contrastive loss to resolve phone
  // detail instead of coarse word shape.
  std::vector<PlannedWord> train_words;
  {
    std::set<std::vector<std::string>> used;
    const auto random_word = [&]() {
      const int len =
          config.word_min_phones +
          static_cast<int>(rng.uniform_int(
              config.word_max_phones - config.word_min_phones + 1));
      std::vector<std::string> phones;
      for (int i = 0; i < len; ++i)
        phones.push_back(config.phones[rng.uniform_int(config.phones.size())]);
      return phones;
    };
    const auto add_word = [&](std::vector<std::string> phones) {
      if (!used.insert(phones).second) return false;
      char label[16];
      std::snprintf(label, sizeof(label), "w%03zu", train_words.size());
      train_words.push_back({label, std::move(phones)});
      return true;
    };
    int family = 0;
    while (static_cast<int>(train_words.size()) < config.words) {
      std::vector<std::string> base = random_word();
      if (!add_word(base)) continue;
      ++family;
      if (family % 3 == 0 ||
          static_cast<int>(train_words.size()) >= config.words)
        continue;
      std::vector<std::string> variant = base;
      const std::size_t pos = rng.uniform_int(variant.size());
      const std::string& original = variant[pos];
      std::vector<std::string> same_class;
      for (const std::string& phone : config.phones)
        if (phone != original &&
            visual_key(config, phone) == visual_key(config, original))
          same_class.push_back(phone);
      if (!same_class.empty()) {
        variant[pos] = same_class[rng.uniform_int(same_class.size())];
      } else {
        std::string other;
        do {
          other = config.phones[rng.uniform_int(config.phones.size())];
        } while (other == original);
        variant[pos] = other;
      }
      add_word(std::move(variant));
    }
  }

  // Evaluation lexicon: for every opposition pair, minimal-pair triphone
  // words sharing drawn contexts.
  std::vector<PlannedWord> eval_words;
  std::set<std::string> eval_labels;
  for (const auto& [feature, pairs] : config.feature_pairs) {
    for (const auto& [lo, hi] : pairs) {
      std::set<std::pair<std::string, std::string>> used_contexts;
      for (int c = 0; c < config.eval_contexts_per_pair; ++c) {
        std::string left, right;
        for (int attempt = 0; attempt < 1000; ++attempt) {
          left = config.phones[rng.uniform_int(config.phones.size())];
          right = config.phones[rng.uniform_int(config.phones.size())];
          if (left == lo || left == hi || right == lo || right == hi) continue;
          if (used_contexts.count({left, right})) continue;
          break;
        }
        used_contexts.insert({left, right});
        for (const std::string& center : {lo, hi}) {
          const std::string label = "e-" + left + "-" + center + "-" + right;
          if (!eval_labels.insert(label).second) continue;
          eval_words.push_back({label, {left, center, right}});
        }
      }
    }
  }

  // Utterance plan: training tokens shuffled into multi-word utterances,
  // evaluation tokens as single-word utterances.
  std::vector<PlannedUtterance> plan;
  for (const std::string& speaker : speakers) {
    std::vector<const PlannedWord*> tokens;
    for (const PlannedWord& word : train_words)
      for (int k = 0; k < config.tokens_per_word_per_speaker; ++k)
        tokens.push_back(&word);
    rng.shuffle(tokens);
    std::size_t consumed = 0;
    int index = 0;
    while (consumed < tokens.size()) {
      const int span_words =
          config.words_per_utterance_min +
          static_cast<int>(rng.uniform_int(config.words_per_utterance_max -
                                           config.words_per_utterance_min + 1));
      PlannedUtterance utt;
      char id[48];
      std::snprintf(id, sizeof(id), "train_%s_%03d", speaker.c_str(), index++);
      utt.id = id;
      utt.speaker = speaker;
      for (int k = 0; k < span_words && consumed < tokens.size(); ++k)
        utt.words.push_back(tokens[consumed++]);
      plan.push_back(std::move(utt));
    }
    index = 0;
    for (const PlannedWord& word : eval_words) {
      for (int k = 0; k < config.eval_tokens_per_word_per_speaker; ++k) {
        PlannedUtterance utt;
        char id[48];
        std::snprintf(id, sizeof(id), "eval_%s_%04d", speaker.c_str(), index++);
        utt.id = id;
        utt.speaker = speaker;
        utt.words.push_back(&word);
        plan.push_back(std::move(utt));
      }
    }
  }

  // Synthesize and write.
  std::filesystem::create_directories(out_dir / "features");
  std::filesystem::create_directories(out_dir / "annotations");
  write_inventory(out_dir / "inventory.json", config.inventory());

  Json all_utts = Json::array();
  Json train_utts = Json::array();
  Json eval_utts = Json::array();

  const int duration_range =
      config.frames_per_phone_max - config.frames_per_phone_min + 1;
  for (const PlannedUtterance& utt : plan) {
    std::vector<Segment> words, phones;
    std::int64_t cursor = 0;
    for (const PlannedWord* word : utt.words) {
      const std::int64_t word_start = cursor;
      for (const std::string& phone : word->phones) {
        const std::int64_t len =
            config.frames_per_phone_min +
            static_cast<std::int64_t>(rng.uniform_int(duration_range));
        phones.push_back({phone, cursor, cursor + len});
        cursor += len;
      }
      words.push_back({word->label, word_start, cursor});
    }
    const Index total = cursor;

    const auto synthesize = [&](const std::map<std::string, Vector>& protos,
                                const Vector& offset, int dim, double noise) {
      Matrix frames(total, dim);
      for (const Segment& seg : phones) {
        const Vector base = protos.at(seg.label) + offset;
        for (std::int64_t t = seg.start_frame; t < seg.end_frame; ++t)
          frames.row(t) = base.transpose();
      }
      if (noise > 0.0)
        for (Index t = 0; t < total; ++t)
          for (Index d = 0; d < dim; ++d) frames(t, d) += rng.normal() * noise;
      return smooth_moving_average(frames, config.smoothing_width);
    };
    const Matrix audio = synthesize(audio_proto, offset_audio.at(utt.speaker),
                                    config.audio_dim, config.audio_noise);
    Vector session = offset_visual.at(utt.speaker);
    if (config.visual_session_scale > 0.0)
      for (Index d = 0; d < config.visual_dim; ++d)
        session[d] += rng.normal() * config.visual_session_scale;
    const Matrix visual = synthesize(visual_proto, session, config.visual_dim,
                                     config.visual_noise);

    const std::string audio_file = "features/" + utt.id + ".audio.wsmf";
    const std::string visual_file = "features/" + utt.id + ".visual.wsmf";
    const std::string words_file = "annotations/" + utt.id + ".words.tsv";
    const std::string phones_file = "annotations/" + utt.id + ".phones.tsv";
    write_wsmf(out_dir / audio_file, audio);
    write_wsmf(out_dir / visual_file, visual);
    write_segments_tsv(out_dir / words_file, words);
    write_segments_tsv(out_dir / phones_file, phones);

    Json entry;
    entry["id"] = utt.id;
    entry["speaker"] = utt.speaker;
    entry["features"] = Json{{"audio", audio_file}, {"visual", visual_file}};
    entry["words"] = words_file;
    entry["phones"] = phones_file;
    all_utts.push_back(entry);
    if (utt.id.rfind("train_", 0) == 0)
      train_utts.push_back(entry);
    else
      eval_utts.push_back(entry);
  }

  const auto write_manifest = [&](const std::filesystem::path& path,
                                  const Json& utts) {
    Json doc;
    Json mods = Json::array();
    mods.push_back(Json{{"name", "audio"},
                        {"dim", config.audio_dim},
                        {"fps", kCanonicalFps}});
    mods.push_back(Json{{"name", "visual"},
                        {"dim", config.visual_dim},
                        {"fps", kCanonicalFps}});
    doc["modalities"] = std::move(mods);
    doc["inventory"] = "inventory.json";
    doc["utterances"] = utts;
    write_json_file(path, doc);
  };

  SynthOutput out;
  out.manifest = out_dir / "manifest.json";
  out.train_manifest = out_dir / "train_manifest.json";
  out.eval_manifest = out_dir / "eval_manifest.json";
  write_manifest(out.manifest, all_utts);
  write_manifest(out.train_manifest, train_utts);
  write_manifest(out.eval_manifest, eval_utts);
  return out;
}

const OracleReport::Contrast* OracleReport::find(const std::string& a,
                                                 const std::string& b) const {
  const auto [lo, hi] = std::minmax(a, b);
  for (const Contrast& c : contrasts)
    if (c.phone_a == lo && c.phone_b == hi) return &c;
  return nullptr;
}

Json OracleReport::to_json() const {
  Json doc = Json::array();
  for (const Contrast& c : contrasts) {
    Json entry;
    entry["a"] = c.phone_a;
    entry["b"] = c.phone_b;
    entry["features"] = c.features;
    entry["audio_separable"] = c.audio_separable;
    entry["visual_separable"] = c.visual_separable;
    doc.push_back(std::move(entry));
  }
  return doc;
}

OracleReport oracle_report(const SynthConfig& config) {
  config.check_valid();
  OracleReport report;
  for (const auto& [feature, pairs] : config.feature_pairs) {
    for (const auto& [a, b] : pairs) {
      const auto [lo, hi] = std::minmax(a, b);
      OracleReport::Contrast* existing = nullptr;
      for (OracleReport::Contrast& c : report.contrasts)
        if (c.phone_a == lo && c.phone_b == hi) existing = &c;
      if (existing != nullptr) {
        existing->features.push_back(feature);
        continue;
      }
      OracleReport::Contrast c;
      c.phone_a = lo;
      c.phone_b = hi;
      c.features.push_back(feature);
      c.audio_separable = true;  // distinct phones, distinct audio prototypes
      c.visual_separable = visual_key(config, lo) != visual_key(config, hi);
      report.contrasts.push_back(std::move(c));
    }
  }
  return report;
}

Json SynthConfig::to_json() const {
  Json doc;
  doc["phones"] = phones;
  Json features = Json::object();
  for (const auto& [feature, pairs] : feature_pairs) {
    Json list = Json::array();
    for (const auto& [lo, hi] : pairs) list.push_back(Json::array({lo, hi}));
    features[feature] = std::move(list);
  }
  doc["features"] = std::move(features);
  doc["visual_features"] = visual_features;
  Json values = Json::object();
  for (const auto& [phone, map] : visual_values) {
    Json entry = Json::object();
    for (const auto& [feature, value] : map) entry[feature] = value;
    values[phone] = std::move(entry);
  }
  doc["visual_values"] = std::move(values);
  doc["speakers"] = speakers;
  doc["words"] = words;
  doc["word_min_phones"] = word_min_phones;
  doc["word_max_phones"] = word_max_phones;
  doc["tokens_per_word_per_speaker"] = tokens_per_word_per_speaker;
  doc["words_per_utterance_min"] = words_per_utterance_min;
  doc["words_per_utterance_max"] = words_per_utterance_max;
  doc["eval_contexts_per_pair"] = eval_contexts_per_pair;
  doc["eval_tokens_per_word_per_speaker"] = eval_tokens_per_word_per_speaker;
  doc["frames_per_phone_min"] = frames_per_phone_min;
  doc["frames_per_phone_max"] = frames_per_phone_max;
  doc["audio_dim"] = audio_dim;
  doc["visual_dim"] = visual_dim;
  doc["speaker_offset_scale"] = speaker_offset_scale;
  doc["audio_noise"] = audio_noise;
  doc["visual_noise"] = visual_noise;
  doc["visual_session_scale"] = visual_session_scale;
  doc["smoothing_width"] = smoothing_width;
  doc["min_prototype_distance"] = min_prototype_distance;
  doc["min_visual_class_distance"] = min_visual_class_distance;
  doc["seed"] = seed;
  return doc;
}

SynthConfig SynthConfig::from_json(const Json& doc) {
  SynthConfig cfg = defaults();
  if (doc.contains("phones"))
    cfg.phones = doc.at("phones").get<std::vector<std::string>>();
  if (doc.contains("features")) {
    cfg.feature_pairs.clear();
    for (const auto& [feature, pairs] : doc.at("features").items()) {
      PhoneInventory::PairList list;
      for (const auto& pair : pairs)
        list.emplace_back(pair[0].get<std::string>(),
                          pair[1].get<std::string>());
      cfg.feature_pairs.emplace_back(feature, std::move(list));
    }
  }
  if (doc.contains("visual_features"))
    cfg.visual_features =
        doc.at("visual_features").get<std::vector<std::string>>();
  if (doc.contains("visual_values")) {
    cfg.visual_values.clear();
    for (const auto& [phone, entry] : doc.at("visual_values").items())
      for (const auto& [feature, value] : entry.items())
        cfg.visual_values[phone][feature] = value.get<int>();
  }
  cfg.speakers = doc.value("speakers", cfg.speakers);
  cfg.words = doc.value("words", cfg.words);
  cfg.word_min_phones = doc.value("word_min_phones", cfg.word_min_phones);
  cfg.word_max_phones = doc.value("word_max_phones", cfg.word_max_phones);
  cfg.tokens_per_word_per_speaker =
      doc.value("tokens_per_word_per_speaker", cfg.tokens_per_word_per_speaker);
  cfg.words_per_utterance_min =
      doc.value("words_per_utterance_min", cfg.words_per_utterance_min);
  cfg.words_per_utterance_max =
      doc.value("words_per_utterance_max", cfg.words_per_utterance_max);
  cfg.eval_contexts_per_pair =
      doc.value("eval_contexts_per_pair", cfg.eval_contexts_per_pair);
  cfg.eval_tokens_per_word_per_speaker =
      doc.value("eval_tokens_per_word_per_speaker",
                cfg.eval_tokens_per_word_per_speaker);
  cfg.frames_per_phone_min =
      doc.value("frames_per_phone_min", cfg.frames_per_phone_min);
  cfg.frames_per_phone_max =
      doc.value("frames_per_phone_max", cfg.frames_per_phone_max);
  cfg.audio_dim = doc.value("audio_dim", cfg.audio_dim);
  cfg.visual_dim = doc.value("visual_dim", cfg.visual_dim);
  cfg.speaker_offset_scale =
      doc.value("speaker_offset_scale", cfg.speaker_offset_scale);
  cfg.audio_noise = doc.value("audio_noise", cfg.audio_noise);
  cfg.visual_noise = doc.value("visual_noise", cfg.visual_noise);
  cfg.visual_session_scale =
      doc.value("visual_session_scale", cfg.visual_session_scale);
  cfg.smoothing_width = doc.value("smoothing_width", cfg.smoothing_width);
  cfg.min_prototype_distance =
      doc.value("min_prototype_distance", cfg.min_prototype_distance);
  cfg.min_visual_class_distance =
      doc.value("min_visual_class_distance", cfg.min_visual_class_distance);
  cfg.seed = doc.value("seed", cfg.seed);
  return cfg;
}

}  // namespace wsm
