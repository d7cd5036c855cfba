// wsm/synth.hpp

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

#ifndef WSM_SYNTH_HPP
#define WSM_SYNTH_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "wsm/corpus.hpp"
#include "wsm/io.hpp"
#include "wsm/types.hpp"

namespace wsm {

/// Synthetic corpus generator. Audio prototypes are keyed by phone identity,
/// so audio separates every contrast; visual prototypes are keyed by the
/// phone's visual feature values only, so phones differing in non-visual
/// features look identical. Everything else is speaker offsets plus noise.
struct SynthConfig {
  std::vector<std::string> phones;
  std::vector<std::pair<std::string, PhoneInventory::PairList>> feature_pairs;
  std::vector<std::string> visual_features;
  /// phone -> visual feature -> value in {-1, 0, +1}; phones sharing a value
  /// tuple share a visual prototype.
  std::map<std::string, std::map<std::string, int>> visual_values;

  int speakers = 6;
  int words = 40;
  int word_min_phones = 2;
  int word_max_phones = 4;
  int tokens_per_word_per_speaker = 3;
  int words_per_utterance_min = 3;
  int words_per_utterance_max = 8;

  int eval_contexts_per_pair = 2;
  int eval_tokens_per_word_per_speaker = 3;

  int frames_per_phone_min = 5;
  int frames_per_phone_max = 15;
  int audio_dim = 40;
  int visual_dim = 40;
  double speaker_offset_scale = 0.25;
  double audio_noise = 0.3;
  double visual_noise = 0.3;
  /// Per-utterance additive offset on the visual stream, the analogue of
  /// lighting and head-pose drift between recordings. Phone-independent, so
  /// it leaves the modality asymmetry intact.
  double visual_session_scale = 0.5;
  int smoothing_width = 3;
  double min_prototype_distance = 1.0;
  double min_visual_class_distance = 1.0;
  std::uint64_t seed = 0;

  static SynthConfig defaults();
  PhoneInventory inventory() const;
  void check_valid() const;

  Json to_json() const;
  /// Defaults overridden by whatever keys the document provides.
  static SynthConfig from_json(const Json& doc);
};

struct SynthOutput {
  std::filesystem::path manifest;        // everything
  std::filesystem::path train_manifest;  // multi-word training utterances
  std::filesystem::path eval_manifest;   // single-word minimal-pair utterances
};

/// Write a corpus under out_dir: WSMF features, TSV tiers, inventory, and the
/// three manifests. The evaluation set realizes every opposition pair of
/// every feature as minimal-pair triphone words for every speaker.
/// Byte-deterministic given the seed.
SynthOutput generate_corpus(const SynthConfig& config,
                            const std::filesystem::path& out_dir);

/// Which contrasts are separable in which modality, by construction.
struct OracleReport {
  struct Contrast {
    std::string phone_a;
    std::string phone_b;
    std::vector<std::string> features;
    bool audio_separable = true;
    bool visual_separable = false;
  };
  std::vector<Contrast> contrasts;

  const Contrast* find(const std::string& a, const std::string& b) const;
  Json to_json() const;
};

OracleReport oracle_report(const SynthConfig& config);

}  // namespace wsm

#endif  // WSM_SYNTH_HPP
