// wsm/corpus.hpp

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

#ifndef WSM_CORPUS_HPP
#define WSM_CORPUS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wsm/types.hpp"

namespace wsm {

struct UtteranceRecord {
  std::string id;
  std::string speaker;
  std::map<std::string, FeatureSeq> features;  // keyed by modality name
  std::vector<Segment> words;
  std::vector<Segment> phones;

  /// Frame count of this utterance at the canonical annotation rate.
  std::int64_t canonical_frames() const;
};

/// Phone set plus the minimal-opposition pair lists, grouped by phonological
/// feature, in file order. Within a pair the first phone is the
/// feature-negative pole and the second the feature-positive pole.
struct PhoneInventory {
  using PairList = std::vector<std::pair<std::string, std::string>>;

  std::vector<std::string> phones;
  std::vector<std::pair<std::string, PairList>> features;
  std::vector<std::string> visual_features;

  const PairList* find_feature(const std::string& name) const;
  bool is_visual(const std::string& feature) const;
  bool participates_in_opposition(const std::string& phone) const;
  /// Unordered contrasts across all features, deduplicated, in first-seen
  /// order; each pair is stored with lexicographically smaller phone first.
  PairList unordered_contrasts() const;
};

struct Corpus {
  std::vector<ModalityInfo> modalities;
  std::set<std::string> speakers;
  std::vector<UtteranceRecord> utterances;
  PhoneInventory inventory;

  const ModalityInfo* find_modality(const std::string& name) const;
  const UtteranceRecord* find_utterance(const std::string& id) const;
  const UtteranceRecord& utterance_at(std::size_t index) const {
    return utterances[index];
  }
};

struct ValidationIssue {
  std::string where;  // utterance id or "" for corpus-level issues
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> violations;
  std::vector<ValidationIssue> warnings;
  std::map<std::string, std::size_t> utterances_per_speaker;
  std::map<std::string, std::size_t> tokens_per_word;

  bool ok() const { return violations.empty(); }
};

struct WordToken {
  std::string label;
  std::string utterance_id;
  std::string speaker_id;
  std::int64_t start_frame = 0;
  std::int64_t end_frame = 0;
  std::size_t utterance_index = 0;

  std::int64_t length() const { return end_frame - start_frame; }
};

struct TriphoneToken {
  std::string left;
  std::string center;
  std::string right;
  std::string utterance_id;
  std::string speaker_id;
  std::int64_t start_frame = 0;       // union span of the three phones
  std::int64_t end_frame = 0;
  std::int64_t center_start = 0;
  std::int64_t center_end = 0;
  std::size_t utterance_index = 0;
};

PhoneInventory load_inventory(const std::filesystem::path& path);
void write_inventory(const std::filesystem::path& path,
                     const PhoneInventory& inventory);

/// Load a corpus from a manifest file. Feature matrices are read eagerly.
/// Throws if the result would not pass validate_corpus.
Corpus load_corpus(const std::filesystem::path& manifest_path);

ValidationReport validate_corpus(const Corpus& corpus);

std::vector<WordToken> word_tokens(const Corpus& corpus);

std::map<std::string, std::vector<std::size_t>> group_tokens_by_label(
    const std::vector<WordToken>& tokens);

/// Every consecutive phone triple whose center phone participates in at least
/// one opposition pair of the inventory.
std::vector<TriphoneToken> triphone_tokens(const Corpus& corpus,
                                           const PhoneInventory& inventory);

}  // namespace wsm

#endif  // WSM_CORPUS_HPP
