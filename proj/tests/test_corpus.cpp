// tests/test_corpus.cpp

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>

#include "doctest.h"
#include "wsm/corpus.hpp"
#include "wsm/io.hpp"

using namespace wsm;
namespace fs = std::filesystem;

namespace {

// A two-utterance corpus on disk, in the manifest/WSMF/TSV layout.
struct DiskCorpus {
  fs::path dir;
  fs::path manifest;

  explicit DiskCorpus(const std::string& name) {
    dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);

    Json inv;
    inv["phones"] = {"b", "d", "a", "e", "g"};
    inv["features"]["place"] = Json::array({Json::array({"d", "b"})});
    inv["features"]["height"] = Json::array({Json::array({"a", "e"})});
    inv["visual_features"] = {"place"};
    write_json_file(dir / "inventory.json", inv);

    write_wsmf(dir / "u1.audio.wsmf", Matrix::Constant(110, 4, 0.5));
    write_wsmf(dir / "u2.audio.wsmf", Matrix::Constant(80, 4, -1.0));
    write_segments_tsv(dir / "u1.words.tsv",
                       {{"bonjour", 0, 50}, {"madame", 50, 110}});
    write_segments_tsv(dir / "u1.phones.tsv",
                       {{"b", 0, 20}, {"a", 20, 40}, {"d", 40, 70},
                        {"e", 70, 90}, {"g", 90, 110}});
    write_segments_tsv(dir / "u2.words.tsv", {{"bonjour", 10, 70}});
    write_segments_tsv(dir / "u2.phones.tsv", {{"b", 10, 40}, {"e", 40, 70}});

    Json doc;
    doc["modalities"] = Json::array({Json{{"name", "audio"}, {"dim", 4}, {"fps", 100.0}}});
    doc["inventory"] = "inventory.json";
    Json utts = Json::array();
    utts.push_back(Json{{"id", "u1"},
                        {"speaker", "spk1"},
                        {"features", Json{{"audio", "u1.audio.wsmf"}}},
                        {"words", "u1.words.tsv"},
                        {"phones", "u1.phones.tsv"}});
    utts.push_back(Json{{"id", "u2"},
                        {"speaker", "spk2"},
                        {"features", Json{{"audio", "u2.audio.wsmf"}}},
                        {"words", "u2.words.tsv"},
                        {"phones", "u2.phones.tsv"}});
    doc["utterances"] = std::move(utts);
    manifest = dir / "manifest.json";
    write_json_file(manifest, doc);
  }

  ~DiskCorpus() { fs::remove_all(dir); }
};

}  // namespace

TEST_CASE("load_corpus echoes the manifest contents") {
  DiskCorpus disk("wsm_corpus_ok");
  const Corpus corpus = load_corpus(disk.manifest);
  REQUIRE(corpus.utterances.size() == 2);
  REQUIRE(corpus.modalities.size() == 1);
  CHECK(corpus.modalities[0].name == "audio");
  CHECK(corpus.modalities[0].dim == 4);
  CHECK(corpus.speakers == std::set<std::string>{"spk1", "spk2"});
  CHECK(corpus.utterances[0].features.at("audio").frames() == 110);
  CHECK(corpus.inventory.phones.size() == 5);
  CHECK(corpus.inventory.is_visual("place"));
  CHECK_FALSE(corpus.inventory.is_visual("height"));
}

TEST_CASE("load_corpus reports a missing feature file") {
  DiskCorpus disk("wsm_corpus_missing");
  fs::remove(disk.dir / "u2.audio.wsmf");
  try {
    load_corpus(disk.manifest);
    FAIL("expected MissingFile");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingFile);
  }
}

TEST_CASE("load_corpus rejects out-of-range word segments") {
  DiskCorpus disk("wsm_corpus_range");
  write_segments_tsv(disk.dir / "u2.words.tsv", {{"bonjour", 10, 200}});
  try {
    load_corpus(disk.manifest);
    FAIL("expected MalformedManifest");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedManifest);
  }
}

TEST_CASE("load_corpus rejects feature width mismatches") {
  DiskCorpus disk("wsm_corpus_dim");
  write_wsmf(disk.dir / "u1.audio.wsmf", Matrix::Constant(110, 3, 0.5));
  try {
    load_corpus(disk.manifest);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("validate_corpus passes a clean corpus and counts things") {
  DiskCorpus disk("wsm_corpus_counts");
  const Corpus corpus = load_corpus(disk.manifest);
  const ValidationReport report = validate_corpus(corpus);
  CHECK(report.ok());
  CHECK(report.utterances_per_speaker.at("spk1") == 1);
  CHECK(report.tokens_per_word.at("bonjour") == 2);
  CHECK(report.tokens_per_word.at("madame") == 1);
}

TEST_CASE("validate_corpus flags overlapping segments with names") {
  DiskCorpus disk("wsm_corpus_overlap");
  const Corpus loaded = load_corpus(disk.manifest);
  Corpus corpus = loaded;
  corpus.utterances[0].phones[1].start_frame = 10;  // overlaps phone 0
  const ValidationReport report = validate_corpus(corpus);
  REQUIRE_FALSE(report.ok());
  CHECK(report.violations[0].where == "u1");
  CHECK(report.violations[0].message.find("overlap") != std::string::npos);
}

TEST_CASE("validate_corpus warns about speakers without utterances") {
  DiskCorpus disk("wsm_corpus_lonely");
  Corpus corpus = load_corpus(disk.manifest);
  corpus.speakers.insert("spk_silent");
  const ValidationReport report = validate_corpus(corpus);
  CHECK(report.ok());
  REQUIRE(report.warnings.size() == 1);
  CHECK(report.warnings[0].message.find("spk_silent") != std::string::npos);
}

TEST_CASE("validate_corpus flags inverted spans and unknown speakers") {
  DiskCorpus disk("wsm_corpus_bad");
  Corpus corpus = load_corpus(disk.manifest);
  corpus.utterances[1].words[0] = {"x", 30, 10};
  corpus.utterances[1].speaker = "ghost";
  const ValidationReport report = validate_corpus(corpus);
  CHECK(report.violations.size() >= 2);
}

TEST_CASE("word_tokens lists every word segment with its span") {
  DiskCorpus disk("wsm_corpus_tokens");
  const Corpus corpus = load_corpus(disk.manifest);
  const std::vector<WordToken> tokens = word_tokens(corpus);
  REQUIRE(tokens.size() == 3);
  CHECK(tokens[0].label == "bonjour");
  CHECK(tokens[0].start_frame == 0);
  CHECK(tokens[0].end_frame == 50);
  CHECK(tokens[1].label == "madame");
  CHECK(tokens[2].speaker_id == "spk2");

  const auto index = group_tokens_by_label(tokens);
  CHECK(index.at("bonjour").size() == 2);
  CHECK(index.at("madame").size() == 1);
}

TEST_CASE("word_tokens of an empty tier is empty") {
  DiskCorpus disk("wsm_corpus_empty");
  write_segments_tsv(disk.dir / "u1.words.tsv", {});
  write_segments_tsv(disk.dir / "u2.words.tsv", {});
  const Corpus corpus = load_corpus(disk.manifest);
  CHECK(word_tokens(corpus).empty());
}

TEST_CASE("triphone_tokens takes consecutive triples with opposed centers") {
  DiskCorpus disk("wsm_corpus_triphones");
  const Corpus corpus = load_corpus(disk.manifest);
  const std::vector<TriphoneToken> tokens =
      triphone_tokens(corpus, corpus.inventory);
  // u1 phones b a d e g -> windows (b,a,d), (a,d,e), (d,e,g); centers a, d, e
  // all participate in oppositions. u2 has only 2 phones -> none.
  REQUIRE(tokens.size() == 3);
  CHECK(tokens[0].left == "b");
  CHECK(tokens[0].center == "a");
  CHECK(tokens[0].right == "d");
  CHECK(tokens[0].start_frame == 0);
  CHECK(tokens[0].end_frame == 70);
  CHECK(tokens[1].center == "d");
  CHECK(tokens[2].center == "e");
}

TEST_CASE("triphone_tokens filters centers without oppositions") {
  DiskCorpus disk("wsm_corpus_filter");
  Corpus corpus = load_corpus(disk.manifest);
  // keep only the height feature: centers must be a or e
  corpus.inventory.features = {{"height", {{"a", "e"}}}};
  const auto tokens = triphone_tokens(corpus, corpus.inventory);
  REQUIRE(tokens.size() == 2);
  CHECK(tokens[0].center == "a");
  CHECK(tokens[1].center == "e");
}

TEST_CASE("triphone window count is segments minus two before filtering") {
  DiskCorpus disk("wsm_corpus_windows");
  Corpus corpus = load_corpus(disk.manifest);
  // make every phone a center candidate
  corpus.inventory.features = {{"all",
                                {{"b", "d"}, {"a", "e"}, {"b", "g"},
                                 {"d", "g"}, {"a", "g"}, {"e", "g"}}}};
  const auto tokens = triphone_tokens(corpus, corpus.inventory);
  std::size_t expected = 0;
  for (const UtteranceRecord& utt : corpus.utterances)
    if (utt.phones.size() >= 3) expected += utt.phones.size() - 2;
  CHECK(tokens.size() == expected);
}

TEST_CASE("inventory validation catches unknown phones and duplicate pairs") {
  DiskCorpus disk("wsm_corpus_inv");
  Corpus corpus = load_corpus(disk.manifest);
  corpus.inventory.features.push_back({"bogus", {{"z", "b"}}});
  CHECK_FALSE(validate_corpus(corpus).ok());

  Corpus corpus2 = load_corpus(disk.manifest);
  corpus2.inventory.features[0].second.push_back({"b", "d"});  // dup reversed
  CHECK_FALSE(validate_corpus(corpus2).ok());
}

TEST_CASE("unordered_contrasts deduplicates across features") {
  PhoneInventory inv;
  inv.phones = {"a", "b", "c"};
  inv.features = {{"f1", {{"a", "b"}, {"b", "c"}}}, {"f2", {{"b", "a"}}}};
  const auto contrasts = inv.unordered_contrasts();
  REQUIRE(contrasts.size() == 2);
  CHECK(contrasts[0] == std::pair<std::string, std::string>{"a", "b"});
  CHECK(contrasts[1] == std::pair<std::string, std::string>{"b", "c"});
}
