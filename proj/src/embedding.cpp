// wsm/embedding.cpp

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

#include "wsm/embedding.hpp"

#include "wsm/error.hpp"

namespace wsm {

const Matrix& EmbeddingArchive::require(const std::string& utterance_id) const {
  const auto it = sequences.find(utterance_id);
  if (it == sequences.end())
    fail(ErrorCode::MissingEmbedding, "no embedding for " + utterance_id);
  return it->second;
}

Matrix EmbeddingArchive::slice(const std::string& utterance_id,
                               std::int64_t start, std::int64_t end) const {
  const Matrix& seq = require(utterance_id);
  if (start < 0 || end > seq.rows() || start >= end)
    fail(ErrorCode::MissingEmbedding,
         utterance_id + ": span [" + std::to_string(start) + "," +
             std::to_string(end) + ") outside " + std::to_string(seq.rows()) +
             " embedded frames");
  return seq.middleRows(start, end - start);
}

void EmbeddingArchive::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  Json doc;
  doc["format_version"] = 1;
  doc["dim"] = dim;
  doc["metadata"] = metadata.is_null() ? Json::object() : metadata;
  Json utts = Json::array();
  for (const auto& [id, seq] : sequences) {
    const std::string file = id + ".wsmf";
    write_wsmf(dir / file, seq);
    Json entry;
    entry["id"] = id;
    entry["rows"] = static_cast<std::int64_t>(seq.rows());
    entry["file"] = file;
    utts.push_back(std::move(entry));
  }
  doc["utterances"] = std::move(utts);
  write_json_file(dir / "archive.json", doc);
}

EmbeddingArchive EmbeddingArchive::load(const std::filesystem::path& dir) {
  const Json doc = read_json_file(dir / "archive.json");
  EmbeddingArchive archive;
  archive.dim = doc.at("dim").get<int>();
  archive.metadata = doc.value("metadata", Json::object());
  for (const auto& entry : doc.at("utterances")) {
    const std::string id = entry.at("id").get<std::string>();
    archive.sequences[id] = read_wsmf(dir / entry.at("file").get<std::string>());
  }
  return archive;
}

}  // namespace wsm
