// wsm/embedding.hpp

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

#ifndef WSM_EMBEDDING_HPP
#define WSM_EMBEDDING_HPP

#include <filesystem>
#include <map>
#include <string>

#include "wsm/io.hpp"
#include "wsm/types.hpp"

namespace wsm {

/// Per-utterance frame embedding sequences, keyed by utterance id. Frames are
/// at the canonical annotation rate, so segment spans index rows directly.
struct EmbeddingArchive {
  int dim = 0;
  std::map<std::string, Matrix> sequences;
  Json metadata;  // provenance: mask, mode, corpus...

  const Matrix& require(const std::string& utterance_id) const;
  /// Rows [start, end) of an utterance's embedding sequence.
  Matrix slice(const std::string& utterance_id, std::int64_t start,
               std::int64_t end) const;

  void save(const std::filesystem::path& dir) const;
  static EmbeddingArchive load(const std::filesystem::path& dir);
};

}  // namespace wsm

#endif  // WSM_EMBEDDING_HPP
