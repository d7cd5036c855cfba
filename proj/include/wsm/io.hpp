// wsm/io.hpp

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

#ifndef WSM_IO_HPP
#define WSM_IO_HPP

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "wsm/types.hpp"

namespace wsm {

using Json = nlohmann::ordered_json;

// WSMF matrix container: magic "WSMF", then little-endian u32 version (= 1),
// u32 rows, u32 cols, followed by rows*cols float32 values in row-major order.
void write_wsmf(const std::filesystem::path& path, const Matrix& matrix);
Matrix read_wsmf(const std::filesystem::path& path);

// Annotation tier: UTF-8 TSV rows `label<TAB>start_frame<TAB>end_frame`,
// no header line.
std::vector<Segment> read_segments_tsv(const std::filesystem::path& path);
void write_segments_tsv(const std::filesystem::path& path,
                        const std::vector<Segment>& segments);

std::string read_text_file(const std::filesystem::path& path);

/// Write-temp-then-rename so concurrent readers never observe a partial file.
void atomic_write_file(const std::filesystem::path& path,
                       std::string_view bytes);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& value,
                     int indent = 2);

}  // namespace wsm

#endif  // WSM_IO_HPP
