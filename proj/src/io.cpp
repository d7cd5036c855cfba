// wsm/io.cpp

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

#include "wsm/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "wsm/error.hpp"

namespace wsm {
namespace {

constexpr char kMagic[4] = {'W', 'S', 'M', 'F'};
constexpr std::uint32_t kVersion = 1;

void append_u32_le(std::string& out, std::uint32_t value) {
  out.push_back(static_cast<char>(value & 0xff));
  out.push_back(static_cast<char>((value >> 8) & 0xff));
  out.push_back(static_cast<char>((value >> 16) & 0xff));
  out.push_back(static_cast<char>((value >> 24) & 0xff));
}

std::uint32_t read_u32_le(const char* p) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(p[0])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(p[1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(p[2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(p[3])) << 24;
}

void append_f32_le(std::string& out, float value) {
  std::uint32_t bits;
  std::memcpy(&bits, &value, sizeof(bits));
  append_u32_le(out, bits);
}

float read_f32_le(const char* p) {
  const std::uint32_t bits = read_u32_le(p);
  float value;
  std::memcpy(&value, &bits, sizeof(value));
  return value;
}

}  // namespace

void write_wsmf(const std::filesystem::path& path, const Matrix& matrix) {
  const auto rows = static_cast<std::uint32_t>(matrix.rows());
  const auto cols = static_cast<std::uint32_t>(matrix.cols());
  std::string bytes;
  bytes.reserve(16 + static_cast<std::size_t>(rows) * cols * 4);
  bytes.append(kMagic, 4);
  append_u32_le(bytes, kVersion);
  append_u32_le(bytes, rows);
  append_u32_le(bytes, cols);
  for (Index r = 0; r < matrix.rows(); ++r)
    for (Index c = 0; c < matrix.cols(); ++c)
      append_f32_le(bytes, static_cast<float>(matrix(r, c)));
  atomic_write_file(path, bytes);
}

Matrix read_wsmf(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    fail(ErrorCode::MissingFile, path.string());
  const std::string bytes = read_text_file(path);
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    fail(ErrorCode::MalformedManifest,
         path.string() + ": not a WSMF matrix file");
  if (read_u32_le(bytes.data() + 4) != kVersion)
    fail(ErrorCode::MalformedManifest,
         path.string() + ": unsupported WSMF version");
  const std::uint32_t rows = read_u32_le(bytes.data() + 8);
  const std::uint32_t cols = read_u32_le(bytes.data() + 12);
  const std::size_t expected = 16 + static_cast<std::size_t>(rows) * cols * 4;
  if (bytes.size() != expected)
    fail(ErrorCode::MalformedManifest,
         path.string() + ": truncated WSMF body");
  Matrix matrix(rows, cols);
  const char* p = bytes.data() + 16;
  for (std::uint32_t r = 0; r < rows; ++r)
    for (std::uint32_t c = 0; c < cols; ++c, p += 4)
      matrix(r, c) = static_cast<double>(read_f32_le(p));
  return matrix;
}

std::vector<Segment> read_segments_tsv(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    fail(ErrorCode::MissingFile, path.string());
  std::ifstream in(path);
  std::vector<Segment> segments;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? std::string::npos
                                                : line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos)
      fail(ErrorCode::MalformedManifest, path.string() + ": line " +
                                             std::to_string(line_no) +
                                             " is not label<TAB>start<TAB>end");
    Segment seg;
    seg.label = line.substr(0, tab1);
    try {
      seg.start_frame = std::stoll(line.substr(tab1 + 1, tab2 - tab1 - 1));
      seg.end_frame = std::stoll(line.substr(tab2 + 1));
    } catch (const std::exception&) {
      fail(ErrorCode::MalformedManifest,
           path.string() + ": bad frame index on line " +
               std::to_string(line_no));
    }
    segments.push_back(std::move(seg));
  }
  return segments;
}

void write_segments_tsv(const std::filesystem::path& path,
                        const std::vector<Segment>& segments) {
  std::string out;
  for (const Segment& seg : segments) {
    out += seg.label;
    out += '\t';
    out += std::to_string(seg.start_frame);
    out += '\t';
    out += std::to_string(seg.end_frame);
    out += '\n';
  }
  atomic_write_file(path, out);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::MissingFile, path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void atomic_write_file(const std::filesystem::path& path,
                       std::string_view bytes) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::MissingFile, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::MissingFile, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Json read_json_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    fail(ErrorCode::MissingFile, path.string());
  try {
    return Json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::MalformedManifest, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& value,
                     int indent) {
  atomic_write_file(path, value.dump(indent) + "\n");
}

}  // namespace wsm
