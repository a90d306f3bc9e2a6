// Copyright 2026 The protocil Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "protocil/error.hpp"
#include "protocil/featureset.hpp"

namespace protocil {

namespace {

constexpr std::array<char, 4> kMagic = {'F', 'S', 'E', 'T'};
constexpr std::uint8_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 1 + 3 * 4;

std::uint32_t read_u32_le(const std::vector<unsigned char>& bytes, std::size_t at) {
  return static_cast<std::uint32_t>(bytes[at]) |
         (static_cast<std::uint32_t>(bytes[at + 1]) << 8) |
         (static_cast<std::uint32_t>(bytes[at + 2]) << 16) |
         (static_cast<std::uint32_t>(bytes[at + 3]) << 24);
}

void write_u32_le(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                                 static_cast<char>((v >> 16) & 0xFF),
                                 static_cast<char>((v >> 24) & 0xFF)};
  out.write(b.data(), b.size());
}

// Maps raw labels to contiguous ids in ascending original order.
FeatureSet reindex(Matrix features, const std::vector<std::int64_t>& raw_labels) {
  std::map<std::int64_t, ClassId> mapping;
  for (std::int64_t l : raw_labels) mapping.emplace(l, 0);
  std::vector<std::int64_t> original_ids;
  original_ids.reserve(mapping.size());
  for (auto& [raw, id] : mapping) {
    id = static_cast<ClassId>(original_ids.size());
    original_ids.push_back(raw);
  }
  std::vector<ClassId> labels;
  labels.reserve(raw_labels.size());
  for (std::int64_t l : raw_labels) labels.push_back(mapping.at(l));
  return FeatureSet(std::move(features), std::move(labels), std::move(original_ids));
}

std::vector<unsigned char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw LoadError(LoadErrorKind::kIo, 0, "cannot open feature file '" + path.string() + "'");
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

FeatureSet parse_featset(const std::vector<unsigned char>& bytes, const std::string& name) {
  if (bytes.size() < kHeaderBytes) {
    throw LoadError(LoadErrorKind::kTruncated, bytes.size(),
                    name + ": header needs " + std::to_string(kHeaderBytes) +
                        " bytes, file has " + std::to_string(bytes.size()));
  }
  if (bytes[4] != kVersion) {
    throw LoadError(LoadErrorKind::kBadHeader, 4,
                    name + ": unsupported FEATSET version " + std::to_string(bytes[4]) +
                        " at byte offset 4");
  }
  const std::uint32_t n = read_u32_le(bytes, 5);
  const std::uint32_t dim = read_u32_le(bytes, 9);
  const std::uint32_t declared_classes = read_u32_le(bytes, 13);
  if (n == 0) {
    throw LoadError(LoadErrorKind::kBadHeader, 5, name + ": n_samples is 0 at byte offset 5");
  }
  if (dim == 0) {
    throw LoadError(LoadErrorKind::kBadHeader, 9, name + ": dim is 0 at byte offset 9");
  }
  const std::uint64_t record_bytes = 4 + 4 * static_cast<std::uint64_t>(dim);
  const std::uint64_t expected = kHeaderBytes + record_bytes * n;
  if (bytes.size() < expected) {
    throw LoadError(LoadErrorKind::kTruncated, bytes.size(),
                    name + ": expected " + std::to_string(expected) + " bytes for " +
                        std::to_string(n) + " records of dim " + std::to_string(dim) +
                        ", got " + std::to_string(bytes.size()));
  }
  if (bytes.size() > expected) {
    throw LoadError(LoadErrorKind::kDimensionMismatch, expected,
                    name + ": " + std::to_string(bytes.size() - expected) +
                        " trailing bytes after the last record at byte offset " +
                        std::to_string(expected));
  }

  Matrix features(n, dim);
  std::vector<std::int64_t> raw_labels(n);
  std::size_t at = kHeaderBytes;
  for (std::uint32_t i = 0; i < n; ++i) {
    raw_labels[i] = read_u32_le(bytes, at);
    at += 4;
    for (std::uint32_t j = 0; j < dim; ++j, at += 4) {
      const float v = std::bit_cast<float>(read_u32_le(bytes, at));
      if (!std::isfinite(v)) {
        throw LoadError(LoadErrorKind::kNonFinite, at,
                        name + ": non-finite value in record " + std::to_string(i) +
                            " at byte offset " + std::to_string(at));
      }
      features(i, j) = static_cast<double>(v);
    }
  }

  std::vector<std::int64_t> distinct = raw_labels;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < declared_classes) {
    throw LoadError(LoadErrorKind::kEmptyClass, 13,
                    name + ": header declares " + std::to_string(declared_classes) +
                        " classes but only " + std::to_string(distinct.size()) +
                        " have samples");
  }
  if (distinct.size() > declared_classes) {
    throw LoadError(LoadErrorKind::kBadHeader, 13,
                    name + ": header declares " + std::to_string(declared_classes) +
                        " classes but records carry " + std::to_string(distinct.size()) +
                        " distinct labels");
  }
  return reindex(std::move(features), raw_labels);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

FeatureSet parse_csv(const std::vector<unsigned char>& bytes, const std::string& name) {
  const std::string text(bytes.begin(), bytes.end());
  std::istringstream in(text);
  std::string line;
  std::uint64_t line_no = 0;

  if (!std::getline(in, line)) {
    throw LoadError(LoadErrorKind::kBadHeader, 1, name + ": empty file");
  }
  ++line_no;
  const auto header = split_fields(line);
  if (header.size() < 2 || header[0] != "label") {
    throw LoadError(LoadErrorKind::kBadHeader, 1,
                    name + ": line 1: expected header 'label,f0,...', neither FEATSET nor CSV");
  }
  const std::size_t dim = header.size() - 1;
  for (std::size_t j = 0; j < dim; ++j) {
    if (header[j + 1] != "f" + std::to_string(j)) {
      throw LoadError(LoadErrorKind::kBadHeader, 1,
                      name + ": line 1: column " + std::to_string(j + 2) + " must be 'f" +
                          std::to_string(j) + "'");
    }
  }

  Matrix features(0, dim);
  std::vector<std::int64_t> raw_labels;
  std::vector<double> row(dim);
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != dim + 1) {
      throw LoadError(LoadErrorKind::kDimensionMismatch, line_no,
                      name + ": line " + std::to_string(line_no) + ": expected " +
                          std::to_string(dim + 1) + " fields, found " +
                          std::to_string(fields.size()));
    }
    std::int64_t label = 0;
    {
      auto [ptr, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), label);
      if (ec != std::errc() || ptr != fields[0].data() + fields[0].size()) {
        throw LoadError(LoadErrorKind::kBadValue, line_no,
                        name + ": line " + std::to_string(line_no) + ": label '" +
                            std::string(fields[0]) + "' is not an integer");
      }
    }
    for (std::size_t j = 0; j < dim; ++j) {
      const auto f = fields[j + 1];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw LoadError(LoadErrorKind::kBadValue, line_no,
                        name + ": line " + std::to_string(line_no) + ": '" + std::string(f) +
                            "' is not a number");
      }
      if (!std::isfinite(v)) {
        throw LoadError(LoadErrorKind::kNonFinite, line_no,
                        name + ": line " + std::to_string(line_no) + ": non-finite value in f" +
                            std::to_string(j));
      }
      row[j] = v;
    }
    features.append_row(row);
    raw_labels.push_back(label);
  }
  if (raw_labels.empty()) {
    throw LoadError(LoadErrorKind::kBadHeader, line_no, name + ": no data rows");
  }
  return reindex(std::move(features), raw_labels);
}

}  // namespace

FeatureSet load_featureset(const std::filesystem::path& path) {
  const auto bytes = read_all(path);
  const std::string name = path.filename().string();
  if (bytes.size() >= kMagic.size() &&
      std::equal(kMagic.begin(), kMagic.end(), bytes.begin(),
                 [](char a, unsigned char b) { return static_cast<unsigned char>(a) == b; })) {
    return parse_featset(bytes, name);
  }
  return parse_csv(bytes, name);
}

void save_featureset(const FeatureSet& fs, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write feature file '" + path.string() + "'");
  for (std::int64_t id : fs.original_ids()) {
    if (id < 0 || id > static_cast<std::int64_t>(UINT32_MAX)) {
      throw DataError("original class id " + std::to_string(id) +
                      " does not fit the FEATSET u32 label field");
    }
  }
  out.write(kMagic.data(), kMagic.size());
  out.put(static_cast<char>(kVersion));
  write_u32_le(out, static_cast<std::uint32_t>(fs.size()));
  write_u32_le(out, static_cast<std::uint32_t>(fs.dim()));
  write_u32_le(out, static_cast<std::uint32_t>(fs.class_count()));
  for (std::size_t i = 0; i < fs.size(); ++i) {
    write_u32_le(out, static_cast<std::uint32_t>(fs.original_ids()[fs.label(i)]));
    for (double v : fs.sample(i)) {
      write_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

void save_featureset_csv(const FeatureSet& fs, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write feature file '" + path.string() + "'");
  out << "label";
  for (std::size_t j = 0; j < fs.dim(); ++j) out << ",f" << j;
  out << '\n';
  std::array<char, 64> buf{};
  for (std::size_t i = 0; i < fs.size(); ++i) {
    out << fs.original_ids()[fs.label(i)];
    for (double v : fs.sample(i)) {
      auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
      out << ',' << std::string_view(buf.data(), static_cast<std::size_t>(ptr - buf.data()));
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace protocil
