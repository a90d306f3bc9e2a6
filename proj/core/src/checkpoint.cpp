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

#include <array>
#include <bit>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "protocil/error.hpp"
#include "protocil/ipc.hpp"

namespace protocil {

namespace {

constexpr std::array<char, 4> kMagic = {'I', 'P', 'C', '1'};
constexpr std::size_t kHeaderBytes = 4 + 3 * 4 + 2 * 8;

template <typename U>
void put_le(std::vector<unsigned char>& out, U value) {
  for (std::size_t b = 0; b < sizeof(U); ++b) {
    out.push_back(static_cast<unsigned char>((value >> (8 * b)) & 0xFF));
  }
}

template <typename U>
U get_le(const std::vector<unsigned char>& in, std::size_t at) {
  U value = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) value |= static_cast<U>(in[at + b]) << (8 * b);
  return value;
}

}  // namespace

void save_checkpoint(const PrototypeClassifier& clf, const std::filesystem::path& path) {
  std::vector<unsigned char> bytes(kMagic.begin(), kMagic.end());
  put_le<std::uint32_t>(bytes, static_cast<std::uint32_t>(clf.class_count()));
  put_le<std::uint32_t>(bytes, static_cast<std::uint32_t>(clf.dim()));
  put_le<std::uint32_t>(bytes, static_cast<std::uint32_t>(clf.frozen_count()));
  put_le<std::uint64_t>(bytes, std::bit_cast<std::uint64_t>(clf.gamma()));
  put_le<std::uint64_t>(bytes, std::bit_cast<std::uint64_t>(clf.lambda()));
  for (double v : clf.prototypes().data()) put_le<std::uint64_t>(bytes, std::bit_cast<std::uint64_t>(v));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed for checkpoint '" + path.string() + "'");
}

PrototypeClassifier load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path.string() + "'");
  const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in),
                                         std::istreambuf_iterator<char>()};
  const std::string name = path.filename().string();
  if (bytes.size() < kHeaderBytes ||
      !std::equal(kMagic.begin(), kMagic.end(), bytes.begin(),
                  [](char a, unsigned char b) { return static_cast<unsigned char>(a) == b; })) {
    throw DataError(name + ": not an IPC1 checkpoint");
  }
  const auto classes = get_le<std::uint32_t>(bytes, 4);
  const auto dim = get_le<std::uint32_t>(bytes, 8);
  const auto frozen = get_le<std::uint32_t>(bytes, 12);
  const double gamma = std::bit_cast<double>(get_le<std::uint64_t>(bytes, 16));
  const double lambda = std::bit_cast<double>(get_le<std::uint64_t>(bytes, 24));
  const std::uint64_t expected = kHeaderBytes + 8ULL * classes * dim;
  if (bytes.size() != expected) {
    throw DataError(name + ": expected " + std::to_string(expected) + " bytes, got " +
                    std::to_string(bytes.size()));
  }
  Matrix prototypes(classes, dim);
  std::size_t at = kHeaderBytes;
  for (double& v : prototypes.data()) {
    v = std::bit_cast<double>(get_le<std::uint64_t>(bytes, at));
    at += 8;
  }
  return PrototypeClassifier(std::move(prototypes), frozen, gamma, lambda);
}

}  // namespace protocil
