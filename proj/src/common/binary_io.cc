// Copyright 2026 The gdpkit Authors.
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

#include "gdpkit/common/binary_io.h"

#include <bit>
#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"

namespace gdpkit {
namespace {

template <typename T>
void PutLittleEndian(std::string& out, T v) {
  for (size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

template <typename T>
T GetLittleEndian(absl::string_view b) {
  T v = 0;
  for (size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<T>(static_cast<unsigned char>(b[i])) << (8 * i);
  }
  return v;
}

}  // namespace

void ByteWriter::U32(uint32_t v) { PutLittleEndian(out_, v); }
void ByteWriter::U64(uint64_t v) { PutLittleEndian(out_, v); }
void ByteWriter::F64(double v) { U64(std::bit_cast<uint64_t>(v)); }

absl::StatusOr<absl::string_view> ByteReader::Bytes(size_t n) {
  if (remaining() < n) {
    return absl::DataLossError(
        absl::StrCat("truncated input: wanted ", n, " bytes, have ",
                     remaining()));
  }
  absl::string_view out = data_.substr(pos_, n);
  pos_ += n;
  return out;
}

absl::StatusOr<uint8_t> ByteReader::U8() {
  absl::StatusOr<absl::string_view> b = Bytes(1);
  if (!b.ok()) return b.status();
  return static_cast<uint8_t>((*b)[0]);
}

absl::StatusOr<uint32_t> ByteReader::U32() {
  absl::StatusOr<absl::string_view> b = Bytes(4);
  if (!b.ok()) return b.status();
  return GetLittleEndian<uint32_t>(*b);
}

absl::StatusOr<uint64_t> ByteReader::U64() {
  absl::StatusOr<absl::string_view> b = Bytes(8);
  if (!b.ok()) return b.status();
  return GetLittleEndian<uint64_t>(*b);
}

absl::StatusOr<double> ByteReader::F64() {
  absl::StatusOr<uint64_t> v = U64();
  if (!v.ok()) return v.status();
  return std::bit_cast<double>(*v);
}

absl::StatusOr<std::string> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

absl::Status WriteFileBytes(const std::string& path, absl::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot open ", path, " for writing"));
  }
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

}  // namespace gdpkit
