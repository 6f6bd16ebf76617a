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


#include "gdpkit/nn/checkpoint.h"

#include "absl/strings/str_cat.h"
#include "gdpkit/common/binary_io.h"

namespace gdpkit {
namespace {

constexpr char kMagic[] = "GDPW";
constexpr uint32_t kVersion = 1;

}  // namespace

std::string SerializeCheckpoint(const Network& model) {
  const std::vector<const Layer*> layers = model.AllLayers();
  ByteWriter w;
  w.Bytes(absl::string_view(kMagic, 4));
  w.U32(kVersion);
  w.U32(static_cast<uint32_t>(layers.size()));
  for (const Layer* layer : layers) {
    w.U64(static_cast<uint64_t>(layer->in() + 1));
    w.U64(static_cast<uint64_t>(layer->out()));
    for (int i = 0; i < layer->in(); ++i) {
      for (int j = 0; j < layer->out(); ++j) w.F64(layer->weight(i, j));
    }
    for (int j = 0; j < layer->out(); ++j) {
      w.F64(layer->has_bias ? layer->bias(j) : 0.0);
    }
  }
  return w.data();
}

absl::Status SaveCheckpoint(const std::string& path, const Network& model) {
  return WriteFileBytes(path, SerializeCheckpoint(model));
}

absl::Status LoadCheckpoint(const std::string& path, Network& model) {
  absl::StatusOr<std::string> bytes = ReadFileBytes(path);
  if (!bytes.ok()) return bytes.status();
  ByteReader r(*bytes);
  absl::StatusOr<absl::string_view> magic = r.Bytes(4);
  if (!magic.ok()) return magic.status();
  if (*magic != absl::string_view(kMagic, 4)) {
    return absl::DataLossError(absl::StrCat(path, ": not a GDPW file"));
  }
  absl::StatusOr<uint32_t> version = r.U32();
  absl::StatusOr<uint32_t> count = r.U32();
  if (!version.ok() || !count.ok()) {
    return absl::DataLossError(absl::StrCat(path, ": truncated header"));
  }
  if (*version != kVersion) {
    return absl::DataLossError(
        absl::StrCat(path, ": unsupported GDPW version ", *version));
  }
  std::vector<Layer*> layers = model.AllLayers();
  if (*count != layers.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        path, ": ", *count, " layers stored, model has ", layers.size()));
  }
  for (Layer* layer : layers) {
    absl::StatusOr<uint64_t> rows = r.U64();
    absl::StatusOr<uint64_t> cols = r.U64();
    if (!rows.ok() || !cols.ok()) {
      return absl::DataLossError(absl::StrCat(path, ": truncated layer"));
    }
    if (*rows != static_cast<uint64_t>(layer->in() + 1) ||
        *cols != static_cast<uint64_t>(layer->out())) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": layer shape mismatch"));
    }
    for (int i = 0; i <= layer->in(); ++i) {
      for (int j = 0; j < layer->out(); ++j) {
        absl::StatusOr<double> v = r.F64();
        if (!v.ok()) return v.status();
        if (i < layer->in()) {
          layer->weight(i, j) = *v;
        } else if (layer->has_bias) {
          layer->bias(j) = *v;
        }
      }
    }
  }
  if (r.remaining() != 0) {
    return absl::DataLossError(absl::StrCat(path, ": trailing bytes"));
  }
  return absl::OkStatus();
}

}  // namespace gdpkit
