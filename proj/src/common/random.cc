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

#include "gdpkit/common/random.h"

namespace gdpkit {
namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t Fnv1a(absl::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

uint64_t DeriveSeed(uint64_t master, absl::string_view purpose, uint64_t index,
                    uint64_t index2) {
  uint64_t h = SplitMix64(master);
  h = SplitMix64(h ^ Fnv1a(purpose));
  h = SplitMix64(h ^ index);
  h = SplitMix64(h ^ (index2 * 0xd6e8feb86659fd93ULL));
  return h;
}

double RandomStream::Uniform() { return uniform_(engine_); }

uint64_t RandomStream::UniformInt(uint64_t bound) {
  return std::uniform_int_distribution<uint64_t>(0, bound - 1)(engine_);
}

double RandomStream::Gaussian() { return normal_(engine_); }

}  // namespace gdpkit
