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

#ifndef GDPKIT_COMMON_RANDOM_H_
#define GDPKIT_COMMON_RANDOM_H_

#include <cstdint>
#include <random>

#include "absl/strings/string_view.h"

namespace gdpkit {

// Mixes a master seed with a purpose label and up to two counters. Streams
// with different labels or counters never share state.
uint64_t DeriveSeed(uint64_t master, absl::string_view purpose,
                    uint64_t index = 0, uint64_t index2 = 0);

// Seeded mt19937_64 with the few draws the toolkit needs.
class RandomStream {
 public:
  explicit RandomStream(uint64_t seed) : engine_(seed) {}
  RandomStream(uint64_t master, absl::string_view purpose, uint64_t index = 0,
               uint64_t index2 = 0)
      : engine_(DeriveSeed(master, purpose, index, index2)) {}

  // Uniform on [0, 1).
  double Uniform();
  // Uniform integer on [0, bound).
  uint64_t UniformInt(uint64_t bound);
  double Gaussian();
  bool Bernoulli(double p) { return Uniform() < p; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
};

}  // namespace gdpkit

#endif  // GDPKIT_COMMON_RANDOM_H_
