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


#ifndef GDPKIT_NN_CHECKPOINT_H_
#define GDPKIT_NN_CHECKPOINT_H_

#include <string>

#include "absl/status/status.h"
#include "gdpkit/nn/network.h"

namespace gdpkit {

// GDPW file. Each layer is stored as an (in + 1) x out matrix whose last row
// is the bias (zeros for bias-free layers).
std::string SerializeCheckpoint(const Network& model);
absl::Status SaveCheckpoint(const std::string& path, const Network& model);
// Shapes must match `model`, which receives the stored values.
absl::Status LoadCheckpoint(const std::string& path, Network& model);

}  // namespace gdpkit

#endif  // GDPKIT_NN_CHECKPOINT_H_
