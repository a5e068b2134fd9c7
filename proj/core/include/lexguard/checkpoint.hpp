// Copyright 2026 The lexguard Authors
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

#ifndef LEXGUARD_CHECKPOINT_HPP_
#define LEXGUARD_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "lexguard/corpus.hpp"
#include "lexguard/net.hpp"

namespace lexguard {

// Everything needed to serve predictions: the model, the vocabulary it was
// trained with and the decision threshold tuned on the dev split.
struct Checkpoint {
  GuardrailModel model;
  Vocabulary vocab;
  double threshold = 0.5;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public Error {
 public:
  enum class Kind { kIo, kFormat, kVersionMismatch, kTruncated, kShapeMismatch, kChecksum };

  CheckpointError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Layout:
//   "LXGDCKPT" | u32 version | u64 header size | JSON header | f32 tensor data
// All integers and floats little-endian. The header holds the encoder
// config, vocabulary, threshold and a manifest of (name, shape, offset,
// crc32) per tensor.
std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint deserialize_checkpoint(std::string_view bytes);

// Writes through a temporary file and renames, so readers never see a
// partial checkpoint. Throws Error if any parameter is non-finite.
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace lexguard

#endif  // LEXGUARD_CHECKPOINT_HPP_
