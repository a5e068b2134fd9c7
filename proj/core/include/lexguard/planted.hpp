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

#ifndef LEXGUARD_PLANTED_HPP_
#define LEXGUARD_PLANTED_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "lexguard/corpus.hpp"

namespace lexguard {

// Synthetic corpus whose labels follow a known rule: a prompt is unsafe iff
// it contains one of planted_phrases(). No word of a planted phrase occurs
// in any safe prompt, and each unsafe record's explanation lists the
// planted phrases it contains, in text order. Safe records carry an empty
// explanation.
struct PlantedOptions {
  std::size_t n_prompts = 200;
  double unsafe_fraction = 0.5;
  std::uint64_t seed = 42;
};

const std::vector<std::string>& planted_phrases();

std::vector<PromptRecord> planted_corpus(const PlantedOptions& options = {});

}  // namespace lexguard

#endif  // LEXGUARD_PLANTED_HPP_
