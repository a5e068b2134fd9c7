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

#ifndef LEXGUARD_EVALUATION_HPP_
#define LEXGUARD_EVALUATION_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexguard/corpus.hpp"
#include "lexguard/metrics.hpp"
#include "lexguard/net.hpp"

namespace lexguard {

// Prompt unsafe probability per example.
std::vector<double> prompt_scores(const GuardrailModel& model,
                                  std::span<const EncodedExample> examples);

F1Score prompt_f1(const GuardrailModel& model, std::span<const EncodedExample> examples,
                  double threshold = 0.5);

// Micro-averaged word-level unsafe-F1 of the token head over the examples
// that carry word supervision; the rest are skipped. A word is predicted
// unsafe when its confidence (max over its tokens) is >= 0.5, independent of
// the prompt verdict.
F1Score word_f1(const GuardrailModel& model, std::span<const EncodedExample> examples);
F1Score word_f1(const GuardrailModel& model, const Vocabulary& vocab,
                std::span<const PromptRecord> records);

enum class MaskMode { kReplaceWithMask, kRemove };

std::string_view to_string(MaskMode mode);
MaskMode parse_mask_mode(std::string_view text);

struct FaithfulnessCurve {
  double f1_full = 0.0;
  std::map<std::size_t, double> f1_at_k;
  MaskMode mask_mode = MaskMode::kReplaceWithMask;
  double threshold = 0.5;

  nlohmann::json to_json() const;
};

// Token ids with the given words masked (every token set to MASK) or removed.
std::vector<TokenId> mask_words(const EncodedExample& example,
                                std::span<const std::size_t> words, MaskMode mode);

// Word indices predicted unsafe (confidence >= 0.5), most confident first;
// ties keep text order.
std::vector<std::size_t> rank_unsafe_words(const GuardrailModel& model,
                                           const EncodedExample& example);

// For each k, masks each prompt's top-k ranked words (all of them when fewer
// are available) and recomputes prompt unsafe-F1 at `threshold`. A prompt
// emptied by removal counts as safe.
FaithfulnessCurve faithfulness(const GuardrailModel& model,
                               std::span<const EncodedExample> examples,
                               std::span<const std::size_t> k_values,
                               MaskMode mode = MaskMode::kReplaceWithMask,
                               double threshold = 0.5);

struct GroupScores {
  std::size_t size = 0;
  F1Score prompt;
  std::optional<F1Score> word;  // absent when the group has no supervision
};

// Scores per category; examples without one fall into "others".
std::map<std::string, GroupScores> grouped_f1(const GuardrailModel& model,
                                              std::span<const EncodedExample> examples,
                                              double threshold = 0.5);

struct LatencyReport {
  std::size_t inputs_timed = 0;
  std::size_t warmup = 0;
  double total_ms = 0.0;
  double mean_ms = 0.0;
  std::optional<double> peak_rss_mb;  // absent where the platform hides it

  nlohmann::json to_json() const;
};

// Sequential, unbatched predict() over every record. The first 10 inputs are
// warm-up and excluded when more than 10 are given.
LatencyReport latency_harness(const GuardrailModel& model, const Vocabulary& vocab,
                              std::span<const PromptRecord> records,
                              double threshold = 0.5);

std::optional<double> peak_rss_mb();

}  // namespace lexguard

#endif  // LEXGUARD_EVALUATION_HPP_
