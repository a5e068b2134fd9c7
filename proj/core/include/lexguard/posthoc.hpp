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

#ifndef LEXGUARD_POSTHOC_HPP_
#define LEXGUARD_POSTHOC_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexguard/corpus.hpp"
#include "lexguard/metrics.hpp"
#include "lexguard/net.hpp"

namespace lexguard {

// Unsafe probability of the prompt made of `words`. A word equal to
// kMaskWord stands for a masked position.
using Blackbox = std::function<double(std::span<const std::string> words)>;

// Scores word lists with the model's prompt head. An empty list is scored
// as a single MASK token.
Blackbox model_blackbox(const GuardrailModel& model, const Vocabulary& vocab);

struct LimeOptions {
  std::size_t n_samples = 1500;
  std::size_t top_k = 25;
  std::uint64_t seed = 0;
  double ridge_lambda = 1e-3;
  // Exponential kernel width; defaults to 0.75 * sqrt(word count).
  std::optional<double> kernel_width;

  nlohmann::json to_json() const;
};

// Local linear surrogate over word-presence features. Perturbations drop
// each word independently with probability 1/2 (the first sample is the
// full prompt); samples are weighted by exp(-D^2 / width^2) with D the cosine
// distance to the full prompt; the top_k words by |weighted correlation|
// enter a weighted ridge fit with intercept. Unselected words get weight 0.
// A single-word prompt gets f(word) - f(empty).
std::vector<double> lime_explain(std::span<const std::string> words, const Blackbox& blackbox,
                                 const LimeOptions& options = {});

// Dev-set threshold on word weights maximizing pooled word unsafe-F1.
ThresholdChoice lime_threshold(const std::vector<std::vector<double>>& weights,
                               const std::vector<std::vector<Label>>& gold,
                               std::span<const double> grid);

inline constexpr std::size_t kMaxExactShapleyPlayers = 12;

struct ShapleyOptions {
  enum class Mode { kExact, kPermutation };
  Mode mode = Mode::kExact;
  std::size_t n_permutations = 2000;
  std::uint64_t seed = 0;
};

// Value of a coalition; present[i] says whether player i takes part.
using CoalitionValue = std::function<double(const std::vector<bool>& present)>;

// Exact mode enumerates all 2^n coalitions and throws Error past
// kMaxExactShapleyPlayers players. Permutation mode averages marginal
// contributions over seeded random orders.
std::vector<double> shapley_values(std::size_t n_players, const CoalitionValue& value,
                                   const ShapleyOptions& options);

// Token-level Shapley values, with absent tokens replaced by kMaskWord,
// summed per word span. Pass empty spans for one token per word.
std::vector<double> shapley_explain(std::span<const std::string> tokens,
                                    std::span<const WordSpan> spans,
                                    const Blackbox& blackbox,
                                    const ShapleyOptions& options);

}  // namespace lexguard

#endif  // LEXGUARD_POSTHOC_HPP_
