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

#ifndef LEXGUARD_POLARIZATION_HPP_
#define LEXGUARD_POLARIZATION_HPP_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexguard/common.hpp"
#include "lexguard/corpus.hpp"

namespace lexguard {

// Which label decides whether a token occurrence counts as "safe context".
enum class CountMode {
  kPromptLabel,  // gold label of the containing prompt (default)
  kTokenLabel,   // projected token label; unsupervised prompts are skipped
};

std::string_view to_string(CountMode mode);
CountMode parse_count_mode(std::string_view text);

struct TokenCounts {
  std::uint64_t safe = 0;
  std::uint64_t unsafe = 0;

  std::uint64_t of(Label label) const {
    return label == Label::kSafe ? safe : unsafe;
  }
  bool operator==(const TokenCounts&) const = default;
};

inline constexpr double kDefaultPolarizationEpsilon = 1e-8;

// Gated polarization score of a token with counts `c` and label `label`:
// zero unless `label` is the strictly dominant class, otherwise
// |c_safe - c_unsafe| / (c_safe + c_unsafe + epsilon). Always in [0, 1).
double polarization_delta(TokenCounts c, Label label, double epsilon);

// Per-token class counts over the training split. Immutable once built.
class PolarizationTable {
 public:
  PolarizationTable(std::vector<TokenCounts> counts, double epsilon,
                    CountMode mode = CountMode::kPromptLabel);

  // (0, 0) for ids the table never saw.
  TokenCounts counts(TokenId id) const {
    return id < counts_.size() ? counts_[id] : TokenCounts{};
  }
  double delta_token(TokenId id, Label label) const {
    return polarization_delta(counts(id), label, epsilon_);
  }
  double epsilon() const { return epsilon_; }
  CountMode mode() const { return mode_; }
  std::size_t size() const { return counts_.size(); }

  // {"count_mode": ..., "epsilon": e, "counts": {token: [c_safe, c_unsafe]}}
  // with zero-count tokens omitted. Keys sort, so the dump is stable.
  nlohmann::json to_json(const Vocabulary& vocab) const;
  static PolarizationTable from_json(const nlohmann::json& j,
                                     const Vocabulary& vocab);

  // FNV-1a over the counts and epsilon.
  std::uint64_t checksum() const;

 private:
  std::vector<TokenCounts> counts_;
  double epsilon_;
  CountMode mode_;
};

// Counts token occurrences (not documents) per class. Throws DataError for an
// empty training set.
PolarizationTable build_polarization_table(
    std::span<const PromptRecord> train, const Vocabulary& vocab,
    CountMode mode = CountMode::kPromptLabel,
    double epsilon = kDefaultPolarizationEpsilon);

// Prompt-level score: aggregates the counts of tokens whose label matches the
// prompt label and gates on the aggregate dominant class. Zero for
// unsupervised examples.
double compute_delta_p(const EncodedExample& example,
                       const PolarizationTable& table);

}  // namespace lexguard

#endif  // LEXGUARD_POLARIZATION_HPP_
