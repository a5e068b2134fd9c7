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

#ifndef LEXGUARD_OVERLAP_HPP_
#define LEXGUARD_OVERLAP_HPP_

#include <array>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexguard/corpus.hpp"

namespace lexguard {

enum class NGram { kUnigram, kBigram };

std::string_view to_string(NGram n);
NGram parse_ngram(std::string_view text);

using TermSet = std::set<std::string>;

// Unigrams drop punctuation and, when `filter_stopwords`, stopwords. Bigrams
// are adjacent word pairs over the unfiltered word sequence.
TermSet ngram_set(std::string_view text, NGram n, bool filter_stopwords);

// |A n B| / |A u B|, with J(empty, empty) = 0.
double jaccard(const TermSet& a, const TermSet& b);

inline constexpr std::size_t kOverlapBuckets = 10;

// Bucket of intersection/union, computed exactly: [0,0.1) -> 0 ... [0.9,1] -> 9.
std::size_t overlap_bucket(std::size_t intersection, std::size_t union_size);

struct OverlapHistogram {
  NGram n_gram = NGram::kUnigram;
  bool stopword_filtered = true;
  std::array<std::size_t, kOverlapBuckets> counts{};
  std::array<double, kOverlapBuckets> percent{};
  std::vector<double> max_similarity;  // per test prompt

  nlohmann::json to_json() const;
};

// Max Jaccard of each test prompt against every train prompt, binned.
// Throws DataError if either set is empty.
OverlapHistogram lexical_overlap(std::span<const PromptRecord> train,
                                 std::span<const PromptRecord> test, NGram n,
                                 bool filter_stopwords);

}  // namespace lexguard

#endif  // LEXGUARD_OVERLAP_HPP_
