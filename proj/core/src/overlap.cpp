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

#include "lexguard/overlap.hpp"

#include <algorithm>

#include "lexguard/stopwords.hpp"

namespace lexguard {

std::string_view to_string(NGram n) { return n == NGram::kUnigram ? "unigram" : "bigram"; }

NGram parse_ngram(std::string_view text) {
  if (text == "unigram" || text == "1") return NGram::kUnigram;
  if (text == "bigram" || text == "2") return NGram::kBigram;
  throw DataError("unknown n-gram '" + std::string(text) + "'");
}

TermSet ngram_set(std::string_view text, NGram n, bool filter_stopwords) {
  const auto words = split_words(text);
  TermSet terms;
  if (n == NGram::kUnigram) {
    for (const auto& w : words) {
      if (is_punctuation(w) || (filter_stopwords && is_stopword(w))) continue;
      terms.insert(w);
    }
  } else {
    for (std::size_t i = 0; i + 1 < words.size(); ++i) {
      terms.insert(words[i] + ' ' + words[i + 1]);
    }
  }
  return terms;
}

namespace {

std::size_t intersection_size(const TermSet& a, const TermSet& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

}  // namespace

double jaccard(const TermSet& a, const TermSet& b) {
  const std::size_t inter = intersection_size(a, b);
  const std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::size_t overlap_bucket(std::size_t intersection, std::size_t union_size) {
  if (union_size == 0) return 0;
  return std::min(kOverlapBuckets - 1, (kOverlapBuckets * intersection) / union_size);
}

nlohmann::json OverlapHistogram::to_json() const {
  nlohmann::json buckets = nlohmann::json::array();
  for (std::size_t b = 0; b < kOverlapBuckets; ++b) {
    const double lo = static_cast<double>(b) / 10.0;
    const double hi = static_cast<double>(b + 1) / 10.0;
    buckets.push_back({{"low", lo}, {"high", hi}, {"count", counts[b]}, {"percent", percent[b]}});
  }
  return {{"n_gram", std::string(to_string(n_gram))},
          {"stopword_filtered", stopword_filtered},
          {"test_prompts", max_similarity.size()},
          {"buckets", std::move(buckets)}};
}

OverlapHistogram lexical_overlap(std::span<const PromptRecord> train,
                                 std::span<const PromptRecord> test, NGram n,
                                 bool filter_stopwords) {
  if (train.empty() || test.empty()) throw DataError("overlap needs non-empty train and test sets");
  OverlapHistogram hist;
  hist.n_gram = n;
  hist.stopword_filtered = n == NGram::kUnigram && filter_stopwords;

  std::vector<TermSet> train_sets;
  train_sets.reserve(train.size());
  for (const auto& r : train) train_sets.push_back(ngram_set(r.text, n, hist.stopword_filtered));

  for (const auto& r : test) {
    const auto terms = ngram_set(r.text, n, hist.stopword_filtered);
    // Track the best ratio as an exact fraction.
    std::size_t best_inter = 0;
    std::size_t best_union = 1;
    for (const auto& other : train_sets) {
      const std::size_t inter = intersection_size(terms, other);
      const std::size_t uni = terms.size() + other.size() - inter;
      if (uni == 0) continue;
      if (inter * best_union > best_inter * uni) {
        best_inter = inter;
        best_union = uni;
      }
    }
    ++hist.counts[overlap_bucket(best_inter, best_union)];
    hist.max_similarity.push_back(static_cast<double>(best_inter) /
                                  static_cast<double>(best_union));
  }
  const auto total = static_cast<double>(test.size());
  for (std::size_t b = 0; b < kOverlapBuckets; ++b) {
    hist.percent[b] = 100.0 * static_cast<double>(hist.counts[b]) / total;
  }
  return hist;
}

}  // namespace lexguard
