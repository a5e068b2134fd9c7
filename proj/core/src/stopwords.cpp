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

#include "lexguard/stopwords.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace lexguard {

namespace {

// Sorted, so lookups can binary search.
constexpr auto kStopwords = [] {
  std::array<std::string_view, 150> words = {
      "a",        "about",   "above",   "after",   "again",   "against",
      "all",      "also",    "am",      "an",      "and",     "any",
      "are",      "as",      "at",      "be",      "because", "been",
      "before",   "being",   "below",   "between", "both",    "but",
      "by",       "can",     "could",   "did",     "do",      "does",
      "doing",    "down",    "during",  "each",    "either",  "else",
      "even",     "ever",    "every",   "few",     "for",     "from",
      "further",  "get",     "got",     "had",     "has",     "have",
      "having",   "he",      "her",     "here",    "hers",    "herself",
      "him",      "himself", "his",     "how",     "however", "i",
      "if",       "in",      "into",    "is",      "it",      "its",
      "itself",   "just",    "let",     "like",    "may",     "me",
      "might",    "more",    "most",    "much",    "must",    "my",
      "myself",   "no",      "nor",     "not",     "now",     "of",
      "off",      "often",   "on",      "once",    "only",    "or",
      "other",    "our",     "ours",    "ourselves", "out",   "over",
      "own",      "please",  "quite",   "rather",  "really",  "same",
      "shall",    "she",     "should",  "so",      "some",    "such",
      "than",     "that",    "the",     "their",   "theirs",  "them",
      "themselves", "then",  "there",   "these",   "they",    "this",
      "those",    "through", "to",      "too",     "under",   "until",
      "up",       "upon",    "us",      "very",    "was",     "we",
      "were",     "what",    "when",    "where",   "which",   "while",
      "who",      "whom",    "why",     "will",    "with",    "would",
      "yet",      "you",     "your",    "yours",   "yourself", "yourselves",
  };
  std::sort(words.begin(), words.end());
  return words;
}();

}  // namespace

std::span<const std::string_view> stopwords() { return kStopwords; }

bool is_stopword(std::string_view word) {
  return std::binary_search(kStopwords.begin(), kStopwords.end(), word);
}

bool is_punctuation(std::string_view word) {
  return word.size() == 1 &&
         std::ispunct(static_cast<unsigned char>(word.front())) != 0;
}

}  // namespace lexguard
