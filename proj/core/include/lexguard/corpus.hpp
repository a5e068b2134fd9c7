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

#ifndef LEXGUARD_CORPUS_HPP_
#define LEXGUARD_CORPUS_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lexguard/common.hpp"

namespace lexguard {

// One dataset row.
struct PromptRecord {
  std::string id;
  std::string text;
  Label label = Label::kSafe;
  // Absent means "no word supervision". Present-but-empty is meaningful for
  // safe prompts: they are supervised with all-safe word labels.
  std::optional<std::vector<std::string>> explanation_words;
  std::optional<std::string> category;

  bool operator==(const PromptRecord&) const = default;
};

// Reads the JSONL dataset format. Throws DataError naming the 1-based line
// number on malformed rows or unknown labels. Blank lines are skipped.
std::vector<PromptRecord> load_jsonl(const std::filesystem::path& path);
std::vector<PromptRecord> parse_jsonl(std::istream& in);

void write_jsonl(std::ostream& out, std::span<const PromptRecord> records);
void save_jsonl(const std::filesystem::path& path,
                std::span<const PromptRecord> records);

// Splits text into lowercase words: maximal runs of letters/digits, and each
// punctuation mark on its own. Bytes >= 0x80 are treated as letters so UTF-8
// sequences stay intact.
std::vector<std::string> split_words(std::string_view text);

// Surface form that encodes straight to the MASK token.
inline constexpr std::string_view kMaskWord = "[MASK]";

class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kUnk = 1;
  static constexpr TokenId kMask = 2;
  static constexpr std::size_t kNumReserved = 3;

  // Reserved tokens only.
  Vocabulary();

  // Words seen at least `min_freq` times in `records`; ids ordered by
  // descending frequency, ties broken lexicographically.
  static Vocabulary build(std::span<const PromptRecord> records,
                          std::size_t min_freq = 2);

  // `tokens` must start with the three reserved tokens in id order.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  TokenId id(std::string_view word) const;
  const std::string& token(TokenId id) const;
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

// Half-open token range [begin, end) covered by one word.
struct WordSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool operator==(const WordSpan&) const = default;
};

struct Tokenized {
  std::vector<TokenId> token_ids;
  std::vector<WordSpan> word_spans;  // one per word, partitions the tokens
  std::vector<std::string> words;

  std::size_t num_tokens() const { return token_ids.size(); }
  std::size_t num_words() const { return words.size(); }
};

// Word-level tokenizer: one token per word.
Tokenized encode_words(std::span<const std::string> words,
                       const Vocabulary& vocab);
Tokenized tokenize(std::string_view text, const Vocabulary& vocab);

struct ProjectionStats {
  std::size_t matched_phrases = 0;
  std::size_t unmatched_phrases = 0;
};

// Projects explanation phrases onto per-token labels. Unsafe records mark
// every word inside any (case-insensitive, contiguous) phrase occurrence as
// unsafe; supervised safe records are all-safe. Returns nullopt when the
// record carries no explanation, or when it is unsafe and none of its
// phrases occur in the text.
std::optional<std::vector<Label>> project_labels(const PromptRecord& record,
                                                 const Tokenized& tokens,
                                                 ProjectionStats* stats = nullptr);

// Model-ready example with optional token supervision and attached
// polarization scores.
struct EncodedExample {
  std::string id;
  std::optional<std::string> category;
  std::vector<TokenId> token_ids;
  std::vector<WordSpan> word_spans;
  std::vector<std::string> words;
  Label label = Label::kSafe;
  std::optional<std::vector<Label>> token_labels;
  std::vector<double> delta_t;  // empty when unsupervised, else one per token
  double delta_p = 0.0;

  bool supervised() const { return token_labels.has_value(); }
  std::size_t num_tokens() const { return token_ids.size(); }
};

// Throws DataError for texts that are empty after trimming.
EncodedExample encode_example(const PromptRecord& record,
                              const Vocabulary& vocab,
                              ProjectionStats* stats = nullptr);

std::vector<EncodedExample> encode_all(std::span<const PromptRecord> records,
                                       const Vocabulary& vocab,
                                       ProjectionStats* stats = nullptr);

// Drop trailing words until at most `max_tokens` tokens remain; supervision
// and polarization scores are cut to match. max_tokens = 0 keeps everything.
void truncate(Tokenized& tokens, std::size_t max_tokens);
void truncate(EncodedExample& example, std::size_t max_tokens);

// Per-word gold label: unsafe iff any of the word's tokens is unsafe.
std::vector<Label> word_labels(const EncodedExample& example);

}  // namespace lexguard

#endif  // LEXGUARD_CORPUS_HPP_
