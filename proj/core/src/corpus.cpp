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

#include "lexguard/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace lexguard {

namespace {

using nlohmann::json;

bool is_word_byte(unsigned char c) {
  return std::isalnum(c) != 0 || c >= 0x80;
}

bool is_blank(std::string_view text) {
  return std::all_of(text.begin(), text.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

PromptRecord record_from_json(const json& row, std::size_t line_no) {
  auto fail = [line_no](const std::string& what) {
    return DataError("line " + std::to_string(line_no) + ": " + what);
  };
  if (!row.is_object()) throw fail("expected a JSON object");

  PromptRecord record;
  auto text = row.find("text");
  if (text == row.end() || !text->is_string()) {
    throw fail("missing string field 'text'");
  }
  record.text = text->get<std::string>();
  if (is_blank(record.text)) throw fail("empty text");

  auto label = row.find("safety_label");
  if (label == row.end() || !label->is_string()) {
    throw fail("missing string field 'safety_label'");
  }
  auto parsed = parse_label(label->get<std::string>());
  if (!parsed) throw fail("unknown label '" + label->get<std::string>() + "'");
  record.label = *parsed;

  if (auto id = row.find("id"); id != row.end()) {
    if (id->is_string()) {
      record.id = id->get<std::string>();
    } else if (id->is_number_integer()) {
      record.id = std::to_string(id->get<long long>());
    } else {
      throw fail("'id' must be a string");
    }
  } else {
    record.id = std::to_string(line_no);
  }

  if (auto ex = row.find("explanation"); ex != row.end() && !ex->is_null()) {
    if (!ex->is_array()) throw fail("'explanation' must be an array");
    std::vector<std::string> phrases;
    for (const auto& phrase : *ex) {
      if (!phrase.is_string()) throw fail("explanation entries must be strings");
      phrases.push_back(phrase.get<std::string>());
    }
    record.explanation_words = std::move(phrases);
  }
  if (auto cat = row.find("category"); cat != row.end() && !cat->is_null()) {
    if (!cat->is_string()) throw fail("'category' must be a string");
    record.category = cat->get<std::string>();
  }
  return record;
}

}  // namespace

std::vector<PromptRecord> parse_jsonl(std::istream& in) {
  std::vector<PromptRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    json row;
    try {
      row = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError("line " + std::to_string(line_no) +
                      ": malformed JSON: " + e.what());
    }
    records.push_back(record_from_json(row, line_no));
  }
  return records;
}

std::vector<PromptRecord> load_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset " + path.string());
  try {
    return parse_jsonl(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_jsonl(std::ostream& out, std::span<const PromptRecord> records) {
  for (const auto& record : records) {
    nlohmann::ordered_json row;
    row["id"] = record.id;
    row["text"] = record.text;
    row["safety_label"] = std::string(to_string(record.label));
    if (record.explanation_words) row["explanation"] = *record.explanation_words;
    if (record.category) row["category"] = *record.category;
    out << row.dump() << '\n';
  }
}

void save_jsonl(const std::filesystem::path& path,
                std::span<const PromptRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_jsonl(out, records);
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c) != 0 || std::iscntrl(c) != 0) {
      ++i;
    } else if (is_word_byte(c)) {
      std::string word;
      while (i < text.size() &&
             is_word_byte(static_cast<unsigned char>(text[i]))) {
        word.push_back(static_cast<char>(
            std::tolower(static_cast<unsigned char>(text[i]))));
        ++i;
      }
      words.push_back(std::move(word));
    } else {
      words.emplace_back(1, static_cast<char>(c));
      ++i;
    }
  }
  return words;
}

Vocabulary::Vocabulary() : tokens_{"[PAD]", "[UNK]", "[MASK]"} {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    index_.emplace(tokens_[i], static_cast<TokenId>(i));
  }
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  if (tokens.size() < kNumReserved || tokens[kPad] != "[PAD]" ||
      tokens[kUnk] != "[UNK]" || tokens[kMask] != "[MASK]") {
    throw DataError("vocabulary must start with [PAD], [UNK], [MASK]");
  }
  Vocabulary vocab;
  vocab.tokens_.clear();
  vocab.index_.clear();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto [it, inserted] =
        vocab.index_.emplace(tokens[i], static_cast<TokenId>(i));
    if (!inserted) throw DataError("duplicate vocabulary token '" + tokens[i] + "'");
  }
  vocab.tokens_ = std::move(tokens);
  return vocab;
}

Vocabulary Vocabulary::build(std::span<const PromptRecord> records,
                             std::size_t min_freq) {
  std::map<std::string, std::size_t> freq;
  for (const auto& record : records) {
    for (auto& word : split_words(record.text)) ++freq[std::move(word)];
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [word, n] : freq) {
    if (n >= std::max<std::size_t>(min_freq, 1) && word != "[PAD]" &&
        word != "[UNK]" && word != "[MASK]") {
      kept.emplace_back(word, n);
    }
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  std::vector<std::string> tokens = {"[PAD]", "[UNK]", "[MASK]"};
  for (auto& [word, n] : kept) tokens.push_back(std::move(word));
  return from_tokens(std::move(tokens));
}

TokenId Vocabulary::id(std::string_view word) const {
  if (word == kMaskWord) return kMask;
  auto it = index_.find(std::string(word));
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id >= tokens_.size()) throw Error("token id out of range");
  return tokens_[id];
}

Tokenized encode_words(std::span<const std::string> words,
                       const Vocabulary& vocab) {
  Tokenized out;
  out.token_ids.reserve(words.size());
  out.word_spans.reserve(words.size());
  for (const auto& word : words) {
    const std::size_t begin = out.token_ids.size();
    out.token_ids.push_back(vocab.id(word));
    out.word_spans.push_back({begin, out.token_ids.size()});
    out.words.push_back(word);
  }
  return out;
}

Tokenized tokenize(std::string_view text, const Vocabulary& vocab) {
  const auto words = split_words(text);
  return encode_words(words, vocab);
}

std::optional<std::vector<Label>> project_labels(const PromptRecord& record,
                                                 const Tokenized& tokens,
                                                 ProjectionStats* stats) {
  if (!record.explanation_words) return std::nullopt;
  std::vector<Label> labels(tokens.num_tokens(), Label::kSafe);
  if (record.label == Label::kSafe) return labels;

  const auto& words = tokens.words;
  std::vector<bool> unsafe_word(words.size(), false);
  bool any_match = false;
  for (const auto& phrase_text : *record.explanation_words) {
    const auto phrase = split_words(phrase_text);
    bool matched = false;
    if (!phrase.empty() && phrase.size() <= words.size()) {
      for (std::size_t start = 0; start + phrase.size() <= words.size(); ++start) {
        if (std::equal(phrase.begin(), phrase.end(), words.begin() + start)) {
          std::fill_n(unsafe_word.begin() + start, phrase.size(), true);
          matched = true;
        }
      }
    }
    if (stats != nullptr) {
      ++(matched ? stats->matched_phrases : stats->unmatched_phrases);
    }
    any_match = any_match || matched;
  }
  if (!any_match) return std::nullopt;
  for (std::size_t w = 0; w < words.size(); ++w) {
    if (!unsafe_word[w]) continue;
    const auto& span = tokens.word_spans[w];
    std::fill(labels.begin() + span.begin, labels.begin() + span.end,
              Label::kUnsafe);
  }
  return labels;
}

EncodedExample encode_example(const PromptRecord& record,
                              const Vocabulary& vocab, ProjectionStats* stats) {
  auto tokens = tokenize(record.text, vocab);
  if (tokens.num_tokens() == 0) {
    throw DataError("record '" + record.id + "' has empty text");
  }
  EncodedExample example;
  example.id = record.id;
  example.category = record.category;
  example.label = record.label;
  example.token_labels = project_labels(record, tokens, stats);
  example.token_ids = std::move(tokens.token_ids);
  example.word_spans = std::move(tokens.word_spans);
  example.words = std::move(tokens.words);
  return example;
}

std::vector<EncodedExample> encode_all(std::span<const PromptRecord> records,
                                       const Vocabulary& vocab,
                                       ProjectionStats* stats) {
  std::vector<EncodedExample> out;
  out.reserve(records.size());
  for (const auto& record : records) {
    out.push_back(encode_example(record, vocab, stats));
  }
  return out;
}

std::vector<Label> word_labels(const EncodedExample& example) {
  std::vector<Label> labels(example.word_spans.size(), Label::kSafe);
  if (!example.token_labels) return labels;
  for (std::size_t w = 0; w < labels.size(); ++w) {
    const auto& span = example.word_spans[w];
    for (std::size_t t = span.begin; t < span.end; ++t) {
      if ((*example.token_labels)[t] == Label::kUnsafe) labels[w] = Label::kUnsafe;
    }
  }
  return labels;
}

namespace {

// Number of whole words whose tokens fit in `max_tokens`.
std::size_t words_within(std::span<const WordSpan> spans, std::size_t max_tokens) {
  std::size_t n = 0;
  while (n < spans.size() && spans[n].end <= max_tokens) ++n;
  return n;
}

}  // namespace

void truncate(Tokenized& tokens, std::size_t max_tokens) {
  if (max_tokens == 0 || tokens.num_tokens() <= max_tokens) return;
  const std::size_t n = words_within(tokens.word_spans, max_tokens);
  const std::size_t end = n == 0 ? 0 : tokens.word_spans[n - 1].end;
  tokens.words.resize(n);
  tokens.word_spans.resize(n);
  tokens.token_ids.resize(end);
}

void truncate(EncodedExample& example, std::size_t max_tokens) {
  if (max_tokens == 0 || example.num_tokens() <= max_tokens) return;
  const std::size_t n = words_within(example.word_spans, max_tokens);
  const std::size_t end = n == 0 ? 0 : example.word_spans[n - 1].end;
  example.words.resize(n);
  example.word_spans.resize(n);
  example.token_ids.resize(end);
  if (example.token_labels) example.token_labels->resize(end);
  if (!example.delta_t.empty()) example.delta_t.resize(end);
}

}  // namespace lexguard
