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

#ifndef LEXGUARD_TESTS_SUPPORT_FIXTURES_HPP_
#define LEXGUARD_TESTS_SUPPORT_FIXTURES_HPP_

#include <algorithm>
#include <span>
#include <string>

#include "lexguard/planted.hpp"
#include "lexguard/trainer.hpp"

namespace lexguard::testing {

// Planted corpus split 3:1 into train and dev, prepared with min_freq 1.
inline PreparedData small_planted(std::size_t n = 48, std::uint64_t seed = 3) {
  PlantedOptions options;
  options.n_prompts = n;
  options.seed = seed;
  const auto records = planted_corpus(options);
  const auto cut = records.size() * 3 / 4;
  const std::vector<PromptRecord> train(records.begin(), records.begin() + cut);
  const std::vector<PromptRecord> dev(records.begin() + cut, records.end());
  DataOptions data;
  data.min_freq = 1;
  return prepare_data(train, dev, data);
}

inline EncoderConfig tiny_encoder(std::size_t vocab_size) {
  EncoderConfig c;
  c.vocab_size = vocab_size;
  c.d_model = 16;
  c.n_layers = 1;
  c.n_heads = 2;
  c.d_ff = 32;
  c.max_len = 32;
  c.dropout = 0.0;
  return c;
}

// Hand-set two-dimensional model with no encoder layers: keyword tokens embed
// to (6, 0) and every other token to (0, 1). Both heads score unsafe from
// the first coordinate, so a prompt is unsafe iff it holds a keyword and
// exactly the keyword words are flagged.
inline GuardrailModel keyword_model(const Vocabulary& vocab,
                                    std::span<const std::string> keywords) {
  EncoderConfig c;
  c.vocab_size = vocab.size();
  c.d_model = 2;
  c.n_layers = 0;
  c.n_heads = 1;
  c.d_ff = 1;
  c.max_len = 64;
  c.dropout = 0.0;
  auto p = ParameterSet::zeros(c);
  for (std::size_t id = 0; id < vocab.size(); ++id) {
    const auto& word = vocab.token(static_cast<TokenId>(id));
    const bool hit = std::find(keywords.begin(), keywords.end(), word) != keywords.end();
    p.token_embedding(id, 0) = hit ? 6.0 : 0.0;
    p.token_embedding(id, 1) = hit ? 0.0 : 1.0;
  }
  p.pool_w(0, 0) = 1.0;
  p.prompt_w(1, 0) = 1.0;
  p.prompt_b(0, 1) = -2.0;
  p.token_w(1, 0) = 1.0;
  p.token_b(0, 1) = -2.0;
  return GuardrailModel(c, std::move(p));
}

}  // namespace lexguard::testing

#endif  // LEXGUARD_TESTS_SUPPORT_FIXTURES_HPP_
