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

#ifndef LEXGUARD_NET_HPP_
#define LEXGUARD_NET_HPP_

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexguard/common.hpp"
#include "lexguard/corpus.hpp"
#include "lexguard/tensor.hpp"

namespace lexguard {

struct EncoderConfig {
  std::size_t vocab_size = 0;
  std::size_t d_model = 32;
  std::size_t n_layers = 2;
  std::size_t n_heads = 4;
  std::size_t d_ff = 64;
  std::size_t max_len = 128;
  double dropout = 0.1;

  // Throws Error unless every size is positive (n_layers may be 0), d_model
  // divides by n_heads and dropout lies in [0, 1).
  void validate() const;

  nlohmann::json to_json() const;
  static EncoderConfig from_json(const nlohmann::json& j);
  bool operator==(const EncoderConfig&) const = default;
};

// Pre-norm transformer block parameters. Projection weights are stored
// input-major (d_in x d_out) so activations multiply on the left.
struct EncoderLayer {
  Matrix ln1_gain, ln1_bias;
  Matrix query_w, query_b, key_w, key_b, value_w, value_b, out_w, out_b;
  Matrix ln2_gain, ln2_bias;
  Matrix ff_in_w, ff_in_b, ff_out_w, ff_out_b;

  bool operator==(const EncoderLayer&) const = default;
};

struct ParameterSet {
  Matrix token_embedding;     // vocab x d
  Matrix position_embedding;  // max_len x d
  std::vector<EncoderLayer> layers;
  Matrix pool_w;        // 1 x d
  Matrix pool_b;        // 1 x 1
  Matrix prompt_w;      // 2 x d
  Matrix prompt_b;      // 1 x 2
  Matrix token_w;       // 2 x d
  Matrix token_b;       // 1 x 2
  Matrix log_variance;  // 1 x 2, s_k = log sigma_k^2 per task

  static ParameterSet zeros(const EncoderConfig& config);

  // Visits every tensor in a fixed order as fn(name, matrix).
  template <typename Fn>
  void for_each(Fn&& fn) {
    visit(*this, fn);
  }
  template <typename Fn>
  void for_each(Fn&& fn) const {
    visit(*this, fn);
  }

  std::size_t count() const;
  bool all_finite() const;
  bool operator==(const ParameterSet&) const = default;

 private:
  template <typename Self, typename Fn>
  static void visit(Self& self, Fn& fn) {
    fn("token_embedding", self.token_embedding);
    fn("position_embedding", self.position_embedding);
    for (std::size_t l = 0; l < self.layers.size(); ++l) {
      auto& layer = self.layers[l];
      const std::string p = "layers." + std::to_string(l) + ".";
      fn(p + "ln1_gain", layer.ln1_gain);
      fn(p + "ln1_bias", layer.ln1_bias);
      fn(p + "query_w", layer.query_w);
      fn(p + "query_b", layer.query_b);
      fn(p + "key_w", layer.key_w);
      fn(p + "key_b", layer.key_b);
      fn(p + "value_w", layer.value_w);
      fn(p + "value_b", layer.value_b);
      fn(p + "out_w", layer.out_w);
      fn(p + "out_b", layer.out_b);
      fn(p + "ln2_gain", layer.ln2_gain);
      fn(p + "ln2_bias", layer.ln2_bias);
      fn(p + "ff_in_w", layer.ff_in_w);
      fn(p + "ff_in_b", layer.ff_in_b);
      fn(p + "ff_out_w", layer.ff_out_w);
      fn(p + "ff_out_b", layer.ff_out_b);
    }
    fn("pool_w", self.pool_w);
    fn("pool_b", self.pool_b);
    fn("prompt_w", self.prompt_w);
    fn("prompt_b", self.prompt_b);
    fn("token_w", self.token_w);
    fn("token_b", self.token_b);
    fn("log_variance", self.log_variance);
  }
};

// Rounds every value to the nearest float32 so checkpoints store parameters
// exactly.
void round_to_float(ParameterSet& params);

class GuardrailModel {
 public:
  // Throws Error if `params` does not have the shapes `config` implies.
  GuardrailModel(EncoderConfig config, ParameterSet params);

  // Random init: embeddings N(0, 0.1), projections Xavier-uniform, layer-norm
  // gains 1, biases and log-variances 0.
  static GuardrailModel initialize(const EncoderConfig& config, std::uint64_t seed);

  const EncoderConfig& config() const { return config_; }
  const ParameterSet& params() const { return params_; }
  ParameterSet& mutable_params() { return params_; }

  // sigma_k = exp(s_k / 2) for task 0 (prompt) or 1 (explanation).
  double sigma(std::size_t task) const;

 private:
  EncoderConfig config_;
  ParameterSet params_;
};

std::size_t count_params(const GuardrailModel& model);

// true marks a PAD position. An empty mask means no padding.
using PadMask = std::vector<bool>;

struct ForwardOutput {
  Matrix hidden;                      // T x d
  std::vector<double> pooled;         // d
  std::array<double, 2> prompt_probs{};
  Matrix token_probs;                 // T x 2
  std::vector<double> attention;      // T, zero on PAD positions

  double prompt_unsafe() const { return prompt_probs[index(Label::kUnsafe)]; }
  double token_unsafe(std::size_t t) const {
    return token_probs(t, index(Label::kUnsafe));
  }
};

// Throws Error if the sequence is empty, longer than max_len, contains an
// out-of-range id, is entirely padding, or produces a non-finite output.
ForwardOutput forward(const GuardrailModel& model, std::span<const TokenId> ids,
                      const PadMask& pad = {});

// Attention pooling plus both heads on given hidden states.
ForwardOutput apply_heads(const GuardrailModel& model, const Matrix& hidden,
                          const PadMask& pad = {});

// Intermediate activations kept for the backward pass.
struct ForwardTrace {
  struct Layer {
    Matrix input, ln1_norm, ln1_out;
    std::vector<double> ln1_rstd;
    Matrix query, key, value;
    std::vector<Matrix> attn;  // per head, T x T
    Matrix context, attn_drop;
    Matrix mid, ln2_norm, ln2_out;
    std::vector<double> ln2_rstd;
    Matrix ff_pre, ff_act, ff_drop;
  };
  std::vector<TokenId> ids;
  PadMask pad;
  std::vector<Layer> layers;
  ForwardOutput output;
};

// Like forward(), recording a trace. Dropout is active iff `dropout_rng` is
// non-null and the config's rate is positive.
ForwardOutput forward_train(const GuardrailModel& model, std::span<const TokenId> ids,
                            const PadMask& pad, std::mt19937_64* dropout_rng,
                            ForwardTrace& trace);

// Loss gradients with respect to the head logits.
struct LogitGradients {
  std::array<double, 2> prompt{};
  Matrix token;  // T x 2; rows of PAD positions must be zero
};

// Accumulates parameter gradients into `grads` (which must have the model's
// shapes). The log-variance entries are left untouched.
void backward(const GuardrailModel& model, const ForwardTrace& trace,
              const LogitGradients& upstream, ParameterSet& grads);

// Per-word unsafe confidence: the max over the word's tokens.
struct WordScores {
  std::vector<std::string> words;
  std::vector<double> unsafe;
  double prompt_unsafe = 0.0;
};

WordScores score_words(const GuardrailModel& model, const Tokenized& tokens);

struct Verdict {
  Label safety_label = Label::kSafe;
  std::vector<std::string> explanation;             // text order
  std::vector<std::size_t> explanation_positions;   // word indices
  std::vector<std::string> words;
  std::vector<double> word_scores;
  double prompt_score = 0.0;
};

// Unsafe iff the prompt unsafe probability reaches `threshold`. The
// explanation lists words with confidence >= 0.5, and only for unsafe
// verdicts. Text longer than the model's max_len is cut at a word
// boundary. Throws DataError for empty text and Error for a threshold
// outside (0, 1).
Verdict predict(const GuardrailModel& model, const Vocabulary& vocab,
                std::string_view text, double threshold = 0.5);
Verdict predict(const GuardrailModel& model, const Tokenized& tokens,
                double threshold = 0.5);

}  // namespace lexguard

#endif  // LEXGUARD_NET_HPP_
