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

#include "gradcheck.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "lexguard/polarization.hpp"
#include "lexguard/trainer.hpp"

namespace lexguard::testing {

GradCheckResult gradient_check(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> words = {"hack", "into", "bank", "bake", "bread", "now"};
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::uniform_int_distribution<std::size_t> length(2, 6);

  std::vector<PromptRecord> records;
  for (int i = 0; i < 3; ++i) {
    std::string text;
    const std::size_t n = length(rng);
    for (std::size_t w = 0; w < n; ++w) text += (w ? " " : "") + words[pick(rng)];
    const bool unsafe = text.find("hack") != std::string::npos;
    PromptRecord r{std::to_string(i), text, unsafe ? Label::kUnsafe : Label::kSafe,
                   std::nullopt, std::nullopt};
    if (unsafe) {
      r.explanation_words = std::vector<std::string>{"hack"};
    } else if (i != 2) {
      r.explanation_words = std::vector<std::string>{};  // third safe prompt stays unsupervised
    }
    records.push_back(std::move(r));
  }
  const auto vocab = Vocabulary::build(records, 1);
  const auto table = build_polarization_table(records, vocab);
  auto examples = encode_all(records, vocab);
  attach_weak_supervision(examples, table);
  std::vector<const EncodedExample*> batch;
  for (const auto& ex : examples) batch.push_back(&ex);

  EncoderConfig config;
  config.vocab_size = vocab.size();
  config.d_model = 8;
  config.n_layers = 1;
  config.n_heads = 2;
  config.d_ff = 16;
  config.max_len = 6;
  config.dropout = 0.0;
  auto model = GuardrailModel::initialize(config, seed);
  std::normal_distribution<double> noise(0.0, 0.3);
  model.mutable_params().log_variance(0, 0) = noise(rng);
  model.mutable_params().log_variance(0, 1) = noise(rng);
  // Non-trivial layer-norm parameters exercise their gradients too.
  for (auto& layer : model.mutable_params().layers) {
    for (Matrix* m : {&layer.ln1_gain, &layer.ln1_bias, &layer.ln2_gain, &layer.ln2_bias}) {
      for (double& v : m->values()) v += noise(rng);
    }
  }

  LossConfig loss;
  loss.gamma = 2.0;
  loss.use_weak_supervision = true;
  loss.use_uncertainty_weighting = true;

  const auto analytic = batch_gradient(model, batch, loss, nullptr).grads;
  auto total = [&] { return batch_gradient(model, batch, loss, nullptr).loss.total; };

  std::vector<const Matrix*> grad_tensors;
  analytic.for_each([&](const std::string&, const Matrix& m) { grad_tensors.push_back(&m); });

  GradCheckResult result;
  std::size_t k = 0;
  const double h = 1e-5;
  model.mutable_params().for_each([&](const std::string& name, Matrix& m) {
    const Matrix& a = *grad_tensors[k++];
    double diff = 0.0, norm_a = 0.0, norm_n = 0.0;
    auto values = m.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + h;
      const double up = total();
      values[i] = saved - h;
      const double down = total();
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic_i = a.values()[i];
      diff += (analytic_i - numeric) * (analytic_i - numeric);
      norm_a += analytic_i * analytic_i;
      norm_n += numeric * numeric;
    }
    const double scale = std::max(std::sqrt(norm_a), std::sqrt(norm_n));
    const double error = scale < 1e-9 ? 0.0 : std::sqrt(diff) / scale;
    if (error > result.max_relative_error) {
      result.max_relative_error = error;
      result.worst_group = name;
    }
  });
  return result;
}

}  // namespace lexguard::testing
