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

#include "lexguard/loss.hpp"

#include <algorithm>
#include <cmath>

namespace lexguard {

void LossConfig::validate() const {
  if (!(gamma >= 0.0)) throw Error("gamma must be >= 0");
  if (!(epsilon_prob > 0.0 && epsilon_prob <= 1e-3)) {
    throw Error("epsilon_prob must lie in (0, 1e-3]");
  }
}

nlohmann::json LossConfig::to_json() const {
  return {{"gamma", gamma},
          {"epsilon_prob", epsilon_prob},
          {"use_weak_supervision", use_weak_supervision},
          {"use_uncertainty_weighting", use_uncertainty_weighting}};
}

LossConfig LossConfig::from_json(const nlohmann::json& j, const LossConfig& base) {
  if (!j.is_object()) throw Error("loss config must be a JSON object");
  LossConfig c = base;
  for (const auto& [key, value] : j.items()) {
    if (key == "gamma") {
      c.gamma = value.get<double>();
    } else if (key == "epsilon_prob") {
      c.epsilon_prob = value.get<double>();
    } else if (key == "use_weak_supervision") {
      c.use_weak_supervision = value.get<bool>();
    } else if (key == "use_uncertainty_weighting") {
      c.use_uncertainty_weighting = value.get<bool>();
    } else {
      throw Error("unknown loss config key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

double cross_entropy(const ClassProbs& probs, Label label, double epsilon_prob) {
  return -std::log(std::max(probs[index(label)], epsilon_prob));
}

double focal(const ClassProbs& probs, Label label, double gamma, double epsilon_prob) {
  const double p = std::max(probs[index(label)], epsilon_prob);
  return std::pow(1.0 - p, gamma) * cross_entropy(probs, label, epsilon_prob);
}

double prompt_loss(const ClassProbs& probs, Label label, double delta_p, double gamma,
                   double epsilon_prob) {
  return modulated_cross_entropy(probs, label, delta_p, gamma, epsilon_prob).value;
}

ModulatedLoss modulated_cross_entropy(const ClassProbs& probs, Label label, double delta,
                                      double gamma, double epsilon_prob) {
  const std::size_t y = index(label);
  const double p = probs[y];
  const bool clamped = p <= epsilon_prob;
  const double pc = clamped ? epsilon_prob : p;
  const double one_minus = 1.0 - pc;

  ModulatedLoss out;
  out.ce = -std::log(pc);
  const double mod = std::pow(one_minus, gamma);
  out.focal = mod * out.ce;
  out.value = out.ce + delta * out.focal;

  if (clamped) return out;  // zero gradient below the floor
  double dmod = 0.0;
  if (gamma != 0.0) {
    if (one_minus > 0.0) {
      dmod = -gamma * std::pow(one_minus, gamma - 1.0);
    } else if (gamma == 1.0) {
      dmod = -1.0;
    }
  }
  const double dce = -1.0 / pc;
  const double dp = dce * (1.0 + delta * mod) + delta * out.ce * dmod;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    out.dlogits[k] = dp * p * ((k == y ? 1.0 : 0.0) - probs[k]);
  }
  return out;
}

double explanation_loss(const Matrix& token_probs, std::span<const Label> token_labels,
                        std::span<const double> delta_t, bool supervised,
                        const PadMask& pad, double gamma, double epsilon_prob) {
  if (!supervised) return 0.0;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < token_labels.size(); ++t) {
    if (!pad.empty() && pad[t]) continue;
    const ClassProbs probs = {token_probs(t, 0), token_probs(t, 1)};
    const double delta = delta_t.empty() ? 0.0 : delta_t[t];
    sum += modulated_cross_entropy(probs, token_labels[t], delta, gamma, epsilon_prob).value;
    ++count;
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

JointLoss joint_loss_with_grad(double prompt, double explanation, double s1, double s2,
                               bool use_uncertainty_weighting) {
  JointLoss out;
  if (!use_uncertainty_weighting) {
    out.value = prompt + explanation;
    out.d_prompt = 1.0;
    out.d_explanation = 1.0;
    return out;
  }
  const double w1 = 0.5 * std::exp(-s1);
  const double w2 = 0.5 * std::exp(-s2);
  out.value = w1 * prompt + w2 * explanation + 0.5 * s1 + 0.5 * s2;
  out.d_prompt = w1;
  out.d_explanation = w2;
  out.d_s1 = -w1 * prompt + 0.5;
  out.d_s2 = -w2 * explanation + 0.5;
  return out;
}

double joint_loss(double prompt, double explanation, double s1, double s2,
                  bool use_uncertainty_weighting) {
  return joint_loss_with_grad(prompt, explanation, s1, s2, use_uncertainty_weighting).value;
}

nlohmann::json LossBreakdown::to_json() const {
  return {{"L_pc", prompt_loss}, {"L_ec", explanation_loss}, {"CE_p", ce_p},
          {"FL_p", fl_p},        {"CE_t", ce_t},             {"FL_t", fl_t},
          {"total", total},      {"sigma1", sigma1},         {"sigma2", sigma2}};
}

ExampleLoss example_loss(const ForwardOutput& output, const EncodedExample& example,
                         const LossConfig& config) {
  const bool weak = config.use_weak_supervision;
  const std::size_t T = example.num_tokens();
  ExampleLoss out;

  const auto prompt = modulated_cross_entropy(output.prompt_probs, example.label,
                                              weak ? example.delta_p : 0.0,
                                              config.gamma, config.epsilon_prob);
  out.parts.prompt_loss = prompt.value;
  out.parts.ce_p = prompt.ce;
  out.parts.fl_p = prompt.focal;
  out.prompt_grads.prompt = prompt.dlogits;

  out.explanation_grads.token = Matrix(T, kNumClasses);
  if (!example.supervised() || T == 0) return out;
  const auto& labels = *example.token_labels;
  const double inv = 1.0 / static_cast<double>(T);
  for (std::size_t t = 0; t < T; ++t) {
    const ClassProbs probs = {output.token_probs(t, 0), output.token_probs(t, 1)};
    const double delta = weak && !example.delta_t.empty() ? example.delta_t[t] : 0.0;
    const auto term = modulated_cross_entropy(probs, labels[t], delta, config.gamma,
                                              config.epsilon_prob);
    out.parts.explanation_loss += term.value * inv;
    out.parts.ce_t += term.ce * inv;
    out.parts.fl_t += term.focal * inv;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      out.explanation_grads.token(t, k) = term.dlogits[k] * inv;
    }
  }
  return out;
}

}  // namespace lexguard
