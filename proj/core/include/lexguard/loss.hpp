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

#ifndef LEXGUARD_LOSS_HPP_
#define LEXGUARD_LOSS_HPP_

#include <array>
#include <span>

#include <nlohmann/json.hpp>

#include "lexguard/common.hpp"
#include "lexguard/corpus.hpp"
#include "lexguard/net.hpp"

namespace lexguard {

struct LossConfig {
  double gamma = 2.0;           // focal exponent
  double epsilon_prob = 1e-7;   // probability floor before logs and powers
  bool use_weak_supervision = true;
  bool use_uncertainty_weighting = true;

  void validate() const;
  nlohmann::json to_json() const;
  // Missing keys keep the values of `base`; unknown keys throw Error.
  static LossConfig from_json(const nlohmann::json& j, const LossConfig& base);
  static LossConfig from_json(const nlohmann::json& j) { return from_json(j, LossConfig()); }
  bool operator==(const LossConfig&) const = default;
};

using ClassProbs = std::array<double, 2>;

// -log(max(p_label, epsilon_prob))
double cross_entropy(const ClassProbs& probs, Label label, double epsilon_prob = 1e-7);

// (1 - p_t)^gamma * CE with p_t the clamped true-class probability.
double focal(const ClassProbs& probs, Label label, double gamma,
             double epsilon_prob = 1e-7);

// CE + delta * FL = [1 + delta (1 - p_t)^gamma] CE
double prompt_loss(const ClassProbs& probs, Label label, double delta_p, double gamma,
                   double epsilon_prob = 1e-7);

// Mean over supervised non-PAD tokens of CE_t + delta_t * FL_t; zero for
// unsupervised examples or when no token qualifies.
double explanation_loss(const Matrix& token_probs, std::span<const Label> token_labels,
                        std::span<const double> delta_t, bool supervised,
                        const PadMask& pad, double gamma, double epsilon_prob = 1e-7);

// 1/2 e^{-s1} L_pc + 1/2 e^{-s2} L_ec + 1/2 s1 + 1/2 s2 with s_k = log sigma_k^2,
// or the plain sum when uncertainty weighting is off.
double joint_loss(double prompt, double explanation, double s1, double s2,
                  bool use_uncertainty_weighting = true);

// CE + delta * FL for one 2-way softmax with its gradient w.r.t. the logits.
struct ModulatedLoss {
  double value = 0.0;
  double ce = 0.0;
  double focal = 0.0;
  std::array<double, 2> dlogits{};
};
ModulatedLoss modulated_cross_entropy(const ClassProbs& probs, Label label, double delta,
                                      double gamma, double epsilon_prob);

struct JointLoss {
  double value = 0.0;
  double d_prompt = 0.0;       // dL / dL_pc
  double d_explanation = 0.0;  // dL / dL_ec
  double d_s1 = 0.0;
  double d_s2 = 0.0;
};
JointLoss joint_loss_with_grad(double prompt, double explanation, double s1, double s2,
                               bool use_uncertainty_weighting);

// Logged per step and aggregated per epoch.
struct LossBreakdown {
  double prompt_loss = 0.0;       // L_pc
  double explanation_loss = 0.0;  // L_ec
  double ce_p = 0.0;
  double fl_p = 0.0;
  double ce_t = 0.0;  // mean over supervised tokens
  double fl_t = 0.0;
  double total = 0.0;
  double sigma1 = 1.0;
  double sigma2 = 1.0;

  nlohmann::json to_json() const;
};

// Both task losses of one example plus their gradients w.r.t. the logits
// (unweighted by the joint combination).
struct ExampleLoss {
  LossBreakdown parts;  // total, sigma1 and sigma2 left at defaults
  LogitGradients prompt_grads;
  LogitGradients explanation_grads;
};

// Uses the example's attached deltas unless weak supervision is disabled, in
// which case both deltas are treated as zero.
ExampleLoss example_loss(const ForwardOutput& output, const EncodedExample& example,
                         const LossConfig& config);

}  // namespace lexguard

#endif  // LEXGUARD_LOSS_HPP_
