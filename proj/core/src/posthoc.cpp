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

#include "lexguard/posthoc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include <Eigen/Dense>

namespace lexguard {

Blackbox model_blackbox(const GuardrailModel& model, const Vocabulary& vocab) {
  return [&model, &vocab](std::span<const std::string> words) {
    if (words.empty()) {
      const std::vector<TokenId> ids{Vocabulary::kMask};
      return forward(model, ids).prompt_unsafe();
    }
    const auto tokens = encode_words(words, vocab);
    return forward(model, tokens.token_ids).prompt_unsafe();
  };
}

nlohmann::json LimeOptions::to_json() const {
  nlohmann::json j = {{"n_samples", n_samples},
                      {"top_k", top_k},
                      {"seed", seed},
                      {"ridge_lambda", ridge_lambda}};
  j["kernel_width"] = kernel_width ? nlohmann::json(*kernel_width) : nlohmann::json("auto");
  return j;
}

namespace {

std::vector<std::string> subset(std::span<const std::string> words, const std::vector<bool>& keep) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (keep[i]) out.push_back(words[i]);
  }
  return out;
}

// Indices of the k features with the largest |weighted correlation| with y.
std::vector<std::size_t> select_features(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                                         const Eigen::VectorXd& w, std::size_t k) {
  const auto n = static_cast<std::size_t>(z.cols());
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  if (k >= n) return all;

  const double wsum = w.sum();
  const double y_mean = w.dot(y) / wsum;
  const Eigen::VectorXd yc = y.array() - y_mean;
  const double y_var = w.dot(yc.cwiseProduct(yc));
  std::vector<double> score(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const Eigen::VectorXd col = z.col(static_cast<Eigen::Index>(j));
    const Eigen::VectorXd zc = col.array() - w.dot(col) / wsum;
    const double z_var = w.dot(zc.cwiseProduct(zc));
    if (z_var <= 0.0 || y_var <= 0.0) continue;
    score[j] = std::abs(w.dot(zc.cwiseProduct(yc)) / std::sqrt(z_var * y_var));
  }
  std::stable_sort(all.begin(), all.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

std::vector<double> lime_explain(std::span<const std::string> words, const Blackbox& blackbox,
                                 const LimeOptions& options) {
  const std::size_t n = words.size();
  if (n == 0) return {};
  if (n == 1) return {blackbox(words) - blackbox({})};
  if (options.n_samples < 2) throw Error("LIME needs at least two samples");

  std::mt19937_64 rng(options.seed);
  std::bernoulli_distribution keep_word(0.5);
  const double width = options.kernel_width.value_or(0.75 * std::sqrt(static_cast<double>(n)));
  if (!(width > 0.0)) throw Error("LIME kernel width must be positive");

  const auto rows = static_cast<Eigen::Index>(options.n_samples);
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(n));
  Eigen::VectorXd y(rows);
  Eigen::VectorXd weight(rows);
  std::vector<bool> keep(n, true);
  for (Eigen::Index s = 0; s < rows; ++s) {
    std::size_t present = n;
    if (s > 0) {
      present = 0;
      for (std::size_t i = 0; i < n; ++i) {
        keep[i] = keep_word(rng);
        present += keep[i] ? 1 : 0;
      }
    }
    for (std::size_t i = 0; i < n; ++i) z(s, static_cast<Eigen::Index>(i)) = keep[i] ? 1.0 : 0.0;
    y(s) = blackbox(subset(words, keep));
    const double distance =
        1.0 - std::sqrt(static_cast<double>(present) / static_cast<double>(n));
    weight(s) = std::exp(-(distance * distance) / (width * width));
  }

  // A flat response has nothing to attribute; skip the solve and its
  // round-off.
  if ((y.array() == y(0)).all()) return std::vector<double>(n, 0.0);

  const auto selected = select_features(z, y, weight, options.top_k);
  const auto p = static_cast<Eigen::Index>(selected.size());
  Eigen::MatrixXd x(rows, p + 1);
  x.col(0).setOnes();
  for (Eigen::Index j = 0; j < p; ++j) x.col(j + 1) = z.col(static_cast<Eigen::Index>(selected[j]));

  Eigen::MatrixXd gram = x.transpose() * weight.asDiagonal() * x;
  for (Eigen::Index j = 1; j <= p; ++j) gram(j, j) += options.ridge_lambda;
  const Eigen::VectorXd rhs = x.transpose() * weight.cwiseProduct(y);
  const Eigen::VectorXd beta = gram.ldlt().solve(rhs);

  std::vector<double> out(n, 0.0);
  for (Eigen::Index j = 0; j < p; ++j) out[selected[j]] = beta(j + 1);
  return out;
}

ThresholdChoice lime_threshold(const std::vector<std::vector<double>>& weights,
                               const std::vector<std::vector<Label>>& gold,
                               std::span<const double> grid) {
  if (weights.size() != gold.size()) throw Error("weight/gold prompt count mismatch");
  std::vector<double> flat_scores;
  std::vector<Label> flat_gold;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i].size() != gold[i].size()) throw Error("weight/gold word count mismatch");
    flat_scores.insert(flat_scores.end(), weights[i].begin(), weights[i].end());
    flat_gold.insert(flat_gold.end(), gold[i].begin(), gold[i].end());
  }
  return best_threshold(flat_scores, flat_gold, grid);
}

namespace {

std::vector<double> exact_shapley(std::size_t n, const CoalitionValue& value) {
  const std::size_t coalitions = std::size_t{1} << n;
  std::vector<double> v(coalitions);
  std::vector<bool> present(n);
  for (std::size_t mask = 0; mask < coalitions; ++mask) {
    for (std::size_t i = 0; i < n; ++i) present[i] = ((mask >> i) & 1U) != 0;
    v[mask] = value(present);
  }
  // weight[s] = s! (n - s - 1)! / n!
  std::vector<double> weight(n);
  for (std::size_t s = 0; s < n; ++s) {
    weight[s] = std::exp(std::lgamma(static_cast<double>(s + 1)) +
                         std::lgamma(static_cast<double>(n - s)) -
                         std::lgamma(static_cast<double>(n + 1)));
  }
  std::vector<double> phi(n, 0.0);
  for (std::size_t mask = 0; mask < coalitions; ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    for (std::size_t i = 0; i < n; ++i) {
      if ((mask >> i) & 1U) continue;
      phi[i] += weight[size] * (v[mask | (std::size_t{1} << i)] - v[mask]);
    }
  }
  return phi;
}

std::vector<double> permutation_shapley(std::size_t n, const CoalitionValue& value,
                                        const ShapleyOptions& options) {
  if (options.n_permutations == 0) throw Error("permutation Shapley needs at least one order");
  std::map<std::vector<bool>, double> cache;
  auto eval = [&](const std::vector<bool>& present) {
    auto it = cache.find(present);
    if (it != cache.end()) return it->second;
    const double v = value(present);
    cache.emplace(present, v);
    return v;
  };

  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(n, 0.0);
  for (std::size_t r = 0; r < options.n_permutations; ++r) {
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<bool> present(n, false);
    double previous = eval(present);
    for (std::size_t i : order) {
      present[i] = true;
      const double current = eval(present);
      phi[i] += current - previous;
      previous = current;
    }
  }
  for (double& x : phi) x /= static_cast<double>(options.n_permutations);
  return phi;
}

}  // namespace

std::vector<double> shapley_values(std::size_t n_players, const CoalitionValue& value,
                                   const ShapleyOptions& options) {
  if (n_players == 0) return {};
  if (options.mode == ShapleyOptions::Mode::kExact) {
    if (n_players > kMaxExactShapleyPlayers) {
      throw Error("exact Shapley supports at most " + std::to_string(kMaxExactShapleyPlayers) +
                  " players, got " + std::to_string(n_players));
    }
    return exact_shapley(n_players, value);
  }
  return permutation_shapley(n_players, value, options);
}

std::vector<double> shapley_explain(std::span<const std::string> tokens,
                                    std::span<const WordSpan> spans, const Blackbox& blackbox,
                                    const ShapleyOptions& options) {
  const std::vector<std::string> all(tokens.begin(), tokens.end());
  const auto phi = shapley_values(
      tokens.size(),
      [&](const std::vector<bool>& present) {
        std::vector<std::string> words = all;
        for (std::size_t i = 0; i < words.size(); ++i) {
          if (!present[i]) words[i] = std::string(kMaskWord);
        }
        return blackbox(words);
      },
      options);
  if (spans.empty()) return phi;
  std::vector<double> per_word;
  per_word.reserve(spans.size());
  for (const auto& span : spans) {
    if (span.end > phi.size() || span.begin > span.end) throw Error("word span out of range");
    per_word.push_back(std::accumulate(phi.begin() + span.begin, phi.begin() + span.end, 0.0));
  }
  return per_word;
}

}  // namespace lexguard
