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

#include <random>

#include <gtest/gtest.h>

#include "lexguard/metrics.hpp"

namespace lexguard {
namespace {

constexpr double kTol = 1e-6;
constexpr Label S = Label::kSafe;
constexpr Label U = Label::kUnsafe;

TEST(F1, WorkedConfusionMatrix) {
  ConfusionCounts c;
  c.tp = 2;
  c.fp = 1;
  c.fn = 1;
  const auto f = f1_from_counts(c);
  EXPECT_NEAR(f.precision, 2.0 / 3.0, kTol);
  EXPECT_NEAR(f.recall, 2.0 / 3.0, kTol);
  EXPECT_NEAR(f.f1, 2.0 / 3.0, kTol);
}

TEST(F1, FromSequences) {
  const std::vector<Label> pred = {U, U, U, S, S};
  const std::vector<Label> gold = {U, U, S, U, S};
  const auto f = unsafe_f1(pred, gold);
  EXPECT_EQ(f.counts.tp, 2u);
  EXPECT_EQ(f.counts.fp, 1u);
  EXPECT_EQ(f.counts.fn, 1u);
  EXPECT_EQ(f.counts.tn, 1u);
  EXPECT_EQ(f.counts.total(), 5u);
  EXPECT_NEAR(f.f1, 2.0 / 3.0, kTol);
  EXPECT_DOUBLE_EQ(unsafe_f1(gold, gold).f1, 1.0);
}

TEST(F1, ZeroDivisionIsZero) {
  const std::vector<Label> all_safe = {S, S, S};
  const auto f = unsafe_f1(all_safe, all_safe);
  EXPECT_EQ(f.f1, 0.0);
  EXPECT_TRUE(f.undefined);
  EXPECT_THROW(unsafe_f1(std::vector<Label>{S}, all_safe), Error);
}

TEST(F1, OneIffNoErrorsProperty) {
  std::mt19937_64 rng(2);
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < 500; ++i) {
    std::vector<Label> p(6), g(6);
    for (std::size_t k = 0; k < 6; ++k) {
      p[k] = coin(rng) ? U : S;
      g[k] = coin(rng) ? U : S;
    }
    const auto f = unsafe_f1(p, g);
    EXPECT_GE(f.f1, 0.0);
    EXPECT_LE(f.f1, 1.0);
    EXPECT_EQ(f.f1 == 1.0, f.counts.fp == 0 && f.counts.fn == 0 && f.counts.tp > 0);
  }
}

std::pair<std::vector<Label>, std::vector<Label>> table(int uu, int us, int su, int ss) {
  std::vector<Label> a, b;
  auto push = [&](int n, Label x, Label y) {
    for (int i = 0; i < n; ++i) {
      a.push_back(x);
      b.push_back(y);
    }
  };
  push(uu, U, U);
  push(us, U, S);
  push(su, S, U);
  push(ss, S, S);
  return {a, b};
}

TEST(Kappa, WorkedTable) {
  // p_o = 0.7 and p_e = 0.5 give 0.4.
  const auto [a, b] = table(35, 15, 15, 35);
  EXPECT_NEAR(cohens_kappa(a, b), 0.4, kTol);
}

TEST(Kappa, AsymmetricMarginals) {
  // p_o = 0.6, p_e = 0.5 * 0.4 + 0.5 * 0.6 = 0.5.
  const auto [a, b] = table(25, 25, 15, 35);
  EXPECT_NEAR(cohens_kappa(a, b), 0.2, kTol);
}

TEST(Kappa, IdenticalAndConstant) {
  const std::vector<Label> x = {U, S, U, S, S};
  EXPECT_NEAR(cohens_kappa(x, x), 1.0, 1e-12);
  const std::vector<Label> c = {S, S, S};
  EXPECT_EQ(cohens_kappa(c, c), 1.0);
  EXPECT_THROW(cohens_kappa(x, c), Error);
}

TEST(Kappa, SymmetricAndNearZeroForIndependentLabels) {
  std::mt19937_64 rng(10);
  std::bernoulli_distribution coin(0.5);
  std::vector<Label> a(10000), b(10000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = coin(rng) ? U : S;
    b[i] = coin(rng) ? U : S;
  }
  EXPECT_LT(std::abs(cohens_kappa(a, b)), 0.1);
  EXPECT_DOUBLE_EQ(cohens_kappa(a, b), cohens_kappa(b, a));
}

TEST(BestThreshold, SingletonGrid) {
  const std::vector<double> scores = {0.2, 0.8};
  const std::vector<Label> golds = {S, U};
  const std::vector<double> grid = {0.35};
  EXPECT_EQ(best_threshold(scores, golds, grid).threshold, 0.35);
}

TEST(BestThreshold, SeparatedScoresPickSmallestPerfectPoint) {
  const std::vector<double> scores = {0.95, 0.9, 0.05, 0.1};
  const std::vector<Label> golds = {U, U, S, S};
  const auto grid = default_threshold_grid();
  const auto choice = best_threshold(scores, golds, grid);
  EXPECT_DOUBLE_EQ(choice.f1, 1.0);
  // 0.05 and 0.10 still flag a safe score; 0.15 is the first clean point.
  EXPECT_NEAR(choice.threshold, 0.15, 1e-12);
}

TEST(BestThreshold, DegenerateDevReturnsSmallest) {
  const std::vector<double> scores = {0.2, 0.8};
  const std::vector<Label> golds = {S, S};
  const std::vector<double> grid = {0.7, 0.3, 0.5};
  const auto choice = best_threshold(scores, golds, grid);
  EXPECT_TRUE(choice.degenerate);
  EXPECT_EQ(choice.threshold, 0.3);
  EXPECT_THROW(best_threshold(scores, golds, std::vector<double>{}), Error);
}

TEST(ThresholdGrid, Default) {
  const auto grid = default_threshold_grid();
  ASSERT_EQ(grid.size(), 19u);
  EXPECT_NEAR(grid.front(), 0.05, 1e-12);
  EXPECT_NEAR(grid.back(), 0.95, 1e-12);
}

}  // namespace
}  // namespace lexguard
