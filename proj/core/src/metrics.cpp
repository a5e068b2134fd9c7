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

#include "lexguard/metrics.hpp"

#include <algorithm>

namespace lexguard {

void ConfusionCounts::add(Label predicted, Label gold) {
  if (gold == Label::kUnsafe) {
    ++(predicted == Label::kUnsafe ? tp : fn);
  } else {
    ++(predicted == Label::kUnsafe ? fp : tn);
  }
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  tn += other.tn;
  return *this;
}

nlohmann::json F1Score::to_json() const {
  return {{"precision", precision},
          {"recall", recall},
          {"f1", f1},
          {"tp", counts.tp},
          {"fp", counts.fp},
          {"fn", counts.fn},
          {"tn", counts.tn},
          {"undefined", undefined}};
}

F1Score f1_from_counts(const ConfusionCounts& counts) {
  F1Score score;
  score.counts = counts;
  const auto tp = static_cast<double>(counts.tp);
  if (counts.tp + counts.fp > 0) score.precision = tp / static_cast<double>(counts.tp + counts.fp);
  if (counts.tp + counts.fn > 0) score.recall = tp / static_cast<double>(counts.tp + counts.fn);
  if (score.precision + score.recall > 0.0) {
    score.f1 = 2.0 * score.precision * score.recall / (score.precision + score.recall);
  }
  score.undefined = counts.tp + counts.fp + counts.fn == 0;
  return score;
}

F1Score unsafe_f1(std::span<const Label> predictions, std::span<const Label> golds) {
  if (predictions.size() != golds.size()) throw Error("prediction/gold length mismatch");
  ConfusionCounts counts;
  for (std::size_t i = 0; i < golds.size(); ++i) counts.add(predictions[i], golds[i]);
  return f1_from_counts(counts);
}

ThresholdChoice best_threshold(std::span<const double> scores, std::span<const Label> golds,
                               std::span<const double> grid) {
  if (grid.empty()) throw Error("threshold grid is empty");
  if (scores.size() != golds.size()) throw Error("score/gold length mismatch");
  std::vector<double> sorted(grid.begin(), grid.end());
  std::sort(sorted.begin(), sorted.end());

  ThresholdChoice best;
  best.threshold = sorted.front();
  best.f1 = -1.0;
  std::vector<Label> predicted(scores.size());
  for (double threshold : sorted) {
    for (std::size_t i = 0; i < scores.size(); ++i) {
      predicted[i] = scores[i] >= threshold ? Label::kUnsafe : Label::kSafe;
    }
    const double f1 = unsafe_f1(predicted, golds).f1;
    if (f1 > best.f1) {
      best.f1 = f1;
      best.threshold = threshold;
    }
  }
  best.degenerate = std::none_of(golds.begin(), golds.end(),
                                 [](Label g) { return g == Label::kUnsafe; });
  return best;
}

std::vector<double> default_threshold_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) grid.push_back(i * 0.05);
  return grid;
}

double cohens_kappa(std::span<const Label> a, std::span<const Label> b) {
  if (a.size() != b.size()) throw Error("annotation length mismatch");
  if (a.empty()) throw Error("kappa needs at least one item");
  const auto n = static_cast<double>(a.size());
  double agree = 0.0;
  double a_unsafe = 0.0;
  double b_unsafe = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    agree += a[i] == b[i] ? 1.0 : 0.0;
    a_unsafe += a[i] == Label::kUnsafe ? 1.0 : 0.0;
    b_unsafe += b[i] == Label::kUnsafe ? 1.0 : 0.0;
  }
  const double p_o = agree / n;
  const double pa = a_unsafe / n;
  const double pb = b_unsafe / n;
  const double p_e = pa * pb + (1.0 - pa) * (1.0 - pb);
  if (p_e >= 1.0) return 1.0;
  return (p_o - p_e) / (1.0 - p_e);
}

}  // namespace lexguard
