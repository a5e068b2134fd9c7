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

#ifndef LEXGUARD_METRICS_HPP_
#define LEXGUARD_METRICS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexguard/common.hpp"

namespace lexguard {

// Confusion counts with "unsafe" as the positive class.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  void add(Label predicted, Label gold);
  std::size_t total() const { return tp + fp + fn + tn; }
  ConfusionCounts& operator+=(const ConfusionCounts& other);
  bool operator==(const ConfusionCounts&) const = default;
};

struct F1Score {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  ConfusionCounts counts;
  // No unsafe gold and no unsafe prediction: F1 is reported as 0.
  bool undefined = false;

  nlohmann::json to_json() const;
};

// Any zero denominator makes the corresponding quantity 0.
F1Score f1_from_counts(const ConfusionCounts& counts);

// Throws Error on length mismatch.
F1Score unsafe_f1(std::span<const Label> predictions, std::span<const Label> golds);

struct ThresholdChoice {
  double threshold = 0.5;
  double f1 = 0.0;
  bool degenerate = false;  // no unsafe gold labels at all
};

// Predicts unsafe when score >= threshold and returns the grid point with the
// highest unsafe-F1, preferring the smallest threshold on ties. Throws Error
// for an empty grid or mismatched lengths.
ThresholdChoice best_threshold(std::span<const double> scores, std::span<const Label> golds,
                               std::span<const double> grid);

// 0.05, 0.10, ..., 0.95
std::vector<double> default_threshold_grid();

// (p_o - p_e) / (1 - p_e) from the empirical marginals; 1 when p_e = 1.
// Throws Error for empty input or a length mismatch.
double cohens_kappa(std::span<const Label> a, std::span<const Label> b);

}  // namespace lexguard

#endif  // LEXGUARD_METRICS_HPP_
