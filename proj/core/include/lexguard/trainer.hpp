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

#ifndef LEXGUARD_TRAINER_HPP_
#define LEXGUARD_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexguard/common.hpp"
#include "lexguard/corpus.hpp"
#include "lexguard/loss.hpp"
#include "lexguard/metrics.hpp"
#include "lexguard/net.hpp"
#include "lexguard/polarization.hpp"

namespace lexguard {

// Raised when a step produces a non-finite loss or gradient. what() carries
// the diagnostic dump of the offending batch.
class TrainingError : public Error {
 public:
  TrainingError(const std::string& message, nlohmann::json diagnostic);
  const nlohmann::json& diagnostic() const { return diagnostic_; }

 private:
  nlohmann::json diagnostic_;
};

enum class Selection { kBestDev, kLastEpoch };

std::string_view to_string(Selection selection);
Selection parse_selection(std::string_view text);

struct TrainConfig {
  double learning_rate = 2e-5;
  std::size_t batch_size = 16;
  std::size_t epochs = 3;
  std::uint64_t seed = 42;
  double weight_decay = 0.01;  // decoupled; never applied to log_variance
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double clip_norm = 1.0;  // 0 disables clipping
  Selection selection = Selection::kBestDev;
  std::vector<double> threshold_grid = default_threshold_grid();
  LossConfig loss;

  // Pretrained-backbone recipe: lr 2e-5, 3 epochs, keep the last epoch.
  static TrainConfig fine_tune();
  // From-scratch encoder: lr 3e-4, 30 epochs, best-dev selection.
  static TrainConfig desk();

  void validate() const;
  nlohmann::json to_json() const;
  // Missing keys keep the values of `base`; unknown keys throw Error.
  static TrainConfig from_json(const nlohmann::json& j, const TrainConfig& base);
  static TrainConfig from_json(const nlohmann::json& j) { return from_json(j, TrainConfig()); }
};

struct EpochReport {
  std::size_t epoch = 0;  // 1-based
  std::size_t steps = 0;
  LossBreakdown mean_loss;  // example-weighted over the epoch
  F1Score dev_prompt;
  F1Score dev_word;

  nlohmann::json to_json() const;
};

struct TrainReport {
  std::vector<EpochReport> epochs;
  // Best dev prompt unsafe-F1, ties broken by dev word unsafe-F1 and then
  // by the earliest epoch.
  std::size_t selected_epoch = 0;
  Selection selection = Selection::kBestDev;
  ThresholdChoice threshold;
  bool dev_is_train = false;  // no dev set given; train set used instead
  std::uint64_t polarization_checksum = 0;
  double wall_clock_seconds = 0.0;

  // Wall-clock is left out unless asked for, so reports of identical runs
  // compare byte-for-byte.
  nlohmann::json to_json(bool include_wall_clock = false) const;
};

struct StepEvent {
  std::size_t epoch = 0;
  std::size_t step = 0;  // global, 1-based
  std::span<const EncodedExample* const> batch;
  LossBreakdown loss;  // batch means
  const GuardrailModel& model_before;  // parameters used for this step's loss
};

using StepObserver = std::function<void(const StepEvent&)>;

// Fills delta_t for every supervised token (keyed on the token's own label)
// and delta_p for every example; unsupervised examples get an empty delta_t
// and delta_p = 0.
void attach_weak_supervision(std::span<EncodedExample> examples, const PolarizationTable& table);

// Best grid threshold on dev prompt unsafe-F1; ties go to the smallest value.
ThresholdChoice tune_threshold(const GuardrailModel& model,
                               std::span<const EncodedExample> dev,
                               std::span<const double> grid);

// Mean loss of `batch` and the parameter gradients it induces, including the
// log-variance entries. Dropout uses `dropout_rng` when non-null.
struct BatchGradient {
  LossBreakdown loss;
  ParameterSet grads;
};
BatchGradient batch_gradient(const GuardrailModel& model,
                             std::span<const EncodedExample* const> batch,
                             const LossConfig& config, std::mt19937_64* dropout_rng);

class AdamW {
 public:
  AdamW(const ParameterSet& shape, const TrainConfig& config);
  // Clips `grads` in place to the configured norm, then updates `params`
  // and rounds them to float precision. Returns the pre-clip norm.
  double step(ParameterSet& params, ParameterSet& grads);

 private:
  TrainConfig config_;
  ParameterSet m_;
  ParameterSet v_;
  std::size_t t_ = 0;
};

double global_norm(const ParameterSet& grads);

// Trains `model` in place from its current parameters. Examples must already
// carry their weak supervision. An empty dev set falls back to the train set
// for per-epoch scores, model selection and threshold tuning.
TrainReport train(GuardrailModel& model, std::span<const EncodedExample> train_set,
                  std::span<const EncodedExample> dev_set, const TrainConfig& config,
                  const StepObserver& observer = {});

struct DataOptions {
  std::size_t min_freq = 2;
  CountMode count_mode = CountMode::kPromptLabel;
  double polarization_epsilon = kDefaultPolarizationEpsilon;
  std::size_t max_tokens = 0;  // truncation length; 0 keeps whole prompts
};

// Vocabulary and polarization table come from `train` only. Polarization
// counts see whole prompts; truncation applies to the encoded examples.
struct PreparedData {
  Vocabulary vocab;
  PolarizationTable table;
  std::vector<EncodedExample> train;
  std::vector<EncodedExample> dev;
  ProjectionStats projection;
};

PreparedData prepare_data(std::span<const PromptRecord> train, std::span<const PromptRecord> dev,
                          const DataOptions& options = {});

}  // namespace lexguard

#endif  // LEXGUARD_TRAINER_HPP_
