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

#include "lexguard/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "lexguard/evaluation.hpp"

namespace lexguard {

TrainingError::TrainingError(const std::string& message, nlohmann::json diagnostic)
    : Error(message + ": " + diagnostic.dump()), diagnostic_(std::move(diagnostic)) {}

std::string_view to_string(Selection selection) {
  return selection == Selection::kBestDev ? "best_dev" : "last_epoch";
}

Selection parse_selection(std::string_view text) {
  if (text == "best_dev") return Selection::kBestDev;
  if (text == "last_epoch") return Selection::kLastEpoch;
  throw Error("unknown selection mode '" + std::string(text) + "'");
}

TrainConfig TrainConfig::fine_tune() {
  TrainConfig c;
  c.learning_rate = 2e-5;
  c.epochs = 3;
  c.selection = Selection::kLastEpoch;
  return c;
}

TrainConfig TrainConfig::desk() {
  TrainConfig c;
  c.learning_rate = 3e-4;
  c.epochs = 30;
  c.selection = Selection::kBestDev;
  return c;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw Error("learning_rate must be finite and >= 0");
  }
  if (batch_size == 0) throw Error("batch_size must be positive");
  if (epochs == 0) throw Error("epochs must be positive");
  if (!(weight_decay >= 0.0)) throw Error("weight_decay must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw Error("betas must lie in [0, 1)");
  }
  if (!(adam_epsilon > 0.0)) throw Error("adam_epsilon must be positive");
  if (!(clip_norm >= 0.0)) throw Error("clip_norm must be >= 0");
  if (threshold_grid.empty()) throw Error("threshold_grid must not be empty");
  for (double t : threshold_grid) {
    if (!(t > 0.0 && t < 1.0)) throw Error("threshold grid values must lie in (0, 1)");
  }
  loss.validate();
}

nlohmann::json TrainConfig::to_json() const {
  return {{"learning_rate", learning_rate},
          {"batch_size", batch_size},
          {"epochs", epochs},
          {"seed", seed},
          {"weight_decay", weight_decay},
          {"beta1", beta1},
          {"beta2", beta2},
          {"adam_epsilon", adam_epsilon},
          {"clip_norm", clip_norm},
          {"selection", std::string(to_string(selection))},
          {"threshold_grid", threshold_grid},
          {"loss", loss.to_json()}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j, const TrainConfig& base) {
  if (!j.is_object()) throw Error("train config must be a JSON object");
  TrainConfig c = base;
  if (auto it = j.find("preset"); it != j.end()) {
    const auto name = it->get<std::string>();
    if (name == "desk") {
      c = desk();
    } else if (name == "fine_tune") {
      c = fine_tune();
    } else {
      throw Error("unknown train preset '" + name + "'");
    }
    c.loss = base.loss;
  }
  for (const auto& [key, value] : j.items()) {
    if (key == "preset") continue;
    if (key == "learning_rate") {
      c.learning_rate = value.get<double>();
    } else if (key == "batch_size") {
      c.batch_size = value.get<std::size_t>();
    } else if (key == "epochs") {
      c.epochs = value.get<std::size_t>();
    } else if (key == "seed") {
      c.seed = value.get<std::uint64_t>();
    } else if (key == "weight_decay") {
      c.weight_decay = value.get<double>();
    } else if (key == "beta1") {
      c.beta1 = value.get<double>();
    } else if (key == "beta2") {
      c.beta2 = value.get<double>();
    } else if (key == "adam_epsilon") {
      c.adam_epsilon = value.get<double>();
    } else if (key == "clip_norm") {
      c.clip_norm = value.get<double>();
    } else if (key == "selection") {
      c.selection = parse_selection(value.get<std::string>());
    } else if (key == "threshold_grid") {
      c.threshold_grid = value.get<std::vector<double>>();
    } else if (key == "loss") {
      c.loss = LossConfig::from_json(value, c.loss);
    } else {
      throw Error("unknown train config key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

nlohmann::json EpochReport::to_json() const {
  return {{"epoch", epoch},
          {"steps", steps},
          {"loss", mean_loss.to_json()},
          {"dev_prompt_f1", dev_prompt.to_json()},
          {"dev_word_f1", dev_word.to_json()}};
}

nlohmann::json TrainReport::to_json(bool include_wall_clock) const {
  nlohmann::json per_epoch = nlohmann::json::array();
  for (const auto& e : epochs) per_epoch.push_back(e.to_json());
  nlohmann::json j = {{"epochs", std::move(per_epoch)},
                      {"selection", std::string(to_string(selection))},
                      {"selected_epoch", selected_epoch},
                      {"threshold", threshold.threshold},
                      {"threshold_dev_f1", threshold.f1},
                      {"threshold_degenerate", threshold.degenerate},
                      {"dev_is_train", dev_is_train},
                      {"polarization_checksum", polarization_checksum}};
  if (include_wall_clock) j["wall_clock_seconds"] = wall_clock_seconds;
  return j;
}

void attach_weak_supervision(std::span<EncodedExample> examples, const PolarizationTable& table) {
  for (auto& ex : examples) {
    ex.delta_t.clear();
    ex.delta_p = 0.0;
    if (!ex.supervised()) continue;
    const auto& labels = *ex.token_labels;
    ex.delta_t.resize(ex.num_tokens());
    for (std::size_t t = 0; t < ex.num_tokens(); ++t) {
      ex.delta_t[t] = table.delta_token(ex.token_ids[t], labels[t]);
    }
    ex.delta_p = compute_delta_p(ex, table);
  }
}

ThresholdChoice tune_threshold(const GuardrailModel& model, std::span<const EncodedExample> dev,
                               std::span<const double> grid) {
  const auto scores = prompt_scores(model, dev);
  std::vector<Label> golds;
  golds.reserve(dev.size());
  for (const auto& ex : dev) golds.push_back(ex.label);
  auto choice = best_threshold(scores, golds, grid);
  choice.f1 = std::max(choice.f1, 0.0);
  return choice;
}

namespace {

std::vector<Matrix*> tensors(ParameterSet& p) {
  std::vector<Matrix*> out;
  p.for_each([&](const std::string&, Matrix& m) { out.push_back(&m); });
  return out;
}

nlohmann::json batch_diagnostic(std::span<const EncodedExample* const> batch,
                                const LossBreakdown& loss) {
  nlohmann::json ids = nlohmann::json::array();
  nlohmann::json tokens = nlohmann::json::array();
  for (const auto* ex : batch) {
    ids.push_back(ex->id);
    tokens.push_back(ex->token_ids);
  }
  return {{"example_ids", std::move(ids)}, {"token_ids", std::move(tokens)}, {"loss", loss.to_json()}};
}

}  // namespace

double global_norm(const ParameterSet& grads) {
  double sum = 0.0;
  grads.for_each([&](const std::string&, const Matrix& m) {
    for (double g : m.values()) sum += g * g;
  });
  return std::sqrt(sum);
}

BatchGradient batch_gradient(const GuardrailModel& model,
                             std::span<const EncodedExample* const> batch,
                             const LossConfig& config, std::mt19937_64* dropout_rng) {
  if (batch.empty()) throw Error("empty batch");
  const auto& lv = model.params().log_variance;
  const double s1 = lv(0, 0);
  const double s2 = lv(0, 1);
  const double inv_b = 1.0 / static_cast<double>(batch.size());

  std::vector<ForwardTrace> traces(batch.size());
  std::vector<ExampleLoss> losses;
  losses.reserve(batch.size());
  BatchGradient out;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    forward_train(model, batch[i]->token_ids, {}, dropout_rng, traces[i]);
    losses.push_back(example_loss(traces[i].output, *batch[i], config));
    const auto& p = losses.back().parts;
    out.loss.prompt_loss += p.prompt_loss * inv_b;
    out.loss.explanation_loss += p.explanation_loss * inv_b;
    out.loss.ce_p += p.ce_p * inv_b;
    out.loss.fl_p += p.fl_p * inv_b;
    out.loss.ce_t += p.ce_t * inv_b;
    out.loss.fl_t += p.fl_t * inv_b;
  }
  const auto joint = joint_loss_with_grad(out.loss.prompt_loss, out.loss.explanation_loss, s1,
                                          s2, config.use_uncertainty_weighting);
  out.loss.total = joint.value;
  out.loss.sigma1 = model.sigma(0);
  out.loss.sigma2 = model.sigma(1);

  out.grads = ParameterSet::zeros(model.config());
  if (!std::isfinite(joint.value)) return out;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    LogitGradients upstream;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      upstream.prompt[k] = losses[i].prompt_grads.prompt[k] * joint.d_prompt * inv_b;
    }
    upstream.token = std::move(losses[i].explanation_grads.token);
    for (double& g : upstream.token.values()) g *= joint.d_explanation * inv_b;
    backward(model, traces[i], upstream, out.grads);
  }
  out.grads.log_variance(0, 0) = joint.d_s1;
  out.grads.log_variance(0, 1) = joint.d_s2;
  return out;
}

AdamW::AdamW(const ParameterSet& shape, const TrainConfig& config)
    : config_(config), m_(shape), v_(shape) {
  m_.for_each([](const std::string&, Matrix& m) { m.fill(0.0); });
  v_.for_each([](const std::string&, Matrix& m) { m.fill(0.0); });
}

double AdamW::step(ParameterSet& params, ParameterSet& grads) {
  const double norm = global_norm(grads);
  if (config_.clip_norm > 0.0 && norm > config_.clip_norm) {
    const double scale = config_.clip_norm / norm;
    grads.for_each([&](const std::string&, Matrix& m) {
      for (double& g : m.values()) g *= scale;
    });
  }
  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double lr = config_.learning_rate;

  auto p = tensors(params);
  auto g = tensors(grads);
  auto m = tensors(m_);
  auto v = tensors(v_);
  Matrix* log_variance = &params.log_variance;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double decay = p[k] == log_variance ? 0.0 : config_.weight_decay;
    auto pv = p[k]->values();
    const auto gv = g[k]->values();
    auto mv = m[k]->values();
    auto vv = v[k]->values();
    for (std::size_t i = 0; i < pv.size(); ++i) {
      mv[i] = b1 * mv[i] + (1.0 - b1) * gv[i];
      vv[i] = b2 * vv[i] + (1.0 - b2) * gv[i] * gv[i];
      const double m_hat = mv[i] / correction1;
      const double v_hat = vv[i] / correction2;
      pv[i] -= lr * (m_hat / (std::sqrt(v_hat) + config_.adam_epsilon) + decay * pv[i]);
    }
  }
  round_to_float(params);
  return norm;
}

namespace {

void accumulate(LossBreakdown& acc, const LossBreakdown& batch, double weight) {
  acc.prompt_loss += batch.prompt_loss * weight;
  acc.explanation_loss += batch.explanation_loss * weight;
  acc.ce_p += batch.ce_p * weight;
  acc.fl_p += batch.fl_p * weight;
  acc.ce_t += batch.ce_t * weight;
  acc.fl_t += batch.fl_t * weight;
  acc.total += batch.total * weight;
}

}  // namespace

TrainReport train(GuardrailModel& model, std::span<const EncodedExample> train_set,
                  std::span<const EncodedExample> dev_set, const TrainConfig& config,
                  const StepObserver& observer) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  config.validate();
  if (train_set.empty()) throw DataError("training set is empty");

  TrainReport report;
  report.selection = config.selection;
  report.dev_is_train = dev_set.empty();
  const auto dev = dev_set.empty() ? train_set : dev_set;

  std::mt19937_64 shuffle_rng(config.seed);
  std::mt19937_64 dropout_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  AdamW optimizer(model.params(), config);

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<const EncodedExample*> batch;
  ParameterSet best_params = model.params();
  double best_prompt = -1.0;
  double best_word = -1.0;
  std::size_t step = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    EpochReport er;
    er.epoch = epoch;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      batch.clear();
      for (std::size_t i = begin; i < end; ++i) batch.push_back(&train_set[order[i]]);

      auto bg = batch_gradient(model, batch, config.loss, &dropout_rng);
      ++step;
      if (!std::isfinite(bg.loss.total) || !bg.grads.all_finite()) {
        auto diag = batch_diagnostic(batch, bg.loss);
        diag["epoch"] = epoch;
        diag["step"] = step;
        throw TrainingError("non-finite loss or gradient", std::move(diag));
      }
      if (observer) observer(StepEvent{epoch, step, batch, bg.loss, model});
      optimizer.step(model.mutable_params(), bg.grads);
      accumulate(er.mean_loss, bg.loss,
                 static_cast<double>(batch.size()) / static_cast<double>(train_set.size()));
      ++er.steps;
    }
    er.mean_loss.sigma1 = model.sigma(0);
    er.mean_loss.sigma2 = model.sigma(1);
    er.dev_prompt = prompt_f1(model, dev, 0.5);
    er.dev_word = word_f1(model, dev);
    // Prompt F1 first, word F1 second; strict comparison keeps the earliest
    // epoch on full ties.
    const bool better = er.dev_prompt.f1 > best_prompt ||
                        (er.dev_prompt.f1 == best_prompt && er.dev_word.f1 > best_word);
    if (config.selection == Selection::kLastEpoch || better) {
      best_prompt = er.dev_prompt.f1;
      best_word = er.dev_word.f1;
      best_params = model.params();
      report.selected_epoch = epoch;
    }
    report.epochs.push_back(std::move(er));
  }
  model.mutable_params() = std::move(best_params);
  report.threshold = tune_threshold(model, dev, config.threshold_grid);
  report.wall_clock_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

PreparedData prepare_data(std::span<const PromptRecord> train, std::span<const PromptRecord> dev,
                          const DataOptions& options) {
  if (train.empty()) throw DataError("training set is empty");
  auto vocab = Vocabulary::build(train, options.min_freq);
  auto table =
      build_polarization_table(train, vocab, options.count_mode, options.polarization_epsilon);
  PreparedData data{std::move(vocab), std::move(table), {}, {}, {}};
  data.train = encode_all(train, data.vocab, &data.projection);
  data.dev = encode_all(dev, data.vocab);
  for (auto& ex : data.train) truncate(ex, options.max_tokens);
  for (auto& ex : data.dev) truncate(ex, options.max_tokens);
  attach_weak_supervision(data.train, data.table);
  attach_weak_supervision(data.dev, data.table);
  return data;
}

}  // namespace lexguard
