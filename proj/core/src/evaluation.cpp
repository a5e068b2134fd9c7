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

#include "lexguard/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include <sys/resource.h>

namespace lexguard {

std::vector<double> prompt_scores(const GuardrailModel& model,
                                  std::span<const EncodedExample> examples) {
  std::vector<double> scores;
  scores.reserve(examples.size());
  for (const auto& ex : examples) scores.push_back(forward(model, ex.token_ids).prompt_unsafe());
  return scores;
}

F1Score prompt_f1(const GuardrailModel& model, std::span<const EncodedExample> examples,
                  double threshold) {
  ConfusionCounts counts;
  for (const auto& ex : examples) {
    const double p = forward(model, ex.token_ids).prompt_unsafe();
    counts.add(p >= threshold ? Label::kUnsafe : Label::kSafe, ex.label);
  }
  return f1_from_counts(counts);
}

namespace {

ConfusionCounts word_counts(const GuardrailModel& model, const EncodedExample& ex) {
  ConfusionCounts counts;
  if (!ex.supervised()) return counts;
  const auto out = forward(model, ex.token_ids);
  const auto gold = word_labels(ex);
  for (std::size_t w = 0; w < ex.word_spans.size(); ++w) {
    double best = 0.0;
    for (std::size_t t = ex.word_spans[w].begin; t < ex.word_spans[w].end; ++t) {
      best = std::max(best, out.token_unsafe(t));
    }
    counts.add(best >= 0.5 ? Label::kUnsafe : Label::kSafe, gold[w]);
  }
  return counts;
}

}  // namespace

F1Score word_f1(const GuardrailModel& model, std::span<const EncodedExample> examples) {
  ConfusionCounts counts;
  for (const auto& ex : examples) counts += word_counts(model, ex);
  return f1_from_counts(counts);
}

F1Score word_f1(const GuardrailModel& model, const Vocabulary& vocab,
                std::span<const PromptRecord> records) {
  return word_f1(model, encode_all(records, vocab));
}

std::string_view to_string(MaskMode mode) {
  return mode == MaskMode::kReplaceWithMask ? "replace_with_mask" : "remove";
}

MaskMode parse_mask_mode(std::string_view text) {
  if (text == "replace_with_mask" || text == "replace" || text == "mask") {
    return MaskMode::kReplaceWithMask;
  }
  if (text == "remove") return MaskMode::kRemove;
  throw DataError("unknown mask mode '" + std::string(text) + "'");
}

nlohmann::json FaithfulnessCurve::to_json() const {
  nlohmann::json at_k = nlohmann::json::object();
  for (const auto& [k, f1] : f1_at_k) at_k[std::to_string(k)] = f1;
  return {{"f1_full", f1_full},
          {"f1_at_k", std::move(at_k)},
          {"mask_mode", std::string(to_string(mask_mode))},
          {"threshold", threshold}};
}

std::vector<TokenId> mask_words(const EncodedExample& example,
                                std::span<const std::size_t> words, MaskMode mode) {
  std::vector<bool> hit(example.num_tokens(), false);
  for (std::size_t w : words) {
    const auto& span = example.word_spans.at(w);
    std::fill(hit.begin() + span.begin, hit.begin() + span.end, true);
  }
  std::vector<TokenId> ids;
  ids.reserve(example.num_tokens());
  for (std::size_t t = 0; t < example.num_tokens(); ++t) {
    if (!hit[t]) {
      ids.push_back(example.token_ids[t]);
    } else if (mode == MaskMode::kReplaceWithMask) {
      ids.push_back(Vocabulary::kMask);
    }
  }
  return ids;
}

std::vector<std::size_t> rank_unsafe_words(const GuardrailModel& model,
                                           const EncodedExample& example) {
  const auto out = forward(model, example.token_ids);
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t w = 0; w < example.word_spans.size(); ++w) {
    double best = 0.0;
    for (std::size_t t = example.word_spans[w].begin; t < example.word_spans[w].end; ++t) {
      best = std::max(best, out.token_unsafe(t));
    }
    if (best >= 0.5) ranked.emplace_back(best, w);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::size_t> order;
  for (const auto& [score, w] : ranked) order.push_back(w);
  return order;
}

FaithfulnessCurve faithfulness(const GuardrailModel& model,
                               std::span<const EncodedExample> examples,
                               std::span<const std::size_t> k_values, MaskMode mode,
                               double threshold) {
  if (k_values.empty()) throw Error("faithfulness needs at least one k");
  FaithfulnessCurve curve;
  curve.mask_mode = mode;
  curve.threshold = threshold;
  curve.f1_full = prompt_f1(model, examples, threshold).f1;

  std::map<std::size_t, ConfusionCounts> counts;
  for (const auto& ex : examples) {
    const auto ranked = rank_unsafe_words(model, ex);
    for (std::size_t k : k_values) {
      const std::span<const std::size_t> top(ranked.data(), std::min(k, ranked.size()));
      const auto ids = mask_words(ex, top, mode);
      const double p = ids.empty() ? 0.0 : forward(model, ids).prompt_unsafe();
      counts[k].add(p >= threshold ? Label::kUnsafe : Label::kSafe, ex.label);
    }
  }
  for (const auto& [k, c] : counts) curve.f1_at_k[k] = f1_from_counts(c).f1;
  return curve;
}

std::map<std::string, GroupScores> grouped_f1(const GuardrailModel& model,
                                              std::span<const EncodedExample> examples,
                                              double threshold) {
  std::map<std::string, ConfusionCounts> prompt_counts;
  std::map<std::string, ConfusionCounts> word_count_map;
  std::map<std::string, std::size_t> sizes;
  std::map<std::string, bool> has_words;
  for (const auto& ex : examples) {
    const std::string group = ex.category.value_or("others");
    ++sizes[group];
    const double p = forward(model, ex.token_ids).prompt_unsafe();
    prompt_counts[group].add(p >= threshold ? Label::kUnsafe : Label::kSafe, ex.label);
    if (ex.supervised()) {
      word_count_map[group] += word_counts(model, ex);
      has_words[group] = true;
    }
  }
  std::map<std::string, GroupScores> out;
  for (const auto& [group, n] : sizes) {
    GroupScores scores;
    scores.size = n;
    scores.prompt = f1_from_counts(prompt_counts[group]);
    if (has_words[group]) scores.word = f1_from_counts(word_count_map[group]);
    out.emplace(group, scores);
  }
  return out;
}

nlohmann::json LatencyReport::to_json() const {
  nlohmann::json j = {{"inputs_timed", inputs_timed},
                      {"warmup", warmup},
                      {"total_ms", total_ms},
                      {"mean_ms_per_input", mean_ms}};
  j["peak_rss_mb"] = peak_rss_mb ? nlohmann::json(*peak_rss_mb) : nlohmann::json("unavailable");
  return j;
}

std::optional<double> peak_rss_mb() {
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) != 0 || usage.ru_maxrss <= 0) return std::nullopt;
  return static_cast<double>(usage.ru_maxrss) / 1024.0;  // Linux reports KiB
}

LatencyReport latency_harness(const GuardrailModel& model, const Vocabulary& vocab,
                              std::span<const PromptRecord> records, double threshold) {
  using Clock = std::chrono::steady_clock;
  LatencyReport report;
  report.warmup = records.size() > 10 ? 10 : 0;
  for (std::size_t i = 0; i < report.warmup; ++i) {
    (void)predict(model, vocab, records[i].text, threshold);
  }
  const auto start = Clock::now();
  for (std::size_t i = report.warmup; i < records.size(); ++i) {
    (void)predict(model, vocab, records[i].text, threshold);
  }
  const auto stop = Clock::now();
  report.inputs_timed = records.size() - report.warmup;
  report.total_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  report.mean_ms =
      report.inputs_timed == 0 ? 0.0 : report.total_ms / static_cast<double>(report.inputs_timed);
  report.peak_rss_mb = peak_rss_mb();
  return report;
}

}  // namespace lexguard
