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

#include "lexguard/polarization.hpp"

#include <bit>
#include <cstdlib>

namespace lexguard {

std::string_view to_string(CountMode mode) {
  return mode == CountMode::kPromptLabel ? "prompt_label" : "token_label";
}

CountMode parse_count_mode(std::string_view text) {
  if (text == "prompt_label" || text == "prompt") return CountMode::kPromptLabel;
  if (text == "token_label" || text == "token") return CountMode::kTokenLabel;
  throw DataError("unknown count mode '" + std::string(text) + "'");
}

double polarization_delta(TokenCounts c, Label label, double epsilon) {
  const auto safe = static_cast<double>(c.safe);
  const auto unsafe = static_cast<double>(c.unsafe);
  // A tie has a zero numerator, so either argmax choice gives 0.
  const Label dominant = unsafe > safe ? Label::kUnsafe : Label::kSafe;
  if (label != dominant) return 0.0;
  return std::abs(safe - unsafe) / (safe + unsafe + epsilon);
}

PolarizationTable::PolarizationTable(std::vector<TokenCounts> counts,
                                     double epsilon, CountMode mode)
    : counts_(std::move(counts)), epsilon_(epsilon), mode_(mode) {
  if (!(epsilon > 0.0)) throw Error("polarization epsilon must be positive");
}

nlohmann::json PolarizationTable::to_json(const Vocabulary& vocab) const {
  nlohmann::json counts = nlohmann::json::object();
  for (std::size_t id = 0; id < counts_.size(); ++id) {
    const auto& c = counts_[id];
    if (c.safe == 0 && c.unsafe == 0) continue;
    counts[vocab.token(static_cast<TokenId>(id))] = {c.safe, c.unsafe};
  }
  return {{"count_mode", std::string(to_string(mode_))},
          {"epsilon", epsilon_},
          {"counts", std::move(counts)}};
}

PolarizationTable PolarizationTable::from_json(const nlohmann::json& j,
                                               const Vocabulary& vocab) {
  try {
    std::vector<TokenCounts> counts(vocab.size());
    for (const auto& [token, pair] : j.at("counts").items()) {
      const TokenId id = vocab.id(token);
      if (id == Vocabulary::kUnk && token != "[UNK]") {
        throw DataError("table token '" + token + "' not in vocabulary");
      }
      counts[id] = {pair.at(0).get<std::uint64_t>(),
                    pair.at(1).get<std::uint64_t>()};
    }
    const auto mode = j.contains("count_mode")
                          ? parse_count_mode(j.at("count_mode").get<std::string>())
                          : CountMode::kPromptLabel;
    return PolarizationTable(std::move(counts), j.at("epsilon").get<double>(),
                             mode);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed polarization table: ") + e.what());
  }
}

std::uint64_t PolarizationTable::checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  mix(counts_.size());
  for (const auto& c : counts_) {
    mix(c.safe);
    mix(c.unsafe);
  }
  mix(std::bit_cast<std::uint64_t>(epsilon_));
  mix(static_cast<std::uint64_t>(mode_));
  return h;
}

PolarizationTable build_polarization_table(std::span<const PromptRecord> train,
                                           const Vocabulary& vocab,
                                           CountMode mode, double epsilon) {
  if (train.empty()) throw DataError("cannot build statistics from an empty training set");
  std::vector<TokenCounts> counts(vocab.size());
  auto bump = [&counts](TokenId id, Label label) {
    ++(label == Label::kSafe ? counts[id].safe : counts[id].unsafe);
  };
  for (const auto& record : train) {
    const auto tokens = tokenize(record.text, vocab);
    if (mode == CountMode::kPromptLabel) {
      for (TokenId id : tokens.token_ids) bump(id, record.label);
      continue;
    }
    const auto labels = project_labels(record, tokens);
    if (!labels) continue;
    for (std::size_t t = 0; t < tokens.num_tokens(); ++t) {
      bump(tokens.token_ids[t], (*labels)[t]);
    }
  }
  return PolarizationTable(std::move(counts), epsilon, mode);
}

double compute_delta_p(const EncodedExample& example,
                       const PolarizationTable& table) {
  if (!example.token_labels) return 0.0;
  double safe = 0.0;
  double unsafe = 0.0;
  double polarization = 0.0;
  for (std::size_t t = 0; t < example.num_tokens(); ++t) {
    if ((*example.token_labels)[t] != example.label) continue;
    const auto c = table.counts(example.token_ids[t]);
    safe += static_cast<double>(c.safe);
    unsafe += static_cast<double>(c.unsafe);
    polarization += std::abs(static_cast<double>(c.safe) -
                             static_cast<double>(c.unsafe));
  }
  // Gate on the class that dominates the aggregated counts. A tie has no
  // dominant class and scores zero.
  if (safe == unsafe) return 0.0;
  const Label dominant = unsafe > safe ? Label::kUnsafe : Label::kSafe;
  if (dominant != example.label) return 0.0;
  return polarization / (safe + unsafe + table.epsilon());
}

}  // namespace lexguard
