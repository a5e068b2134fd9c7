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

#ifndef LEXGUARD_LABELER_HPP_
#define LEXGUARD_LABELER_HPP_

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexguard/common.hpp"
#include "lexguard/corpus.hpp"

namespace lexguard {

// One parsed answer of the labeling LLM.
struct BiasQueryResponse {
  bool unsafe_flag = false;
  bool safe_flag = false;
  std::vector<std::string> unsafe_keywords;
  std::vector<std::string> safe_keywords;
  std::string justification;
  bool parse_ok = false;
  std::string raw;

  // The polarity this response commits to, or nullopt if it failed to parse
  // or its flags are contradictory (both true or both false).
  std::optional<Label> verdict() const;
  const std::vector<std::string>& keywords(Label label) const {
    return label == Label::kSafe ? safe_keywords : unsafe_keywords;
  }
};

// The question sent to the LLM, with `bias` filled into both slots.
std::string render_bias_prompt(std::string_view text, Label bias);

// Extracts the first JSON object from `raw`, tolerating surrounding prose,
// code fences and Python-style True/False. Never throws.
BiasQueryResponse parse_response(std::string_view raw);

class TransportError : public Error {
 public:
  using Error::Error;
};

class QueryClient {
 public:
  virtual ~QueryClient() = default;
  // Must be deterministic for a fixed (text, bias) and client seed. May
  // throw TransportError.
  virtual BiasQueryResponse ask(std::string_view text, Label bias) const = 0;
};

// Offline client driven by an unsafe-phrase lexicon.
//
// Truthful answers call a prompt unsafe iff it contains a lexicon phrase and
// list the matched phrases (in text order) as unsafe keywords; safe prompts
// list their first few non-stopword words as safe keywords. With
// probability `bias_rate` an answer instead capitulates to its bias term and
// lists the first two words of the prompt. The coin is a hash of
// (text, bias, seed), so answers are reproducible.
class MockQueryClient : public QueryClient {
 public:
  MockQueryClient(std::vector<std::string> lexicon, double bias_rate,
                  std::uint64_t seed);

  // One phrase per line; blank lines and '#' comments are ignored. Throws
  // DataError if the file is missing.
  static MockQueryClient from_file(const std::filesystem::path& lexicon,
                                   double bias_rate, std::uint64_t seed);

  BiasQueryResponse ask(std::string_view text, Label bias) const override;

  // Raw JSON the mock would return.
  std::string respond(std::string_view text, Label bias) const;

 private:
  std::vector<std::vector<std::string>> phrases_;
  double bias_rate_;
  std::uint64_t seed_;
};

// Chat-completions client for an OpenAI-compatible plain-HTTP endpoint,
// configured from LEXGUARD_LLM_URL, LEXGUARD_LLM_KEY and LEXGUARD_LLM_MODEL.
class HttpQueryClient : public QueryClient {
 public:
  struct Settings {
    std::string url;  // e.g. http://localhost:8000/v1/chat/completions
    std::string api_key;
    std::string model = "gpt-4o-mini";
    std::chrono::seconds timeout{60};
  };
  explicit HttpQueryClient(Settings settings);
  static HttpQueryClient from_env();

  BiasQueryResponse ask(std::string_view text, Label bias) const override;

 private:
  Settings settings_;
};

struct LabelingOutcome {
  std::string record_id;
  bool consistent = false;
  std::vector<std::string> keywords;
  // [0] answers the safe-biased query, [1] the unsafe-biased one.
  std::array<BiasQueryResponse, 2> responses;
  std::string error;  // transport failure, if any
};

// Keywords shared by both lists. Two entries match when one's word sequence
// occurs contiguously inside the other's; the shorter entry is kept. Output
// follows the order of `first`, deduplicated.
std::vector<std::string> intersect_keywords(const std::vector<std::string>& first,
                                            const std::vector<std::string>& second);

// `safe_biased` answered the safe-framed question, `unsafe_biased` the
// unsafe-framed one. Both must commit to `gold`; then the keyword lists for
// `gold` are intersected.
LabelingOutcome check_consistency(Label gold, const BiasQueryResponse& safe_biased,
                                  const BiasQueryResponse& unsafe_biased);

struct LabelingOptions {
  int max_retries = 2;
  std::chrono::milliseconds retry_backoff{500};
  std::size_t max_in_flight = 1;
};

struct LabelingResult {
  std::vector<LabelingOutcome> outcomes;  // input order
  std::vector<PromptRecord> records;      // enriched copies, input order
  std::size_t labeled = 0;
  std::size_t transport_failures = 0;

  double coverage() const {
    return records.empty() ? 0.0
                           : static_cast<double>(labeled) /
                                 static_cast<double>(records.size());
  }
  nlohmann::json summary() const;
};

// Queries the client twice per record and writes word supervision for the
// records that pass the consistency gate. Unsafe records get the shared
// keywords that occur in their text; safe records get an empty (all-safe)
// explanation. Everything else loses any explanation it had.
LabelingResult generate_labels(std::vector<PromptRecord> records,
                               const QueryClient& client,
                               const LabelingOptions& options = {});

nlohmann::json to_json(const LabelingOutcome& outcome);

}  // namespace lexguard

#endif  // LEXGUARD_LABELER_HPP_
