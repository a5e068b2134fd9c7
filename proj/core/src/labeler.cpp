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

#include "lexguard/labeler.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "lexguard/stopwords.hpp"

namespace lexguard {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string normalize_keyword(std::string_view keyword) {
  std::string out;
  bool pending_space = false;
  for (char ch : keyword) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c) != 0) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::vector<std::string> normalize_keywords(const json& list) {
  std::vector<std::string> out;
  for (const auto& item : list) {
    if (!item.is_string()) continue;
    auto keyword = normalize_keyword(item.get<std::string>());
    if (keyword.empty()) continue;
    if (std::find(out.begin(), out.end(), keyword) == out.end()) {
      out.push_back(std::move(keyword));
    }
  }
  return out;
}

// End offset (exclusive) of the balanced {...} starting at `open`, or npos.
std::size_t balanced_end(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

// Rewrites Python literals outside of strings into JSON ones.
std::string pythonic_to_json(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_string = false;
  bool escaped = false;
  auto is_ident = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      out.push_back(c);
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
      out.push_back(c);
      continue;
    }
    const bool boundary = i == 0 || !is_ident(text[i - 1]);
    bool replaced = false;
    for (auto [from, to] : {std::pair<std::string_view, std::string_view>{"True", "true"},
                            {"False", "false"},
                            {"None", "null"}}) {
      if (boundary && text.substr(i, from.size()) == from &&
          (i + from.size() == text.size() || !is_ident(text[i + from.size()]))) {
        out.append(to);
        i += from.size() - 1;
        replaced = true;
        break;
      }
    }
    if (!replaced) out.push_back(c);
  }
  return out;
}

bool contains_sequence(const std::vector<std::string>& haystack,
                       const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  return std::search(haystack.begin(), haystack.end(), needle.begin(),
                     needle.end()) != haystack.end();
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

}  // namespace

std::optional<Label> BiasQueryResponse::verdict() const {
  if (!parse_ok || unsafe_flag == safe_flag) return std::nullopt;
  return unsafe_flag ? Label::kUnsafe : Label::kSafe;
}

std::string render_bias_prompt(std::string_view text, Label bias) {
  const std::string term(to_string(bias));
  std::string out;
  out += "Why is the following prompt considered " + term + "?\n";
  out += "Provide a list of words or phrases that made you believe the prompt is " +
         term + " in the following JSON format.\n";
  out +=
      "{ \n"
      "    \"unsafe\":True/False, \n"
      "    \"safe\":True/False, \n"
      "    \"unsafe_keywords\":[], \n"
      "    \"safe_keywords\":[], \n"
      "    \"justification\": \"\"\n"
      "} \n";
  out +=
      "In the JSON format, \"unsafe\" or \"safe\" can be True or False. "
      "Depending on your decision, \"unsafe_keywords\" or \"safe_keywords\" "
      "can be empty. Justification should be very short. Don't generate "
      "anything except the JSON format.\n";
  out += "Prompt: ";
  out += text;
  return out;
}

BiasQueryResponse parse_response(std::string_view raw) {
  BiasQueryResponse response;
  response.raw = std::string(raw);
  for (std::size_t open = raw.find('{'); open != std::string_view::npos;
       open = raw.find('{', open + 1)) {
    const std::size_t end = balanced_end(raw, open);
    if (end == std::string_view::npos) break;
    const json doc = json::parse(pythonic_to_json(raw.substr(open, end - open)),
                                 nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_object()) continue;

    auto flag = doc.find("unsafe");
    auto safe = doc.find("safe");
    auto unsafe_kw = doc.find("unsafe_keywords");
    auto safe_kw = doc.find("safe_keywords");
    if (flag == doc.end() || safe == doc.end() || unsafe_kw == doc.end() ||
        safe_kw == doc.end() || !flag->is_boolean() || !safe->is_boolean() ||
        !unsafe_kw->is_array() || !safe_kw->is_array()) {
      return response;
    }
    response.unsafe_flag = flag->get<bool>();
    response.safe_flag = safe->get<bool>();
    response.unsafe_keywords = normalize_keywords(*unsafe_kw);
    response.safe_keywords = normalize_keywords(*safe_kw);
    if (auto j = doc.find("justification"); j != doc.end() && j->is_string()) {
      response.justification = j->get<std::string>();
    }
    response.parse_ok = true;
    return response;
  }
  return response;
}

MockQueryClient::MockQueryClient(std::vector<std::string> lexicon,
                                 double bias_rate, std::uint64_t seed)
    : bias_rate_(bias_rate), seed_(seed) {
  if (!(bias_rate >= 0.0 && bias_rate <= 1.0)) {
    throw Error("bias_rate must lie in [0, 1]");
  }
  for (const auto& phrase : lexicon) {
    auto words = split_words(phrase);
    if (!words.empty()) phrases_.push_back(std::move(words));
  }
}

MockQueryClient MockQueryClient::from_file(const std::filesystem::path& lexicon,
                                           double bias_rate, std::uint64_t seed) {
  std::ifstream in(lexicon);
  if (!in) throw DataError("cannot open lexicon " + lexicon.string());
  std::vector<std::string> phrases;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (!split_words(line).empty()) phrases.push_back(line);
  }
  return MockQueryClient(std::move(phrases), bias_rate, seed);
}

std::string MockQueryClient::respond(std::string_view text, Label bias) const {
  const auto words = split_words(text);
  std::uint64_t h = fnv1a(text, 0xcbf29ce484222325ULL);
  h = splitmix64(h ^ splitmix64(seed_) ^ (index(bias) + 1));
  const double coin = static_cast<double>(h >> 11) * 0x1.0p-53;

  ordered_json out;
  std::vector<std::string> unsafe_keywords;
  std::vector<std::string> safe_keywords;
  std::string justification;
  Label answer;
  if (coin < bias_rate_) {
    answer = bias;
    auto& list = bias == Label::kSafe ? safe_keywords : unsafe_keywords;
    for (std::size_t i = 0; i < words.size() && i < 2; ++i) list.push_back(words[i]);
    justification = "The prompt is " + std::string(to_string(bias)) + " as stated.";
  } else {
    std::vector<std::pair<std::size_t, std::size_t>> hits;  // (position, phrase)
    for (std::size_t p = 0; p < phrases_.size(); ++p) {
      auto it = std::search(words.begin(), words.end(), phrases_[p].begin(),
                            phrases_[p].end());
      if (it != words.end()) {
        hits.emplace_back(static_cast<std::size_t>(it - words.begin()), p);
      }
    }
    std::sort(hits.begin(), hits.end());
    for (auto [pos, p] : hits) unsafe_keywords.push_back(join_words(phrases_[p]));
    if (!hits.empty()) {
      answer = Label::kUnsafe;
      justification = "The prompt requests a harmful activity.";
    } else {
      answer = Label::kSafe;
      for (const auto& w : words) {
        if (safe_keywords.size() == 3) break;
        if (is_stopword(w) || is_punctuation(w)) continue;
        if (std::find(safe_keywords.begin(), safe_keywords.end(), w) ==
            safe_keywords.end()) {
          safe_keywords.push_back(w);
        }
      }
      justification = "The prompt is a benign request.";
    }
  }
  out["unsafe"] = answer == Label::kUnsafe;
  out["safe"] = answer == Label::kSafe;
  out["unsafe_keywords"] = unsafe_keywords;
  out["safe_keywords"] = safe_keywords;
  out["justification"] = justification;
  return out.dump();
}

BiasQueryResponse MockQueryClient::ask(std::string_view text, Label bias) const {
  return parse_response(respond(text, bias));
}

HttpQueryClient::HttpQueryClient(Settings settings)
    : settings_(std::move(settings)) {
  if (settings_.url.rfind("http://", 0) != 0) {
    throw Error("HttpQueryClient supports http:// endpoints only");
  }
}

HttpQueryClient HttpQueryClient::from_env() {
  Settings settings;
  auto env = [](const char* name) -> std::string {
    const char* value = std::getenv(name);
    return value == nullptr ? std::string() : std::string(value);
  };
  settings.url = env("LEXGUARD_LLM_URL");
  settings.api_key = env("LEXGUARD_LLM_KEY");
  if (auto model = env("LEXGUARD_LLM_MODEL"); !model.empty()) settings.model = model;
  if (settings.url.empty()) throw Error("LEXGUARD_LLM_URL is not set");
  return HttpQueryClient(std::move(settings));
}

BiasQueryResponse HttpQueryClient::ask(std::string_view text, Label bias) const {
  const std::string_view rest = std::string_view(settings_.url).substr(7);
  const auto slash = rest.find('/');
  const std::string host_port(rest.substr(0, slash));
  const std::string path =
      slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));

  httplib::Client client("http://" + host_port);
  client.set_read_timeout(settings_.timeout);
  client.set_connection_timeout(settings_.timeout);
  httplib::Headers headers;
  if (!settings_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + settings_.api_key);
  }
  ordered_json body;
  body["model"] = settings_.model;
  body["temperature"] = 0;
  body["messages"] = json::array(
      {{{"role", "user"}, {"content", render_bias_prompt(text, bias)}}});

  auto result = client.Post(path, headers, body.dump(), "application/json");
  if (!result) {
    throw TransportError("request failed: " + httplib::to_string(result.error()));
  }
  if (result->status != 200) {
    throw TransportError("HTTP status " + std::to_string(result->status));
  }
  const json reply = json::parse(result->body, nullptr, false);
  if (reply.is_discarded()) throw TransportError("non-JSON reply");
  try {
    return parse_response(
        reply.at("choices").at(0).at("message").at("content").get<std::string>());
  } catch (const json::exception&) {
    throw TransportError("unexpected reply shape");
  }
}

std::vector<std::string> intersect_keywords(const std::vector<std::string>& first,
                                            const std::vector<std::string>& second) {
  std::vector<std::string> out;
  for (const auto& a : first) {
    const auto a_words = split_words(a);
    for (const auto& b : second) {
      const auto b_words = split_words(b);
      const std::string* shared = nullptr;
      if (a_words == b_words || contains_sequence(a_words, b_words)) {
        shared = &b;
      } else if (contains_sequence(b_words, a_words)) {
        shared = &a;
      }
      if (shared != nullptr && !a_words.empty() && !b_words.empty() &&
          std::find(out.begin(), out.end(), *shared) == out.end()) {
        out.push_back(*shared);
      }
    }
  }
  return out;
}

LabelingOutcome check_consistency(Label gold, const BiasQueryResponse& safe_biased,
                                  const BiasQueryResponse& unsafe_biased) {
  LabelingOutcome outcome;
  outcome.responses = {safe_biased, unsafe_biased};
  // For a safe prompt the first answer agrees with its framing and the second
  // contradicts it; for an unsafe prompt the reverse. Either way both must
  // commit to the gold label.
  if (safe_biased.verdict() != gold || unsafe_biased.verdict() != gold) {
    return outcome;
  }
  outcome.consistent = true;
  outcome.keywords =
      intersect_keywords(safe_biased.keywords(gold), unsafe_biased.keywords(gold));
  return outcome;
}

namespace {

BiasQueryResponse ask_with_retry(const QueryClient& client, std::string_view text,
                                 Label bias, const LabelingOptions& options) {
  for (int attempt = 0;; ++attempt) {
    try {
      return client.ask(text, bias);
    } catch (const TransportError&) {
      if (attempt >= options.max_retries) throw;
      std::this_thread::sleep_for(options.retry_backoff);
    }
  }
}

LabelingOutcome label_one(const PromptRecord& record, const QueryClient& client,
                          const LabelingOptions& options) {
  if (record.text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw DataError("record '" + record.id + "' has empty text");
  }
  LabelingOutcome outcome;
  try {
    auto safe_biased = ask_with_retry(client, record.text, Label::kSafe, options);
    auto unsafe_biased = ask_with_retry(client, record.text, Label::kUnsafe, options);
    outcome = check_consistency(record.label, safe_biased, unsafe_biased);
  } catch (const TransportError& e) {
    outcome.error = e.what();
  }
  outcome.record_id = record.id;
  return outcome;
}

}  // namespace

LabelingResult generate_labels(std::vector<PromptRecord> records,
                               const QueryClient& client,
                               const LabelingOptions& options) {
  LabelingResult result;
  result.outcomes.resize(records.size());

  const std::size_t workers =
      std::clamp<std::size_t>(options.max_in_flight, 1, std::max<std::size_t>(records.size(), 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < records.size(); ++i) {
      result.outcomes[i] = label_one(records[i], client, options);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < records.size(); i = next++) {
          try {
            result.outcomes[i] = label_one(records[i], client, options);
          } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& record = records[i];
    const auto& outcome = result.outcomes[i];
    if (!outcome.error.empty()) ++result.transport_failures;
    record.explanation_words.reset();
    if (!outcome.consistent) continue;
    if (record.label == Label::kSafe) {
      record.explanation_words.emplace();
      ++result.labeled;
      continue;
    }
    const auto words = split_words(record.text);
    std::vector<std::string> present;
    for (const auto& keyword : outcome.keywords) {
      if (contains_sequence(words, split_words(keyword))) present.push_back(keyword);
    }
    if (present.empty()) continue;
    record.explanation_words = std::move(present);
    ++result.labeled;
  }
  result.records = std::move(records);
  return result;
}

json LabelingResult::summary() const {
  const double total = static_cast<double>(records.size());
  return {{"records", records.size()},
          {"labeled", labeled},
          {"coverage", coverage()},
          {"transport_failures", transport_failures},
          {"failure_rate", records.empty() ? 0.0 : transport_failures / total}};
}

json to_json(const LabelingOutcome& outcome) {
  json out = {{"id", outcome.record_id},
              {"consistent", outcome.consistent},
              {"keywords", outcome.keywords},
              {"raw_responses",
               {outcome.responses[0].raw, outcome.responses[1].raw}}};
  if (!outcome.error.empty()) out["error"] = outcome.error;
  return out;
}

}  // namespace lexguard
