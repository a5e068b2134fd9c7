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

#include <httplib.h>

#include "lexguard/gateway.hpp"

namespace lexguard {

std::vector<std::string> explanation_entries(const Verdict& verdict, bool merge) {
  if (!merge) return verdict.explanation;
  std::vector<std::string> out;
  std::size_t previous = 0;
  for (std::size_t i = 0; i < verdict.explanation_positions.size(); ++i) {
    const std::size_t pos = verdict.explanation_positions[i];
    if (i > 0 && pos == previous + 1) {
      out.back() += ' ' + verdict.explanation[i];
    } else {
      out.push_back(verdict.explanation[i]);
    }
    previous = pos;
  }
  return out;
}

nlohmann::ordered_json verdict_json(const Verdict& verdict, const VerdictFormat& format) {
  nlohmann::ordered_json j;
  j["safety_label"] = std::string(to_string(verdict.safety_label));
  j["explanation"] = explanation_entries(verdict, format.merge_phrases);
  if (format.verbose) {
    auto scores = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < verdict.words.size(); ++i) {
      nlohmann::ordered_json entry;
      entry["word"] = verdict.words[i];
      entry["unsafe"] = verdict.word_scores[i];
      scores.push_back(std::move(entry));
    }
    j["scores"] = std::move(scores);
    j["prompt_score"] = verdict.prompt_score;
  }
  return j;
}

namespace {

HttpReply error_reply(int status, const std::string& message) {
  return {status, nlohmann::json{{"error", message}}.dump()};
}

bool blank(std::string_view text) {
  return text.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

}  // namespace

HttpReply handle_check(const Checkpoint& checkpoint, std::string_view body) {
  const auto request = nlohmann::json::parse(body, nullptr, false);
  if (request.is_discarded() || !request.is_object()) return error_reply(400, "malformed JSON");
  const auto text = request.find("text");
  if (text == request.end() || !text->is_string()) {
    return error_reply(400, "missing string field 'text'");
  }
  VerdictFormat format;
  for (const auto& [key, field] : {std::pair{"verbose", &format.verbose},
                                   std::pair{"merge_phrases", &format.merge_phrases}}) {
    if (auto it = request.find(key); it != request.end()) {
      if (!it->is_boolean()) return error_reply(400, std::string("'") + key + "' must be boolean");
      *field = it->get<bool>();
    }
  }
  const auto& value = text->get_ref<const std::string&>();
  if (blank(value)) return error_reply(400, "empty text");
  try {
    const auto verdict = predict(checkpoint.model, checkpoint.vocab, value, checkpoint.threshold);
    return {200, verdict_json(verdict, format).dump()};
  } catch (const DataError& e) {
    return error_reply(400, e.what());
  } catch (const Error& e) {
    return error_reply(500, e.what());
  }
}

HttpReply handle_health(const Checkpoint& checkpoint) {
  nlohmann::ordered_json j;
  j["status"] = "ok";
  j["model_params"] = count_params(checkpoint.model);
  return {200, j.dump()};
}

GuardServer::GuardServer(Checkpoint checkpoint, ServeSection settings)
    : checkpoint_(std::move(checkpoint)),
      settings_(std::move(settings)),
      server_(std::make_unique<httplib::Server>()) {
  const std::size_t threads = settings_.threads;
  server_->new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  server_->set_payload_max_length(settings_.max_body_bytes);
  server_->Post("/v1/check", [this](const httplib::Request& req, httplib::Response& res) {
    const auto reply = handle_check(checkpoint_, req.body);
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  });
  server_->Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
    const auto reply = handle_health(checkpoint_);
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  });
  server_->set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const char* message = res.status == 413 ? "request body too large" : "request failed";
    res.set_content(nlohmann::json{{"error", message}}.dump(), "application/json");
  });
}

GuardServer::~GuardServer() { stop(); }

int GuardServer::bind() {
  // httplib also sets SO_REUSEPORT, which would let a second server share a
  // taken port silently.
  server_->set_socket_options([](auto sock) {
    const int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes),
                 sizeof(yes));
  });
  int port = settings_.port;
  if (port == 0) {
    port = server_->bind_to_any_port(settings_.host);
    if (port < 0) throw Error("cannot bind " + settings_.host);
  } else if (!server_->bind_to_port(settings_.host, port)) {
    throw Error("cannot bind " + settings_.host + ":" + std::to_string(port));
  }
  return port;
}

void GuardServer::listen() {
  if (!server_->listen_after_bind()) throw Error("server stopped with an error");
}

void GuardServer::stop() {
  if (server_) server_->stop();
}

bool GuardServer::is_running() const { return server_ && server_->is_running(); }

}  // namespace lexguard
