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

#ifndef LEXGUARD_GATEWAY_HPP_
#define LEXGUARD_GATEWAY_HPP_

#include <atomic>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexguard/checkpoint.hpp"
#include "lexguard/config.hpp"
#include "lexguard/net.hpp"

namespace httplib {
class Server;
}

namespace lexguard {

struct VerdictFormat {
  bool verbose = false;        // adds "scores" and "prompt_score"
  bool merge_phrases = false;  // joins adjacent explanation words
};

// Explanation entries in prompt order, with runs of adjacent explanation
// words joined by single spaces when `merge` is set.
std::vector<std::string> explanation_entries(const Verdict& verdict, bool merge);

// {"safety_label": ..., "explanation": [...]} with keys in that order;
// verbose output appends "scores" ([{"word": w, "unsafe": p}, ...]) and
// "prompt_score".
nlohmann::ordered_json verdict_json(const Verdict& verdict, const VerdictFormat& format = {});

struct HttpReply {
  int status = 200;
  std::string body;
};

// Request handlers, independent of the transport. A check body is
// {"text": string} with optional boolean "verbose" and "merge_phrases".
HttpReply handle_check(const Checkpoint& checkpoint, std::string_view body);
HttpReply handle_health(const Checkpoint& checkpoint);

// POST /v1/check and GET /v1/health over a read-only checkpoint.
class GuardServer {
 public:
  GuardServer(Checkpoint checkpoint, ServeSection settings);
  ~GuardServer();
  GuardServer(const GuardServer&) = delete;
  GuardServer& operator=(const GuardServer&) = delete;

  // Binds the configured address; port 0 picks a free port. Returns the
  // bound port. Throws Error if the address is taken.
  int bind();
  // Serves until stop(). Requires bind().
  void listen();
  void stop();
  bool is_running() const;

 private:
  Checkpoint checkpoint_;
  ServeSection settings_;
  std::unique_ptr<httplib::Server> server_;
};

// Exit codes of run_cli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitRuntime = 3;

// Runs one subcommand. `args` excludes the program name. Reports go to
// `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lexguard

#endif  // LEXGUARD_GATEWAY_HPP_
