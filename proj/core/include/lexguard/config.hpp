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

#ifndef LEXGUARD_CONFIG_HPP_
#define LEXGUARD_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "lexguard/loss.hpp"
#include "lexguard/net.hpp"
#include "lexguard/trainer.hpp"

namespace lexguard {

struct DataSection {
  std::filesystem::path train;
  std::filesystem::path dev;   // optional
  std::filesystem::path test;  // optional
  DataOptions options;
};

// Encoder shape; the vocabulary size comes from the data.
struct ModelSection {
  std::size_t d_model = 32;
  std::size_t n_layers = 2;
  std::size_t n_heads = 4;
  std::size_t d_ff = 64;
  std::size_t max_len = 128;
  double dropout = 0.1;

  EncoderConfig encoder(std::size_t vocab_size) const;
};

struct PathsSection {
  std::filesystem::path checkpoint = "model.ckpt";
  std::filesystem::path reports = "reports";
  std::filesystem::path train_log;  // per-step JSONL; empty disables
};

struct ServeSection {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t max_body_bytes = 64 * 1024;
  std::size_t threads = 4;
};

// Sections: data, model, loss, train, paths, serve. Every section and key is
// optional; unknown keys are rejected. Relative paths resolve against the
// directory holding the config file.
struct AppConfig {
  DataSection data;
  ModelSection model;
  TrainConfig train = TrainConfig::desk();
  PathsSection paths;
  ServeSection serve;

  nlohmann::json to_json() const;
  static AppConfig from_json(const nlohmann::json& j,
                             const std::filesystem::path& base_dir = {});
};

// Throws DataError if the file is missing or malformed and Error for
// invalid values.
AppConfig load_app_config(const std::filesystem::path& path);

// Environment overrides for the config and checkpoint locations.
inline constexpr const char* kConfigEnv = "LEXGUARD_CONFIG";
inline constexpr const char* kModelEnv = "LEXGUARD_MODEL";
std::optional<std::filesystem::path> env_path(const char* name);

}  // namespace lexguard

#endif  // LEXGUARD_CONFIG_HPP_
