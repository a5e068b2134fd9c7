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

#include "lexguard/config.hpp"

#include <cstdlib>
#include <fstream>

namespace lexguard {
namespace {

std::filesystem::path resolve(const std::string& value, const std::filesystem::path& base) {
  std::filesystem::path p(value);
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

void require_object(const nlohmann::json& j, std::string_view section) {
  if (!j.is_object()) throw Error("config section '" + std::string(section) + "' must be an object");
}

[[noreturn]] void unknown_key(std::string_view section, const std::string& key) {
  throw Error("unknown key '" + key + "' in config section '" + std::string(section) + "'");
}

DataSection parse_data(const nlohmann::json& j, const std::filesystem::path& base) {
  require_object(j, "data");
  DataSection d;
  for (const auto& [key, value] : j.items()) {
    if (key == "train") {
      d.train = resolve(value.get<std::string>(), base);
    } else if (key == "dev") {
      d.dev = resolve(value.get<std::string>(), base);
    } else if (key == "test") {
      d.test = resolve(value.get<std::string>(), base);
    } else if (key == "min_freq") {
      d.options.min_freq = value.get<std::size_t>();
    } else if (key == "count_mode") {
      d.options.count_mode = parse_count_mode(value.get<std::string>());
    } else if (key == "polarization_epsilon") {
      d.options.polarization_epsilon = value.get<double>();
      if (!(d.options.polarization_epsilon > 0.0)) {
        throw Error("polarization_epsilon must be positive");
      }
    } else {
      unknown_key("data", key);
    }
  }
  if (d.options.min_freq == 0) throw Error("min_freq must be positive");
  return d;
}

ModelSection parse_model(const nlohmann::json& j) {
  require_object(j, "model");
  ModelSection m;
  for (const auto& [key, value] : j.items()) {
    if (key == "d_model") {
      m.d_model = value.get<std::size_t>();
    } else if (key == "n_layers") {
      m.n_layers = value.get<std::size_t>();
    } else if (key == "n_heads") {
      m.n_heads = value.get<std::size_t>();
    } else if (key == "d_ff") {
      m.d_ff = value.get<std::size_t>();
    } else if (key == "max_len") {
      m.max_len = value.get<std::size_t>();
    } else if (key == "dropout") {
      m.dropout = value.get<double>();
    } else {
      unknown_key("model", key);
    }
  }
  m.encoder(Vocabulary::kNumReserved).validate();
  return m;
}

PathsSection parse_paths(const nlohmann::json& j, const std::filesystem::path& base,
                         PathsSection p) {
  require_object(j, "paths");
  for (const auto& [key, value] : j.items()) {
    if (key == "checkpoint") {
      p.checkpoint = resolve(value.get<std::string>(), base);
    } else if (key == "reports") {
      p.reports = resolve(value.get<std::string>(), base);
    } else if (key == "train_log") {
      p.train_log = resolve(value.get<std::string>(), base);
    } else {
      unknown_key("paths", key);
    }
  }
  return p;
}

ServeSection parse_serve(const nlohmann::json& j) {
  require_object(j, "serve");
  ServeSection s;
  for (const auto& [key, value] : j.items()) {
    if (key == "host") {
      s.host = value.get<std::string>();
    } else if (key == "port") {
      s.port = value.get<int>();
    } else if (key == "max_body_bytes") {
      s.max_body_bytes = value.get<std::size_t>();
    } else if (key == "threads") {
      s.threads = value.get<std::size_t>();
    } else {
      unknown_key("serve", key);
    }
  }
  if (s.port < 0 || s.port > 65535) throw Error("serve.port must lie in [0, 65535]");
  if (s.max_body_bytes == 0) throw Error("serve.max_body_bytes must be positive");
  if (s.threads == 0) throw Error("serve.threads must be positive");
  return s;
}

}  // namespace

EncoderConfig ModelSection::encoder(std::size_t vocab_size) const {
  EncoderConfig c;
  c.vocab_size = vocab_size;
  c.d_model = d_model;
  c.n_layers = n_layers;
  c.n_heads = n_heads;
  c.d_ff = d_ff;
  c.max_len = max_len;
  c.dropout = dropout;
  return c;
}

nlohmann::json AppConfig::to_json() const {
  auto train_json = train.to_json();
  const auto loss_json = train_json["loss"];
  train_json.erase("loss");
  return {{"data",
           {{"train", data.train.string()},
            {"dev", data.dev.string()},
            {"test", data.test.string()},
            {"min_freq", data.options.min_freq},
            {"count_mode", std::string(to_string(data.options.count_mode))},
            {"polarization_epsilon", data.options.polarization_epsilon}}},
          {"model",
           {{"d_model", model.d_model},
            {"n_layers", model.n_layers},
            {"n_heads", model.n_heads},
            {"d_ff", model.d_ff},
            {"max_len", model.max_len},
            {"dropout", model.dropout}}},
          {"loss", loss_json},
          {"train", std::move(train_json)},
          {"paths",
           {{"checkpoint", paths.checkpoint.string()},
            {"reports", paths.reports.string()},
            {"train_log", paths.train_log.string()}}},
          {"serve",
           {{"host", serve.host},
            {"port", serve.port},
            {"max_body_bytes", serve.max_body_bytes},
            {"threads", serve.threads}}}};
}

AppConfig AppConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw Error("config must be a JSON object");
  AppConfig c;
  c.paths.checkpoint = resolve(c.paths.checkpoint.string(), base_dir);
  c.paths.reports = resolve(c.paths.reports.string(), base_dir);
  try {
    // The train section may pick a preset, so it goes before loss.
    if (auto it = j.find("train"); it != j.end()) {
      c.train = TrainConfig::from_json(*it, c.train);
    }
    for (const auto& [key, value] : j.items()) {
      if (key == "data") {
        c.data = parse_data(value, base_dir);
      } else if (key == "model") {
        c.model = parse_model(value);
      } else if (key == "loss") {
        c.train.loss = LossConfig::from_json(value, c.train.loss);
      } else if (key == "train") {
        continue;
      } else if (key == "paths") {
        c.paths = parse_paths(value, base_dir, c.paths);
      } else if (key == "serve") {
        c.serve = parse_serve(value);
      } else {
        throw Error("unknown config section '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid config value: ") + e.what());
  }
  return c;
}

AppConfig load_app_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return AppConfig::from_json(j, path.parent_path());
}

std::optional<std::filesystem::path> env_path(const char* name) {
  const char* value = std::getenv(name);
  if (value == nullptr || *value == '\0') return std::nullopt;
  return std::filesystem::path(value);
}

}  // namespace lexguard
