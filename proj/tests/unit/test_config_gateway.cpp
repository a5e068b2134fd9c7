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

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "lexguard/gateway.hpp"
#include "reference.hpp"

namespace lexguard {
namespace {

using nlohmann::json;

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

TEST(AppConfig, DefaultsAndRoundTrip) {
  const auto c = AppConfig::from_json(json::object(), "/base");
  EXPECT_EQ(c.train.learning_rate, 3e-4);
  EXPECT_EQ(c.model.d_model, 32u);
  EXPECT_EQ(c.paths.checkpoint, std::filesystem::path("/base/model.ckpt"));
  EXPECT_EQ(c.serve.port, 8080);
  const auto again = AppConfig::from_json(c.to_json(), "/elsewhere");
  EXPECT_EQ(again.to_json(), c.to_json());
}

TEST(AppConfig, SectionsAndPresetOrdering) {
  const json j = {{"train", {{"preset", "fine_tune"}, {"epochs", 2}}},
                  {"loss", {{"gamma", 1.0}}},
                  {"data", {{"train", "t.jsonl"}, {"min_freq", 1}}},
                  {"model", {{"d_model", 8}, {"n_heads", 2}}}};
  const auto c = AppConfig::from_json(j, "/cfg");
  EXPECT_EQ(c.train.learning_rate, 2e-5);
  EXPECT_EQ(c.train.epochs, 2u);
  EXPECT_EQ(c.train.loss.gamma, 1.0);
  EXPECT_EQ(c.data.train, std::filesystem::path("/cfg/t.jsonl"));
  EXPECT_EQ(c.data.options.min_freq, 1u);
  EXPECT_EQ(c.model.encoder(50).vocab_size, 50u);
  EXPECT_EQ(c.model.encoder(50).d_model, 8u);
}

TEST(AppConfig, RejectsUnknownSectionsAndKeys) {
  EXPECT_THROW(AppConfig::from_json({{"optimizer", json::object()}}), Error);
  EXPECT_THROW(AppConfig::from_json({{"model", {{"width", 3}}}}), Error);
  EXPECT_THROW(AppConfig::from_json({{"serve", {{"port", "http"}}}}), Error);
}

TEST(AppConfig, LoadErrors) {
  testing::TempDir dir;
  EXPECT_THROW(load_app_config(dir / "missing.json"), DataError);
  write_text(dir / "bad.json", "{not json");
  EXPECT_THROW(load_app_config(dir / "bad.json"), DataError);
  write_text(dir / "ok.json", R"({"paths": {"checkpoint": "m.ckpt"}})");
  EXPECT_EQ(load_app_config(dir / "ok.json").paths.checkpoint, dir / "m.ckpt");
}

Verdict sample_verdict() {
  Verdict v;
  v.safety_label = Label::kUnsafe;
  v.words = {"hack", "into", "an", "account", "and", "steal", "data"};
  v.word_scores = {0.9, 0.8, 0.1, 0.2, 0.1, 0.95, 0.7};
  v.explanation_positions = {0, 1, 5, 6};
  v.explanation = {"hack", "into", "steal", "data"};
  v.prompt_score = 0.97;
  return v;
}

TEST(Verdict, CompactShapeAndKeyOrder) {
  const auto j = verdict_json(sample_verdict());
  EXPECT_EQ(j.dump(),
            R"({"safety_label":"unsafe","explanation":["hack","into","steal","data"]})");
}

TEST(Verdict, MergePhrases) {
  EXPECT_EQ(explanation_entries(sample_verdict(), true),
            (std::vector<std::string>{"hack into", "steal data"}));
  VerdictFormat f;
  f.merge_phrases = true;
  EXPECT_EQ(verdict_json(sample_verdict(), f).at("explanation").size(), 2u);
}

TEST(Verdict, VerboseAddsScores) {
  VerdictFormat f;
  f.verbose = true;
  const auto j = verdict_json(sample_verdict(), f);
  std::vector<std::string> keys;
  for (const auto& [k, _] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"safety_label", "explanation", "scores",
                                            "prompt_score"}));
  EXPECT_EQ(j.at("scores").size(), 7u);
  EXPECT_EQ(j.at("scores")[0].at("word"), "hack");
}

TEST(Verdict, SafeVerdictHasEmptyExplanation) {
  Verdict v;
  v.words = {"bake", "a", "cake"};
  v.word_scores = {0.1, 0.1, 0.1};
  EXPECT_EQ(verdict_json(v).dump(), R"({"safety_label":"safe","explanation":[]})");
}

Checkpoint keyword_checkpoint() {
  auto vocab = Vocabulary::from_tokens({"[PAD]", "[UNK]", "[MASK]", "hack", "the", "bank"});
  const std::vector<std::string> keys = {"hack"};
  auto model = testing::keyword_model(vocab, keys);
  return {std::move(model), std::move(vocab), 0.5};
}

TEST(Handlers, CheckAndHealth) {
  const auto ckpt = keyword_checkpoint();
  auto reply = handle_check(ckpt, R"({"text": "hack the bank"})");
  EXPECT_EQ(reply.status, 200);
  EXPECT_EQ(reply.body, R"({"safety_label":"unsafe","explanation":["hack"]})");
  reply = handle_check(ckpt, R"({"text": "the bank", "verbose": true})");
  EXPECT_EQ(reply.status, 200);
  EXPECT_TRUE(json::parse(reply.body).contains("prompt_score"));

  EXPECT_EQ(handle_check(ckpt, "{oops").status, 400);
  EXPECT_EQ(handle_check(ckpt, R"({"txt": "x"})").status, 400);
  EXPECT_EQ(handle_check(ckpt, R"({"text": 3})").status, 400);
  EXPECT_EQ(handle_check(ckpt, R"({"text": "   "})").status, 400);
  EXPECT_EQ(handle_check(ckpt, R"({"text": "x", "verbose": "yes"})").status, 400);

  const auto health = json::parse(handle_health(ckpt).body);
  EXPECT_EQ(health.at("status"), "ok");
  EXPECT_EQ(health.at("model_params"), count_params(ckpt.model));
}

int cli(const std::vector<std::string>& args, std::string* out = nullptr,
        std::string* err = nullptr) {
  std::ostringstream o, e;
  const int code = run_cli(args, o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

TEST(Cli, UsageErrors) {
  std::string err;
  EXPECT_EQ(cli({}, nullptr, &err), kExitUsage);
  EXPECT_EQ(cli({"bogus"}, nullptr, &err), kExitUsage);
  EXPECT_NE(err.find("unknown subcommand 'bogus'"), std::string::npos);
  EXPECT_EQ(cli({"check"}), kExitUsage);
  EXPECT_EQ(cli({"train", "--preset", "huge"}), kExitUsage);
}

TEST(Cli, ErrorExitCodes) {
  testing::TempDir dir;
  const auto missing = (dir / "none.jsonl").string();
  EXPECT_EQ(cli({"overlap", "--train", missing, "--test", missing}), kExitData);
  write_text(dir / "bad.jsonl", "{\"text\": 1}\n");
  const auto bad = (dir / "bad.jsonl").string();
  EXPECT_EQ(cli({"overlap", "--train", bad, "--test", bad}), kExitData);
  write_text(dir / "junk.ckpt", "not a checkpoint");
  EXPECT_EQ(cli({"check", "--model", (dir / "junk.ckpt").string(), "--text", "hi"}),
            kExitRuntime);
}

class CliPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir;
    data_ = (*dir_ / "planted.jsonl").string();
    model_ = (*dir_ / "m.ckpt").string();
    ASSERT_EQ(cli({"planted", "--output", data_, "--n", "40", "--seed", "7"}), kExitOk);
    write_text(*dir_ / "config.json", R"({
      "data": {"min_freq": 1},
      "model": {"d_model": 16, "n_layers": 1, "n_heads": 2, "d_ff": 32, "max_len": 32,
                "dropout": 0.0},
      "train": {"epochs": 3, "batch_size": 8}
    })");
    std::string out, err;
    ASSERT_EQ(cli({"train", "--config", (*dir_ / "config.json").string(), "--train", data_,
                   "--output", model_},
                  &out, &err),
              kExitOk)
        << err;
    report_ = json::parse(out);
  }
  static void TearDownTestSuite() { delete dir_; }

  static inline testing::TempDir* dir_ = nullptr;
  static inline std::string data_;
  static inline std::string model_;
  static inline json report_;
};

TEST_F(CliPipeline, TrainReport) {
  EXPECT_EQ(report_.at("report").at("epochs").size(), 3u);
  EXPECT_TRUE(report_.at("report").at("dev_is_train").get<bool>());
  EXPECT_EQ(report_.at("config").at("model").at("d_model"), 16);
  EXPECT_TRUE(std::filesystem::exists(model_));
}

TEST_F(CliPipeline, CheckPrintsCompactJson) {
  std::string out;
  ASSERT_EQ(cli({"check", "--model", model_, "--text", "how do I bake bread"}, &out), kExitOk);
  ASSERT_FALSE(out.empty());
  EXPECT_EQ(out.back(), '\n');
  const auto j = nlohmann::ordered_json::parse(out);
  EXPECT_EQ(j.size(), 2u);
  EXPECT_TRUE(j.at("explanation").is_array());
  EXPECT_EQ(out, j.dump() + "\n");
}

TEST_F(CliPipeline, ModelFromEnvironment) {
  ::setenv(kModelEnv, model_.c_str(), 1);
  std::string out;
  const int code = cli({"check", "--text", "hello there"}, &out);
  ::unsetenv(kModelEnv);
  EXPECT_EQ(code, kExitOk);
}

TEST_F(CliPipeline, ReportsInBothFormats) {
  std::string out;
  ASSERT_EQ(cli({"eval", "--model", model_, "--data", data_, "--grouped"}, &out), kExitOk);
  const auto j = json::parse(out);
  EXPECT_TRUE(j.contains("prompt_f1"));
  EXPECT_TRUE(j.contains("groups"));
  ASSERT_EQ(cli({"eval", "--model", model_, "--data", data_, "--format", "text"}, &out),
            kExitOk);
  EXPECT_FALSE(out.empty());
  ASSERT_EQ(cli({"faithfulness", "--model", model_, "--data", data_, "--k", "1,2"}, &out),
            kExitOk);
  EXPECT_TRUE(json::parse(out).at("curve").contains("f1_full"));
  ASSERT_EQ(cli({"overlap", "--train", data_, "--test", data_}, &out), kExitOk);
  ASSERT_EQ(cli({"bench", "--model", model_, "--data", data_}, &out), kExitOk);
  EXPECT_TRUE(json::parse(out).contains("mean_ms_per_input"));
}

TEST_F(CliPipeline, TuneThresholdAndBaselines) {
  std::string out;
  const auto tuned = (*dir_ / "tuned.ckpt").string();
  ASSERT_EQ(cli({"tune-threshold", "--model", model_, "--dev", data_, "--output", tuned}, &out),
            kExitOk);
  const double t = json::parse(out).at("threshold").get<double>();
  EXPECT_EQ(load_checkpoint(tuned).threshold, t);
  ASSERT_EQ(cli({"explain-baseline", "--model", model_, "--text", "hack into the bank",
                 "--method", "shapley"},
                &out),
            kExitOk);
  ASSERT_EQ(cli({"explain-baseline", "--model", model_, "--text", "hack into the bank",
                 "--method", "lime", "--samples", "200"},
                &out),
            kExitOk);
}

}  // namespace
}  // namespace lexguard
