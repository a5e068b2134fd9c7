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

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "lexguard/evaluation.hpp"

namespace lexguard {
namespace {

PromptRecord record(std::string text, Label label,
                    std::optional<std::vector<std::string>> explanation,
                    std::optional<std::string> category = std::nullopt) {
  PromptRecord r;
  r.text = std::move(text);
  r.label = label;
  r.explanation_words = std::move(explanation);
  r.category = std::move(category);
  return r;
}

class KeywordModelTest : public ::testing::Test {
 protected:
  KeywordModelTest()
      : vocab_(Vocabulary::from_tokens({"[PAD]", "[UNK]", "[MASK]", "hack", "steal", "the",
                                        "bank", "how", "to", "bake", "cake", "please", "now",
                                        "water", "plants", "and"})),
        model_(testing::keyword_model(vocab_, keywords_)) {
    records_ = {
        record("how to hack the bank", Label::kUnsafe, std::vector<std::string>{"hack"}, "cyber"),
        record("bake the cake", Label::kSafe, std::vector<std::string>{}, "food"),
        record("please hack now", Label::kUnsafe, std::vector<std::string>{"hack"}),
        record("water the plants", Label::kSafe, std::nullopt),
    };
    examples_ = encode_all(records_, vocab_);
  }

  const std::vector<std::string> keywords_ = {"hack", "steal"};
  Vocabulary vocab_;
  GuardrailModel model_;
  std::vector<PromptRecord> records_;
  std::vector<EncodedExample> examples_;
};

TEST_F(KeywordModelTest, PromptAndWordF1) {
  const auto scores = prompt_scores(model_, examples_);
  ASSERT_EQ(scores.size(), 4u);
  EXPECT_GT(scores[0], 0.9);
  EXPECT_LT(scores[1], 0.2);
  EXPECT_DOUBLE_EQ(prompt_f1(model_, examples_).f1, 1.0);
  const auto words = word_f1(model_, examples_);
  EXPECT_DOUBLE_EQ(words.f1, 1.0);
  // Three supervised prompts with 5 + 3 + 3 words; the fourth is skipped.
  EXPECT_EQ(words.counts.total(), 11u);
  EXPECT_EQ(words.counts.tp, 2u);
  EXPECT_DOUBLE_EQ(word_f1(model_, vocab_, records_).f1, 1.0);
}

TEST_F(KeywordModelTest, WordF1CountsMissedWords) {
  auto recs = records_;
  recs[0].explanation_words = std::vector<std::string>{"hack", "the bank"};
  const auto words = word_f1(model_, encode_all(recs, vocab_));
  EXPECT_EQ(words.counts.fn, 2u);
  EXPECT_NEAR(words.f1, 2.0 * 2 / (2.0 * 2 + 2), 1e-12);
}

TEST_F(KeywordModelTest, MaskWords) {
  const auto& ex = examples_[0];
  const std::vector<std::size_t> which = {2};
  const auto masked = mask_words(ex, which, MaskMode::kReplaceWithMask);
  ASSERT_EQ(masked.size(), ex.num_tokens());
  EXPECT_EQ(masked[2], Vocabulary::kMask);
  EXPECT_EQ(masked[1], ex.token_ids[1]);
  const auto removed = mask_words(ex, which, MaskMode::kRemove);
  EXPECT_EQ(removed.size(), ex.num_tokens() - 1);
  EXPECT_EQ(removed[2], vocab_.id("the"));
}

TEST_F(KeywordModelTest, RankUnsafeWords) {
  EXPECT_EQ(rank_unsafe_words(model_, examples_[0]), (std::vector<std::size_t>{2}));
  EXPECT_TRUE(rank_unsafe_words(model_, examples_[1]).empty());
}

TEST_F(KeywordModelTest, FaithfulnessDropsWhenRationaleIsMasked) {
  const std::vector<std::size_t> ks = {1, 2, 3};
  for (auto mode : {MaskMode::kReplaceWithMask, MaskMode::kRemove}) {
    const auto curve = faithfulness(model_, examples_, ks, mode);
    EXPECT_DOUBLE_EQ(curve.f1_full, 1.0);
    EXPECT_DOUBLE_EQ(curve.f1_at_k.at(1), 0.0);
    EXPECT_DOUBLE_EQ(curve.f1_at_k.at(3), 0.0);
    EXPECT_EQ(curve.to_json().at("mask_mode"), std::string(to_string(mode)));
  }
}

TEST_F(KeywordModelTest, FaithfulnessNeedsAllRationaleWordsMasked) {
  const std::vector<PromptRecord> recs = {
      record("hack and steal", Label::kUnsafe, std::vector<std::string>{"hack", "steal"}),
      record("bake the cake", Label::kSafe, std::vector<std::string>{})};
  const auto ex = encode_all(recs, vocab_);
  const std::vector<std::size_t> ks = {1, 2};
  const auto curve = faithfulness(model_, ex, ks);
  EXPECT_DOUBLE_EQ(curve.f1_at_k.at(1), 1.0);
  EXPECT_DOUBLE_EQ(curve.f1_at_k.at(2), 0.0);
}

TEST_F(KeywordModelTest, RemovingEveryWordCountsAsSafe) {
  const std::vector<PromptRecord> recs = {
      record("hack", Label::kUnsafe, std::vector<std::string>{"hack"})};
  const auto ex = encode_all(recs, vocab_);
  const std::vector<std::size_t> ks = {1};
  EXPECT_DOUBLE_EQ(faithfulness(model_, ex, ks, MaskMode::kRemove).f1_at_k.at(1), 0.0);
}

TEST_F(KeywordModelTest, GroupedF1) {
  const auto groups = grouped_f1(model_, examples_);
  ASSERT_EQ(groups.size(), 3u);
  EXPECT_EQ(groups.at("cyber").size, 1u);
  EXPECT_EQ(groups.at("others").size, 2u);
  EXPECT_DOUBLE_EQ(groups.at("others").prompt.f1, 1.0);
  ASSERT_TRUE(groups.at("others").word.has_value());
  EXPECT_DOUBLE_EQ(groups.at("others").word->f1, 1.0);
  EXPECT_DOUBLE_EQ(groups.at("food").prompt.f1, 0.0);
}

TEST_F(KeywordModelTest, LatencyHarnessSkipsWarmup) {
  std::vector<PromptRecord> many;
  for (int i = 0; i < 12; ++i) many.push_back(records_[i % 4]);
  const auto report = latency_harness(model_, vocab_, many);
  EXPECT_EQ(report.warmup, 10u);
  EXPECT_EQ(report.inputs_timed, 2u);
  EXPECT_GE(report.mean_ms, 0.0);
  const auto j = report.to_json();
  EXPECT_TRUE(j.contains("mean_ms_per_input"));
  EXPECT_TRUE(j.contains("peak_rss_mb"));
  const auto few = latency_harness(model_, vocab_, std::span(records_));
  EXPECT_EQ(few.warmup, 0u);
  EXPECT_EQ(few.inputs_timed, 4u);
}

TEST(MaskMode, Parse) {
  EXPECT_EQ(parse_mask_mode("mask"), MaskMode::kReplaceWithMask);
  EXPECT_EQ(parse_mask_mode("remove"), MaskMode::kRemove);
  EXPECT_THROW(parse_mask_mode("blur"), Error);
}

}  // namespace
}  // namespace lexguard
