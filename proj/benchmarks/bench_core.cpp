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

#include <random>

#include <benchmark/benchmark.h>

#include "lexguard/overlap.hpp"
#include "lexguard/planted.hpp"
#include "lexguard/polarization.hpp"
#include "lexguard/trainer.hpp"

namespace {

using namespace lexguard;

EncoderConfig desk_encoder(std::size_t vocab_size) {
  EncoderConfig c;
  c.vocab_size = vocab_size;
  return c;
}

void BM_Forward(benchmark::State& state) {
  const auto length = static_cast<std::size_t>(state.range(0));
  const auto model = GuardrailModel::initialize(desk_encoder(500), 1);
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<TokenId> id(3, 499);
  std::vector<TokenId> ids(length);
  for (auto& x : ids) x = id(rng);
  for (auto _ : state) benchmark::DoNotOptimize(forward(model, ids));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Forward)->Arg(16)->Arg(64)->Arg(128);

void BM_BatchGradient(benchmark::State& state) {
  const auto records = planted_corpus();
  DataOptions options;
  options.min_freq = 1;
  const auto data = prepare_data(records, {}, options);
  const auto model = GuardrailModel::initialize(desk_encoder(data.vocab.size()), 1);
  std::vector<const EncodedExample*> batch;
  for (std::size_t i = 0; i < 16; ++i) batch.push_back(&data.train[i]);
  for (auto _ : state) benchmark::DoNotOptimize(batch_gradient(model, batch, {}, nullptr));
}
BENCHMARK(BM_BatchGradient);

void BM_PolarizationTable(benchmark::State& state) {
  PlantedOptions options;
  options.n_prompts = static_cast<std::size_t>(state.range(0));
  const auto records = planted_corpus(options);
  const auto vocab = Vocabulary::build(records, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        build_polarization_table(records, vocab, CountMode::kPromptLabel, 1e-6));
  }
}
BENCHMARK(BM_PolarizationTable)->Arg(200)->Arg(2000);

void BM_LexicalOverlap(benchmark::State& state) {
  PlantedOptions options;
  options.n_prompts = static_cast<std::size_t>(state.range(0));
  const auto train = planted_corpus(options);
  options.seed = 7;
  const auto test = planted_corpus(options);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lexical_overlap(train, test, NGram::kUnigram, true));
  }
}
BENCHMARK(BM_LexicalOverlap)->Arg(100)->Arg(400);

}  // namespace

BENCHMARK_MAIN();
