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

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "lexguard/evaluation.hpp"
#include "lexguard/gateway.hpp"
#include "lexguard/labeler.hpp"
#include "lexguard/overlap.hpp"
#include "lexguard/planted.hpp"
#include "lexguard/posthoc.hpp"
#include "lexguard/trainer.hpp"

namespace lexguard {
namespace {

// Raised for flag combinations CLI11 cannot express.
class UsageError : public Error {
 public:
  using Error::Error;
};

std::vector<PromptRecord> load_optional(const std::filesystem::path& path) {
  if (path.empty()) return {};
  return load_jsonl(path);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw Error("write failed for " + path.string());
}

void emit(std::ostream& out, const nlohmann::json& report, const std::filesystem::path& path) {
  const std::string text = report.dump(2) + "\n";
  if (path.empty()) {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

std::string fixed(double value, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << value;
  return s.str();
}

// Left-aligned first column, right-aligned rest.
std::string render_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream s;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) s << "  ";
      if (c == 0) {
        s << std::left << std::setw(static_cast<int>(width[c])) << row[c];
      } else {
        s << std::right << std::setw(static_cast<int>(width[c])) << row[c];
      }
    }
    s << '\n';
  }
  return s.str();
}

struct Paths {
  std::string config;
  std::string model;
};

AppConfig config_from(const std::string& flag) {
  if (!flag.empty()) return load_app_config(flag);
  if (auto env = env_path(kConfigEnv)) return load_app_config(*env);
  return AppConfig{};
}

bool has_config(const std::string& flag) { return !flag.empty() || env_path(kConfigEnv); }

std::filesystem::path model_path(const Paths& p) {
  if (!p.model.empty()) return p.model;
  if (auto env = env_path(kModelEnv)) return *env;
  if (has_config(p.config)) return config_from(p.config).paths.checkpoint;
  throw UsageError("no model given: pass --model or set " + std::string(kModelEnv));
}

std::vector<EncodedExample> encode_for(const Checkpoint& ckpt,
                                       std::span<const PromptRecord> records) {
  auto examples = encode_all(records, ckpt.vocab);
  for (auto& ex : examples) truncate(ex, ckpt.model.config().max_len);
  return examples;
}

double pick_threshold(const Checkpoint& ckpt, const std::optional<double>& flag) {
  return flag.value_or(ckpt.threshold);
}

void add_model_flags(CLI::App* cmd, Paths& p) {
  cmd->add_option("--model", p.model, "Checkpoint file (default: $LEXGUARD_MODEL)");
  cmd->add_option("--config", p.config, "App config (default: $LEXGUARD_CONFIG)");
}

// ---- label ----

struct LabelArgs {
  std::string input, output, outcomes, client = "mock", lexicon;
  double bias_rate = 0.0;
  std::uint64_t seed = 0;
  std::size_t max_in_flight = 1;
  int retries = 2;
};

int run_label(const LabelArgs& a, std::ostream& out) {
  auto records = load_jsonl(a.input);
  std::unique_ptr<QueryClient> client;
  if (a.client == "mock") {
    if (a.lexicon.empty()) throw UsageError("--client mock needs --lexicon");
    client = std::make_unique<MockQueryClient>(
        MockQueryClient::from_file(a.lexicon, a.bias_rate, a.seed));
  } else {
    client = std::make_unique<HttpQueryClient>(HttpQueryClient::from_env());
  }
  LabelingOptions options;
  options.max_in_flight = a.max_in_flight;
  options.max_retries = a.retries;
  const auto result = generate_labels(std::move(records), *client, options);
  save_jsonl(a.output, result.records);
  if (!a.outcomes.empty()) {
    std::string lines;
    for (const auto& outcome : result.outcomes) lines += to_json(outcome).dump() + "\n";
    write_text_file(a.outcomes, lines);
  }
  emit(out, result.summary(), {});
  return kExitOk;
}

// ---- build-stats ----

struct StatsArgs {
  std::string train, output, count_mode = "prompt_label";
  std::size_t min_freq = 2;
  double epsilon = kDefaultPolarizationEpsilon;
};

int run_build_stats(const StatsArgs& a, std::ostream& out) {
  const auto records = load_jsonl(a.train);
  if (records.empty()) throw DataError("training set is empty");
  const auto vocab = Vocabulary::build(records, a.min_freq);
  const auto table = build_polarization_table(records, vocab, parse_count_mode(a.count_mode),
                                              a.epsilon);
  write_text_file(a.output, table.to_json(vocab).dump(2) + "\n");
  char checksum[17];
  std::snprintf(checksum, sizeof checksum, "%016llx",
                static_cast<unsigned long long>(table.checksum()));
  emit(out,
       {{"prompts", records.size()},
        {"vocab_size", vocab.size()},
        {"count_mode", std::string(to_string(table.mode()))},
        {"epsilon", table.epsilon()},
        {"checksum", checksum}},
       {});
  return kExitOk;
}

// ---- train ----

struct TrainArgs {
  std::string train, dev, output, log, report, preset;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs;
  std::optional<double> learning_rate;
};

int run_train(const TrainArgs& a, const Paths& paths, std::ostream& out, std::ostream& err) {
  AppConfig config = config_from(paths.config);
  if (!a.preset.empty()) {
    const auto loss = config.train.loss;
    config.train = TrainConfig::from_json({{"preset", a.preset}}, config.train);
    config.train.loss = loss;
  }
  if (a.seed) config.train.seed = *a.seed;
  if (a.epochs) config.train.epochs = *a.epochs;
  if (a.learning_rate) config.train.learning_rate = *a.learning_rate;
  config.train.validate();
  if (!a.train.empty()) config.data.train = a.train;
  if (!a.dev.empty()) config.data.dev = a.dev;
  if (!a.log.empty()) config.paths.train_log = a.log;
  std::filesystem::path checkpoint_path = config.paths.checkpoint;
  if (!a.output.empty()) checkpoint_path = a.output;
  if (config.data.train.empty()) throw UsageError("no training data: pass --train or a config");

  const auto train_records = load_jsonl(config.data.train);
  const auto dev_records = load_optional(config.data.dev);
  auto data_options = config.data.options;
  data_options.max_tokens = config.model.max_len;
  auto data = prepare_data(train_records, dev_records, data_options);
  auto model = GuardrailModel::initialize(config.model.encoder(data.vocab.size()),
                                          config.train.seed);
  const auto checksum_before = data.table.checksum();

  std::ofstream log;
  if (!config.paths.train_log.empty()) {
    if (config.paths.train_log.has_parent_path()) {
      std::filesystem::create_directories(config.paths.train_log.parent_path());
    }
    log.open(config.paths.train_log, std::ios::trunc);
    if (!log) throw Error("cannot write " + config.paths.train_log.string());
  }
  StepObserver observer;
  if (log.is_open()) {
    observer = [&log](const StepEvent& e) {
      auto line = e.loss.to_json();
      line["epoch"] = e.epoch;
      line["step"] = e.step;
      log << line.dump() << '\n';
    };
  }
  auto report = train(model, data.train, data.dev, config.train, observer);
  report.polarization_checksum = checksum_before;
  if (data.table.checksum() != checksum_before) throw Error("polarization table changed in training");

  save_checkpoint(Checkpoint{model, data.vocab, report.threshold.threshold}, checkpoint_path);

  auto train_json = config.train.to_json();
  nlohmann::json j = {
      {"config", {{"train", std::move(train_json)}, {"model", config.model.encoder(data.vocab.size()).to_json()}}},
      {"data",
       {{"train_prompts", data.train.size()},
        {"dev_prompts", data.dev.size()},
        {"vocab_size", data.vocab.size()},
        {"model_params", count_params(model)},
        {"matched_phrases", data.projection.matched_phrases},
        {"unmatched_phrases", data.projection.unmatched_phrases}}},
      {"report", report.to_json()}};
  emit(out, j, a.report);
  err << "trained " << report.epochs.size() << " epochs in " << fixed(report.wall_clock_seconds, 2)
      << " s; checkpoint " << checkpoint_path.string() << '\n';
  if (report.threshold.degenerate) err << "warning: dev set has no unsafe prompts\n";
  return kExitOk;
}

// ---- eval ----

struct EvalArgs {
  std::string data, format = "json", output;
  std::optional<double> threshold;
  bool grouped = false;
};

int run_eval(const EvalArgs& a, const Paths& paths, std::ostream& out) {
  const auto ckpt = load_checkpoint(model_path(paths));
  const auto records = load_jsonl(a.data);
  const auto examples = encode_for(ckpt, records);
  const double threshold = pick_threshold(ckpt, a.threshold);
  const auto prompt = prompt_f1(ckpt.model, examples, threshold);
  const auto word = word_f1(ckpt.model, examples);
  std::map<std::string, GroupScores> groups;
  if (a.grouped) groups = grouped_f1(ckpt.model, examples, threshold);

  if (a.format == "text") {
    std::vector<std::vector<std::string>> rows = {
        {"scope", "n", "prompt_f1", "word_f1"},
        {"all", std::to_string(examples.size()), fixed(prompt.f1), fixed(word.f1)}};
    for (const auto& [name, g] : groups) {
      rows.push_back({name, std::to_string(g.size), fixed(g.prompt.f1),
                      g.word ? fixed(g.word->f1) : "-"});
    }
    out << "threshold " << fixed(threshold, 2) << '\n' << render_table(rows);
    return kExitOk;
  }
  nlohmann::json j = {{"prompts", examples.size()},
                      {"threshold", threshold},
                      {"prompt_f1", prompt.to_json()},
                      {"word_f1", word.to_json()}};
  if (a.grouped) {
    nlohmann::json g = nlohmann::json::object();
    for (const auto& [name, scores] : groups) {
      g[name] = {{"size", scores.size},
                 {"prompt_f1", scores.prompt.to_json()},
                 {"word_f1", scores.word ? scores.word->to_json() : nlohmann::json(nullptr)}};
    }
    j["groups"] = std::move(g);
  }
  emit(out, j, a.output);
  return kExitOk;
}

// ---- faithfulness ----

struct FaithArgs {
  std::string data, mask_mode = "replace_with_mask", format = "json", output;
  std::vector<std::size_t> k_values{1, 2, 3};
  std::optional<double> threshold;
};

int run_faithfulness(const FaithArgs& a, const Paths& paths, std::ostream& out) {
  const auto ckpt = load_checkpoint(model_path(paths));
  const auto examples = encode_for(ckpt, load_jsonl(a.data));
  const auto mode = parse_mask_mode(a.mask_mode);
  const double threshold = pick_threshold(ckpt, a.threshold);
  const auto curve = faithfulness(ckpt.model, examples, a.k_values, mode, threshold);
  if (a.format == "text") {
    std::vector<std::vector<std::string>> rows = {{"input", "unsafe_f1"},
                                                  {"full", fixed(curve.f1_full)}};
    for (const auto& [k, f1] : curve.f1_at_k) rows.push_back({"mask top " + std::to_string(k), fixed(f1)});
    out << "mask_mode " << to_string(mode) << ", threshold " << fixed(threshold, 2) << '\n'
        << render_table(rows);
    return kExitOk;
  }
  emit(out,
       {{"config",
         {{"prompts", examples.size()},
          {"k_values", a.k_values},
          {"mask_mode", std::string(to_string(mode))},
          {"threshold", threshold}}},
        {"curve", curve.to_json()}},
       a.output);
  return kExitOk;
}

// ---- overlap ----

struct OverlapArgs {
  std::string train, test, ngram = "unigram", format = "json", output;
  bool no_stopword_filter = false;
};

int run_overlap(const OverlapArgs& a, std::ostream& out) {
  const auto train = load_jsonl(a.train);
  const auto test = load_jsonl(a.test);
  const auto n = parse_ngram(a.ngram);
  const auto hist = lexical_overlap(train, test, n, !a.no_stopword_filter);
  if (a.format == "text") {
    std::vector<std::vector<std::string>> rows = {{"max_jaccard", "count", "percent"}};
    for (std::size_t b = 0; b < kOverlapBuckets; ++b) {
      const std::string range = "[" + fixed(b / 10.0, 1) + ", " + fixed((b + 1) / 10.0, 1) +
                                (b + 1 == kOverlapBuckets ? "]" : ")");
      rows.push_back({range, std::to_string(hist.counts[b]), fixed(hist.percent[b], 2)});
    }
    out << to_string(n) << (hist.stopword_filtered ? ", stopwords filtered" : "") << '\n'
        << render_table(rows);
    return kExitOk;
  }
  emit(out,
       {{"config",
         {{"train_prompts", train.size()},
          {"test_prompts", test.size()},
          {"n_gram", std::string(to_string(n))},
          {"stopword_filtered", hist.stopword_filtered}}},
        {"histogram", hist.to_json()}},
       a.output);
  return kExitOk;
}

// ---- explain-baseline ----

struct ExplainArgs {
  std::string text, data, method = "lime", shapley_mode = "exact", output;
  std::uint64_t seed = 0;
  std::size_t samples = 1500, top_k = 25, permutations = 2000;
  std::optional<double> kernel_width;
  std::vector<double> grid;
};

int run_explain(const ExplainArgs& a, const Paths& paths, std::ostream& out) {
  if (a.text.empty() == a.data.empty()) throw UsageError("pass exactly one of --text or --data");
  if (a.method != "lime" && a.method != "shapley") throw UsageError("--method must be lime or shapley");
  const auto ckpt = load_checkpoint(model_path(paths));
  const auto blackbox = model_blackbox(ckpt.model, ckpt.vocab);

  LimeOptions lime;
  lime.n_samples = a.samples;
  lime.top_k = a.top_k;
  lime.seed = a.seed;
  lime.kernel_width = a.kernel_width;
  ShapleyOptions shapley;
  shapley.mode = a.shapley_mode == "exact" ? ShapleyOptions::Mode::kExact
                                           : ShapleyOptions::Mode::kPermutation;
  if (a.shapley_mode != "exact" && a.shapley_mode != "permutation") {
    throw UsageError("--shapley-mode must be exact or permutation");
  }
  shapley.n_permutations = a.permutations;
  shapley.seed = a.seed;

  auto explain = [&](const std::string& text) {
    auto tokens = tokenize(text, ckpt.vocab);
    truncate(tokens, ckpt.model.config().max_len);
    if (tokens.num_tokens() == 0) throw DataError("empty text");
    if (a.method == "lime") return lime_explain(tokens.words, blackbox, lime);
    return shapley_explain(tokens.words, tokens.word_spans, blackbox, shapley);
  };

  nlohmann::json config = {{"method", a.method}};
  if (a.method == "lime") {
    config["lime"] = lime.to_json();
  } else {
    config["shapley"] = {{"mode", a.shapley_mode},
                         {"n_permutations", a.permutations},
                         {"seed", a.seed},
                         {"mask", std::string(kMaskWord)}};
  }

  if (!a.text.empty()) {
    auto tokens = tokenize(a.text, ckpt.vocab);
    truncate(tokens, ckpt.model.config().max_len);
    emit(out, {{"config", config}, {"words", tokens.words}, {"weights", explain(a.text)}}, a.output);
    return kExitOk;
  }

  const auto records = load_jsonl(a.data);
  nlohmann::json items = nlohmann::json::array();
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<Label>> gold;
  for (const auto& r : records) {
    auto ex = encode_example(r, ckpt.vocab);
    truncate(ex, ckpt.model.config().max_len);
    auto w = a.method == "lime" ? lime_explain(ex.words, blackbox, lime)
                                : shapley_explain(ex.words, ex.word_spans, blackbox, shapley);
    items.push_back({{"id", r.id}, {"words", ex.words}, {"weights", w}});
    if (ex.supervised()) {
      weights.push_back(std::move(w));
      gold.push_back(word_labels(ex));
    }
  }
  nlohmann::json j = {{"config", config}, {"explanations", std::move(items)}};
  if (!a.grid.empty()) {
    const auto choice = lime_threshold(weights, gold, a.grid);
    j["threshold"] = {{"value", choice.threshold},
                      {"word_f1", std::max(choice.f1, 0.0)},
                      {"degenerate", choice.degenerate},
                      {"grid", a.grid}};
  }
  emit(out, j, a.output);
  return kExitOk;
}

// ---- tune-threshold ----

struct TuneArgs {
  std::string dev, output;
  std::vector<double> grid = default_threshold_grid();
};

int run_tune(const TuneArgs& a, const Paths& paths, std::ostream& out, std::ostream& err) {
  for (double t : a.grid) {
    if (!(t > 0.0 && t < 1.0)) throw UsageError("grid values must lie in (0, 1)");
  }
  auto ckpt = load_checkpoint(model_path(paths));
  const auto examples = encode_for(ckpt, load_jsonl(a.dev));
  const auto choice = tune_threshold(ckpt.model, examples, a.grid);
  if (choice.degenerate) err << "warning: dev set has no unsafe prompts\n";
  if (!a.output.empty()) {
    ckpt.threshold = choice.threshold;
    save_checkpoint(ckpt, a.output);
  }
  emit(out,
       {{"threshold", choice.threshold},
        {"dev_f1", choice.f1},
        {"degenerate", choice.degenerate},
        {"grid", a.grid}},
       {});
  return kExitOk;
}

// ---- check ----

struct CheckArgs {
  std::string text;
  std::optional<double> threshold;
  bool verbose = false, merge_phrases = false;
};

int run_check(const CheckArgs& a, const Paths& paths, std::ostream& out) {
  const auto ckpt = load_checkpoint(model_path(paths));
  const auto verdict = predict(ckpt.model, ckpt.vocab, a.text, pick_threshold(ckpt, a.threshold));
  out << verdict_json(verdict, {a.verbose, a.merge_phrases}).dump() << '\n';
  return kExitOk;
}

// ---- bench ----

struct BenchArgs {
  std::string data;
  std::optional<double> threshold;
};

int run_bench(const BenchArgs& a, const Paths& paths, std::ostream& out) {
  const auto ckpt = load_checkpoint(model_path(paths));
  const auto records = load_jsonl(a.data);
  const auto report = latency_harness(ckpt.model, ckpt.vocab, records, pick_threshold(ckpt, a.threshold));
  emit(out, report.to_json(), {});
  return kExitOk;
}

// ---- serve ----

struct ServeArgs {
  std::optional<std::string> host;
  std::optional<int> port;
  std::optional<std::size_t> max_body_bytes, threads;
};

int run_serve(const ServeArgs& a, const Paths& paths, std::ostream& err) {
  auto settings = config_from(paths.config).serve;
  if (a.host) settings.host = *a.host;
  if (a.port) settings.port = *a.port;
  if (a.max_body_bytes) settings.max_body_bytes = *a.max_body_bytes;
  if (a.threads) settings.threads = *a.threads;
  GuardServer server(load_checkpoint(model_path(paths)), settings);
  const int port = server.bind();
  err << "listening on " << settings.host << ':' << port << std::endl;
  server.listen();
  return kExitOk;
}

// ---- planted ----

struct PlantedArgs {
  std::string output, lexicon;
  PlantedOptions options;
};

int run_planted(const PlantedArgs& a, std::ostream& out) {
  const auto records = planted_corpus(a.options);
  save_jsonl(a.output, records);
  if (!a.lexicon.empty()) {
    std::string lines;
    for (const auto& phrase : planted_phrases()) lines += phrase + "\n";
    write_text_file(a.lexicon, lines);
  }
  std::size_t unsafe = 0;
  for (const auto& r : records) unsafe += r.label == Label::kUnsafe ? 1 : 0;
  emit(out, {{"prompts", records.size()}, {"unsafe", unsafe}, {"seed", a.options.seed}}, {});
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"lexguard: explainable prompt-safety guardrail", "lexguard"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "lexguard 0.1.0");
  Paths paths;
  std::function<int()> action;
  const std::vector<std::string> formats = {"json", "text"};

  LabelArgs label;
  auto* cmd = app.add_subcommand("label", "Label explanations with two bias-primed LLM queries");
  cmd->add_option("--input", label.input, "Records to label (JSONL)")->required();
  cmd->add_option("--output", label.output, "Enriched records (JSONL)")->required();
  cmd->add_option("--outcomes", label.outcomes, "Per-record outcome sidecar (JSONL)");
  cmd->add_option("--client", label.client, "Query client")->check(CLI::IsMember({"mock", "http"}));
  cmd->add_option("--lexicon", label.lexicon, "Unsafe phrase list for the mock client");
  cmd->add_option("--bias-rate", label.bias_rate, "Mock capitulation rate")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--seed", label.seed, "Mock client seed");
  cmd->add_option("--max-in-flight", label.max_in_flight, "Concurrent queries")->check(CLI::PositiveNumber);
  cmd->add_option("--retries", label.retries, "Retries per query")->check(CLI::NonNegativeNumber);
  cmd->callback([&] { action = [&] { return run_label(label, out); }; });

  StatsArgs stats;
  cmd = app.add_subcommand("build-stats", "Build the token polarization table");
  cmd->add_option("--train", stats.train, "Training records (JSONL)")->required();
  cmd->add_option("--output", stats.output, "Table file (JSON)")->required();
  cmd->add_option("--min-freq", stats.min_freq, "Vocabulary frequency cutoff")->check(CLI::PositiveNumber);
  cmd->add_option("--count-mode", stats.count_mode, "Label source for counts")
      ->check(CLI::IsMember({"prompt_label", "token_label"}));
  cmd->add_option("--epsilon", stats.epsilon, "Smoothing constant")->check(CLI::PositiveNumber);
  cmd->callback([&] { action = [&] { return run_build_stats(stats, out); }; });

  TrainArgs tr;
  cmd = app.add_subcommand("train", "Train a guardrail model");
  cmd->add_option("--config", paths.config, "App config (default: $LEXGUARD_CONFIG)");
  cmd->add_option("--train", tr.train, "Training records (JSONL)");
  cmd->add_option("--dev", tr.dev, "Dev records (JSONL)");
  cmd->add_option("--output", tr.output, "Checkpoint to write");
  cmd->add_option("--log", tr.log, "Per-step loss log (JSONL)");
  cmd->add_option("--report", tr.report, "Write the report here instead of stdout");
  cmd->add_option("--preset", tr.preset, "Training preset")->check(CLI::IsMember({"desk", "fine_tune"}));
  cmd->add_option("--seed", tr.seed, "Seed for init, shuffling and dropout");
  cmd->add_option("--epochs", tr.epochs, "Epoch count")->check(CLI::PositiveNumber);
  cmd->add_option("--lr", tr.learning_rate, "Learning rate")->check(CLI::NonNegativeNumber);
  cmd->callback([&] { action = [&] { return run_train(tr, paths, out, err); }; });

  EvalArgs ev;
  cmd = app.add_subcommand("eval", "Prompt and word unsafe-F1");
  add_model_flags(cmd, paths);
  cmd->add_option("--data", ev.data, "Records (JSONL)")->required();
  cmd->add_option("--threshold", ev.threshold, "Override the checkpoint threshold")->check(CLI::Range(0.0, 1.0));
  cmd->add_flag("--grouped", ev.grouped, "Also report per category");
  cmd->add_option("--format", ev.format, "Output format")->check(CLI::IsMember(formats));
  cmd->add_option("--output", ev.output, "Write the report here instead of stdout");
  cmd->callback([&] { action = [&] { return run_eval(ev, paths, out); }; });

  FaithArgs fa;
  cmd = app.add_subcommand("faithfulness", "F1 after masking the top-k explanation words");
  add_model_flags(cmd, paths);
  cmd->add_option("--data", fa.data, "Records (JSONL)")->required();
  cmd->add_option("--k", fa.k_values, "Comma-separated k values")->delimiter(',');
  cmd->add_option("--mask-mode", fa.mask_mode, "How masked words are handled")
      ->check(CLI::IsMember({"replace_with_mask", "remove"}));
  cmd->add_option("--threshold", fa.threshold, "Override the checkpoint threshold")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--format", fa.format, "Output format")->check(CLI::IsMember(formats));
  cmd->add_option("--output", fa.output, "Write the report here instead of stdout");
  cmd->callback([&] { action = [&] { return run_faithfulness(fa, paths, out); }; });

  OverlapArgs ov;
  cmd = app.add_subcommand("overlap", "Max-Jaccard lexical overlap histogram");
  cmd->add_option("--train", ov.train, "Reference records (JSONL)")->required();
  cmd->add_option("--test", ov.test, "Query records (JSONL)")->required();
  cmd->add_option("--ngram", ov.ngram, "Term unit")->check(CLI::IsMember({"unigram", "bigram"}));
  cmd->add_flag("--no-stopword-filter", ov.no_stopword_filter, "Keep stopwords in unigram sets");
  cmd->add_option("--format", ov.format, "Output format")->check(CLI::IsMember(formats));
  cmd->add_option("--output", ov.output, "Write the report here instead of stdout");
  cmd->callback([&] { action = [&] { return run_overlap(ov, out); }; });

  ExplainArgs ex;
  cmd = app.add_subcommand("explain-baseline", "Post-hoc LIME or Shapley word attributions");
  add_model_flags(cmd, paths);
  cmd->add_option("--text", ex.text, "Prompt to explain");
  cmd->add_option("--data", ex.data, "Records to explain (JSONL)");
  cmd->add_option("--method", ex.method, "Attribution method")->check(CLI::IsMember({"lime", "shapley"}));
  cmd->add_option("--seed", ex.seed, "Sampling seed");
  cmd->add_option("--samples", ex.samples, "LIME perturbations")->check(CLI::PositiveNumber);
  cmd->add_option("--top-k", ex.top_k, "LIME surrogate features")->check(CLI::PositiveNumber);
  cmd->add_option("--kernel-width", ex.kernel_width, "LIME kernel width")->check(CLI::PositiveNumber);
  cmd->add_option("--shapley-mode", ex.shapley_mode, "Shapley computation")
      ->check(CLI::IsMember({"exact", "permutation"}));
  cmd->add_option("--permutations", ex.permutations, "Permutation count")->check(CLI::PositiveNumber);
  cmd->add_option("--grid", ex.grid, "Tune a word threshold over these values")->delimiter(',');
  cmd->add_option("--output", ex.output, "Write the report here instead of stdout");
  cmd->callback([&] { action = [&] { return run_explain(ex, paths, out); }; });

  TuneArgs tu;
  cmd = app.add_subcommand("tune-threshold", "Pick the dev-optimal prompt threshold");
  add_model_flags(cmd, paths);
  cmd->add_option("--dev", tu.dev, "Dev records (JSONL)")->required();
  cmd->add_option("--grid", tu.grid, "Comma-separated thresholds")->delimiter(',');
  cmd->add_option("--output", tu.output, "Write a checkpoint carrying the tuned threshold");
  cmd->callback([&] { action = [&] { return run_tune(tu, paths, out, err); }; });

  CheckArgs ch;
  cmd = app.add_subcommand("check", "Classify one prompt and explain the verdict");
  add_model_flags(cmd, paths);
  cmd->add_option("--text", ch.text, "Prompt text")->required();
  cmd->add_option("--threshold", ch.threshold, "Override the checkpoint threshold")->check(CLI::Range(0.0, 1.0));
  cmd->add_flag("--verbose", ch.verbose, "Include per-word and prompt scores");
  cmd->add_flag("--merge-phrases", ch.merge_phrases, "Join adjacent explanation words");
  cmd->callback([&] { action = [&] { return run_check(ch, paths, out); }; });

  BenchArgs be;
  cmd = app.add_subcommand("bench", "Sequential single-input latency");
  add_model_flags(cmd, paths);
  cmd->add_option("--data", be.data, "Records (JSONL)")->required();
  cmd->add_option("--threshold", be.threshold, "Override the checkpoint threshold")->check(CLI::Range(0.0, 1.0));
  cmd->callback([&] { action = [&] { return run_bench(be, paths, out); }; });

  ServeArgs sv;
  cmd = app.add_subcommand("serve", "HTTP moderation endpoint");
  add_model_flags(cmd, paths);
  cmd->add_option("--host", sv.host, "Bind address");
  cmd->add_option("--port", sv.port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
  cmd->add_option("--max-body-bytes", sv.max_body_bytes, "Request size cap")->check(CLI::PositiveNumber);
  cmd->add_option("--threads", sv.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->callback([&] { action = [&] { return run_serve(sv, paths, err); }; });

  PlantedArgs pl;
  cmd = app.add_subcommand("planted", "Write the synthetic planted-phrase corpus");
  cmd->add_option("--output", pl.output, "Records (JSONL)")->required();
  cmd->add_option("--lexicon", pl.lexicon, "Also write the planted phrases, one per line");
  cmd->add_option("--n", pl.options.n_prompts, "Prompt count")->check(CLI::PositiveNumber);
  cmd->add_option("--unsafe-fraction", pl.options.unsafe_fraction, "Share of unsafe prompts")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--seed", pl.options.seed, "Generator seed");
  cmd->callback([&] { action = [&] { return run_planted(pl, out); }; });

  if (!args.empty() && !args.front().starts_with("-") &&
      app.get_subcommand_no_throw(args.front()) == nullptr) {
    err << "unknown subcommand '" << args.front() << "'\n" << app.help();
    return kExitUsage;
  }
  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return action();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CheckpointError& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace lexguard
