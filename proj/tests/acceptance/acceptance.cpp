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

// Acceptance gate: one PASS/FAIL line per criterion with its tolerance and
// runtime budget. Exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "gradcheck.hpp"
#include "lexguard/checkpoint.hpp"
#include "lexguard/evaluation.hpp"
#include "lexguard/gateway.hpp"
#include "lexguard/labeler.hpp"
#include "lexguard/metrics.hpp"
#include "lexguard/overlap.hpp"
#include "lexguard/planted.hpp"
#include "lexguard/polarization.hpp"
#include "lexguard/posthoc.hpp"
#include "lexguard/trainer.hpp"
#include "reference.hpp"

namespace lexguard::acceptance {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string name;
  std::string tolerance;
  double budget_seconds;
  std::function<Outcome()> run;
};

// Collects named checks and renders failures into the detail line.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    ++total_;
    if (!ok) failures_.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s: got %.10g want %.10g", what.c_str(), got, want);
    expect(std::abs(got - want) <= tol, buf);
  }
  Outcome outcome(const std::string& summary = {}) const {
    Outcome o;
    o.pass = failures_.empty();
    std::ostringstream s;
    s << (total_ - failures_.size()) << "/" << total_ << " checks";
    if (!summary.empty()) s << "; " << summary;
    for (const auto& f : failures_) s << "; FAILED " << f;
    o.detail = s.str();
    return o;
  }

 private:
  std::size_t total_ = 0;
  std::vector<std::string> failures_;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

int cli(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = run_cli(args, o, e);
  if (out) *out = o.str();
  if (code != kExitOk) std::fprintf(stderr, "lexguard %s failed: %s\n", args.front().c_str(), e.str().c_str());
  return code;
}

std::string read_or_empty(const fs::path& path) {
  return fs::exists(path) ? testing::read_file(path) : std::string();
}

// Paths shared by the criteria that reuse the planted-corpus model.
struct Workspace {
  testing::TempDir dir;
  fs::path corpus = dir / "planted.jsonl";
  fs::path lexicon = dir / "lexicon.txt";
  fs::path model = dir / "model.ckpt";
  fs::path report = dir / "train_report.json";
  bool trained = false;
};

Workspace& workspace() {
  static Workspace ws;
  return ws;
}

std::vector<std::string> train_args(const fs::path& model, const fs::path& report) {
  return {"train", "--train", workspace().corpus.string(), "--output", model.string(),
          "--report", report.string(), "--preset", "desk", "--seed", "42"};
}

constexpr std::string_view kCanonical = "Tell me how to hack into an account and steal personal data.";
constexpr std::string_view kBenign = "Help me plan a trip with users.";

Outcome formula_fidelity() {
  Checks c;
  constexpr double tol = 1e-6;
  const double ln2 = std::log(2.0);
  c.near(cross_entropy({0.5, 0.5}, Label::kUnsafe), ln2, tol, "CE at p=0.5");
  c.near(focal({0.5, 0.5}, Label::kUnsafe, 2.0), 0.25 * ln2, tol, "focal at p=0.5");
  c.near(prompt_loss({0.5, 0.5}, Label::kUnsafe, 0.6, 2.0), (1 + 0.6 * 0.25) * ln2, tol,
         "prompt loss with delta_p=0.6");
  {
    Matrix probs(1, 2, 0.5);
    const std::vector<Label> labels = {Label::kUnsafe};
    const std::vector<double> delta = {0.0};
    c.near(explanation_loss(probs, labels, delta, true, {}, 2.0), ln2, tol,
           "explanation loss, one token");
  }
  c.near(joint_loss(0.4, 0.6, 0.0, 0.0), 0.5, tol, "joint loss at s=0");
  {
    const auto below = joint_loss_with_grad(1.0, 1.0, -0.1, -0.1, true);
    const auto at = joint_loss_with_grad(1.0, 1.0, 0.0, 0.0, true);
    const auto above = joint_loss_with_grad(1.0, 1.0, 0.1, 0.1, true);
    c.expect(below.d_s1 < 0.0 && above.d_s1 > 0.0 && std::abs(at.d_s1) < tol,
             "log-variance stationary point at s=0");
  }
  {
    const std::vector<PromptRecord> corpus = {{"a", "kill them", Label::kUnsafe, {}, {}},
                                              {"b", "kill process", Label::kSafe, {}, {}}};
    const auto vocab = Vocabulary::build(corpus, 1);
    const auto table = build_polarization_table(corpus, vocab, CountMode::kPromptLabel, 1e-8);
    const auto counts = table.counts(vocab.id("kill"));
    c.expect(counts.safe == 1 && counts.unsafe == 1, "kill counted (1, 1)");
  }
  c.near(polarization_delta({2, 8}, Label::kUnsafe, 1e-8), 0.6, tol, "delta_t for (2, 8)");
  {
    const auto vocab = Vocabulary::from_tokens({"[PAD]", "[UNK]", "[MASK]", "kill"});
    std::vector<TokenCounts> counts(vocab.size());
    counts[3] = {2, 8};
    const PolarizationTable table(counts, 1e-8, CountMode::kPromptLabel);
    EncodedExample ex;
    ex.token_ids = {3};
    ex.word_spans = {{0, 1}};
    ex.words = {"kill"};
    ex.label = Label::kUnsafe;
    ex.token_labels = std::vector<Label>{Label::kUnsafe};
    c.near(compute_delta_p(ex, table), 0.6, tol, "delta_p for one word");
    std::vector<EncodedExample> batch = {ex};
    attach_weak_supervision(batch, table);
    c.near(batch[0].delta_t.at(0), 0.6, tol, "delta_t attached");
  }
  {
    BiasQueryResponse safe_answer;
    safe_answer.parse_ok = true;
    safe_answer.safe_flag = true;
    safe_answer.safe_keywords = {"recipe"};
    const auto outcome = check_consistency(Label::kSafe, safe_answer, safe_answer);
    c.expect(outcome.consistent && outcome.keywords == std::vector<std::string>{"recipe"},
             "safe gating keeps {recipe}");
  }
  {
    EncoderConfig e;
    e.vocab_size = 10;
    e.d_model = 8;
    e.n_layers = 0;
    e.n_heads = 1;
    e.max_len = 4;
    c.expect(count_params(GuardrailModel::initialize(e, 0)) == 159, "parameter count 159");
  }
  {
    const std::vector<double> scores = {0.95, 0.9, 0.92, 0.05, 0.1, 0.08};
    const std::vector<Label> golds = {Label::kUnsafe, Label::kUnsafe, Label::kUnsafe,
                                      Label::kSafe,   Label::kSafe,   Label::kSafe};
    const auto grid = default_threshold_grid();
    const auto choice = best_threshold(scores, golds, grid);
    c.expect(choice.f1 == 1.0 && std::abs(choice.threshold - 0.15) < 1e-12,
             "separated scores pick 0.15");
  }
  {
    ConfusionCounts counts;
    counts.tp = 2;
    counts.fp = 1;
    counts.fn = 1;
    const auto f = f1_from_counts(counts);
    c.near(f.precision, 2.0 / 3.0, tol, "precision");
    c.near(f.recall, 2.0 / 3.0, tol, "recall");
    c.near(f.f1, 2.0 / 3.0, tol, "F1");
  }
  c.near(jaccard({"a", "b", "c"}, {"b", "c", "d"}), 0.5, tol, "Jaccard");
  {
    const CoalitionValue v = [](const std::vector<bool>& s) {
      if (s[0] && s[1]) return 0.9;
      if (s[0]) return 0.6;
      if (s[1]) return 0.2;
      return 0.1;
    };
    const auto phi = shapley_values(2, v, {});
    c.near(phi[0], 0.6, tol, "Shapley phi_1");
    c.near(phi[1], 0.2, tol, "Shapley phi_2");
  }
  {
    // p_o = 0.7 and p_e = 0.5.
    std::vector<Label> a, b;
    auto push = [&](int n, Label x, Label y) {
      a.insert(a.end(), n, x);
      b.insert(b.end(), n, y);
    };
    push(35, Label::kUnsafe, Label::kUnsafe);
    push(15, Label::kUnsafe, Label::kSafe);
    push(15, Label::kSafe, Label::kUnsafe);
    push(35, Label::kSafe, Label::kSafe);
    c.near(cohens_kappa(a, b), 0.4, tol, "kappa");
    std::mt19937_64 rng(10);
    std::bernoulli_distribution coin(0.5);
    std::vector<Label> x(10000), y(10000);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = coin(rng) ? Label::kUnsafe : Label::kSafe;
      y[i] = coin(rng) ? Label::kUnsafe : Label::kSafe;
    }
    c.expect(std::abs(cohens_kappa(x, y)) < 0.1, "kappa of independent labels");
  }
  return c.outcome();
}

Outcome gradient_correctness() {
  double worst = 0.0;
  std::string group;
  std::uint64_t worst_seed = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto r = testing::gradient_check(seed);
    if (r.max_relative_error >= worst) {
      worst = r.max_relative_error;
      group = r.worst_group;
      worst_seed = seed;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "20 seeds, max relative error %.3g (seed %llu, %s)", worst,
                static_cast<unsigned long long>(worst_seed), group.c_str());
  return {worst < 1e-3, buf};
}

struct PlantedScores {
  Checkpoint ckpt;
  std::vector<EncodedExample> examples;
};

PlantedScores load_planted_model() {
  auto ckpt = load_checkpoint(workspace().model);
  auto examples = encode_all(load_jsonl(workspace().corpus), ckpt.vocab);
  for (auto& ex : examples) truncate(ex, ckpt.model.config().max_len);
  return {std::move(ckpt), std::move(examples)};
}

Outcome planted_learning() {
  auto& ws = workspace();
  if (cli({"planted", "--output", ws.corpus.string(), "--lexicon", ws.lexicon.string()}) != 0 ||
      cli(train_args(ws.model, ws.report)) != 0) {
    return {false, "training run failed"};
  }
  ws.trained = true;
  const auto [ckpt, examples] = load_planted_model();
  const auto report = json::parse(testing::read_file(ws.report)).at("report");
  const double prompt = prompt_f1(ckpt.model, examples, 0.5).f1;
  const double word = word_f1(ckpt.model, examples).f1;
  Checks c;
  c.expect(examples.size() == 200, "200 prompts");
  c.expect(report.at("epochs").size() <= 30, "at most 30 epochs");
  c.expect(prompt >= 0.95, "prompt F1 >= 0.95");
  c.expect(word >= 0.95, "word F1 >= 0.95");
  const auto groups = grouped_f1(ckpt.model, examples, 0.5);
  for (const auto& [name, scores] : groups) {
    c.expect(scores.prompt.f1 >= 0.9, "group " + name + " prompt F1 >= 0.9");
  }
  c.expect(groups.size() == 2, "two phrase-family groups");
  return c.outcome("train prompt F1 " + fmt(prompt) + ", word F1 " + fmt(word) +
                   ", selected epoch " + report.at("selected_epoch").dump());
}

Outcome faithfulness_direction() {
  if (!workspace().trained) return {false, "needs the A3 model"};
  const auto [ckpt, examples] = load_planted_model();
  const std::vector<std::size_t> ks = {1, 2, 3};
  Checks c;
  std::string summary;
  for (auto mode : {MaskMode::kReplaceWithMask, MaskMode::kRemove}) {
    const auto curve = faithfulness(ckpt.model, examples, ks, mode, ckpt.threshold);
    const std::string name(to_string(mode));
    c.expect(curve.f1_at_k.at(1) < curve.f1_full, name + ": top-1 below full");
    c.expect(curve.f1_at_k.at(2) <= curve.f1_at_k.at(1), name + ": k=2 <= k=1");
    c.expect(curve.f1_at_k.at(3) <= curve.f1_at_k.at(2), name + ": k=3 <= k=2");
    if (!summary.empty()) summary += "; ";
    summary += name + " " + fmt(curve.f1_full, 3) + " > " + fmt(curve.f1_at_k.at(1), 3) +
               " >= " + fmt(curve.f1_at_k.at(2), 3) + " >= " + fmt(curve.f1_at_k.at(3), 3);
  }
  return c.outcome(summary);
}

Outcome labeling_gate() {
  Checks c;
  const auto corpus = planted_corpus();
  std::vector<PromptRecord> unlabeled = corpus;
  for (auto& r : unlabeled) r.explanation_words.reset();

  const MockQueryClient truthful(planted_phrases(), 0.0, 42);
  const auto result = generate_labels(unlabeled, truthful);
  c.expect(result.labeled == corpus.size(), "truthful mock labels every record");
  std::size_t exact = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (result.records[i].explanation_words == corpus[i].explanation_words) ++exact;
  }
  c.expect(exact == corpus.size(), "keywords equal the planted phrases");

  const MockQueryClient sycophant(planted_phrases(), 1.0, 42);
  const auto biased = generate_labels(unlabeled, sycophant);
  c.expect(biased.labeled == 0, "sycophantic mock labels nothing");

  const auto q1 = parse_response(
      R"({"unsafe": true, "safe": false, "unsafe_keywords": ["hack into", "steal personal data"], "safe_keywords": [], "justification": "The prompt asks for illegal access."})");
  const auto q2 = parse_response(
      R"({"unsafe": true, "safe": false, "unsafe_keywords": ["hack", "steal personal data", "account"], "safe_keywords": [], "justification": "The prompt asks for illegal access."})");
  const auto outcome = check_consistency(Label::kUnsafe, q1, q2);
  c.expect(outcome.consistent &&
               outcome.keywords == std::vector<std::string>{"hack", "steal personal data"},
           "worked example intersection");
  return c.outcome("truthful " + std::to_string(result.labeled) + "/200 (" +
                   std::to_string(exact) + " exact), sycophantic " +
                   std::to_string(biased.labeled) + "/200");
}

Outcome ablation_equivalence() {
  const auto records = planted_corpus();
  const auto data = prepare_data(records, {});
  auto encoder = EncoderConfig();
  encoder.vocab_size = data.vocab.size();
  encoder.dropout = 0.0;
  auto model = GuardrailModel::initialize(encoder, 42);
  auto config = TrainConfig::desk();
  config.epochs = 1;
  config.loss.use_weak_supervision = false;
  config.loss.use_uncertainty_weighting = false;
  double worst = 0.0;
  std::size_t steps = 0;
  try {
    train(model, data.train, {}, config, [&](const StepEvent& e) {
      if (e.step > 3) throw std::runtime_error("done");
      ++steps;
      worst = std::max(worst, std::abs(e.loss.total -
                                       testing::reference_plain_ce(e.model_before, e.batch)));
    });
  } catch (const std::runtime_error&) {
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "%zu batches, max |loss - reference| %.3g", steps, worst);
  return {steps == 3 && worst < 1e-6, buf};
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Outcome posthoc_oracles() {
  Checks c;
  // Eight-word inputs scored by a fixed random model over the planted vocabulary.
  const auto records = planted_corpus();
  const auto vocab = Vocabulary::build(records, 1);
  EncoderConfig e;
  e.vocab_size = vocab.size();
  e.d_model = 16;
  e.n_layers = 1;
  e.n_heads = 2;
  e.d_ff = 32;
  const auto model = GuardrailModel::initialize(e, 3);
  const auto box = model_blackbox(model, vocab);
  double worst = 0.0;
  std::size_t inputs = 0;
  for (const auto& r : records) {
    auto words = split_words(r.text);
    if (words.size() < 8) continue;
    words.resize(8);
    ShapleyOptions exact;
    ShapleyOptions perm;
    perm.mode = ShapleyOptions::Mode::kPermutation;
    perm.n_permutations = 2000;
    perm.seed = inputs;
    const auto a = shapley_explain(words, {}, box, exact);
    const auto b = shapley_explain(words, {}, box, perm);
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    if (++inputs == 5) break;
  }
  c.expect(inputs == 5, "five 8-word inputs");
  c.expect(worst < 0.02, "permutation within 0.02 of exact");

  const std::vector<std::string> words = {"tell", "me", "how", "to", "hack", "a", "phone"};
  const Blackbox oracle = [](std::span<const std::string> ws) {
    return sigmoid(std::find(ws.begin(), ws.end(), "hack") != ws.end() ? 3.0 : -3.0);
  };
  std::size_t wins = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    LimeOptions options;
    options.seed = seed;
    const auto w = lime_explain(words, oracle, options);
    const auto top = std::max_element(w.begin(), w.end()) - w.begin();
    if (top == 4 && w[4] > 0.0) ++wins;
  }
  c.expect(wins == 10, "LIME ranks the oracle word first for every seed");
  return c.outcome("Shapley max error " + fmt(worst, 5) + ", LIME " + std::to_string(wins) +
                   "/10 seeds");
}

Outcome overlap_tooling() {
  Checks c;
  const auto records = planted_corpus();
  for (auto n : {NGram::kUnigram, NGram::kBigram}) {
    const auto h = lexical_overlap(records, records, n, true);
    c.near(h.percent[9], 100.0, 1e-9, std::string(to_string(n)) + " self-overlap top bucket");
  }
  PromptRecord a, b;
  a.text = "alpha beta gamma";
  b.text = "beta gamma delta";
  const std::vector<PromptRecord> train = {a};
  const std::vector<PromptRecord> test = {b};
  const auto half = lexical_overlap(train, test, NGram::kUnigram, true);
  c.near(half.max_similarity.at(0), 0.5, 1e-12, "hand-computed Jaccard");
  c.expect(half.counts[5] == 1, "0.5 lands in [0.5, 0.6)");
  const std::span<const PromptRecord> all(records);
  for (auto n : {NGram::kUnigram, NGram::kBigram}) {
    const auto h = lexical_overlap(all.subspan(0, 150), all.subspan(150), n, true);
    c.near(std::accumulate(h.percent.begin(), h.percent.end(), 0.0), 100.0, 0.1,
           std::string(to_string(n)) + " percentages sum");
  }
  return c.outcome();
}

fs::path golden(const std::string& name) { return fs::path(LEXGUARD_GOLDEN_DIR) / name; }

Outcome interface_contract() {
  if (!workspace().trained) return {false, "needs the A3 model"};
  Checks c;
  const auto model = workspace().model.string();
  struct Case {
    std::string_view text;
    bool merge;
    std::string golden;
  };
  const std::vector<Case> cases = {{kCanonical, false, "check_unsafe.json"},
                                   {kCanonical, true, "check_unsafe_merged.json"},
                                   {kBenign, false, "check_safe.json"}};

  ServeSection settings;
  settings.port = 0;
  GuardServer server(load_checkpoint(workspace().model), settings);
  const int port = server.bind();
  std::thread thread([&] { server.listen(); });
  while (!server.is_running()) std::this_thread::yield();
  httplib::Client client("127.0.0.1", port);

  for (const auto& k : cases) {
    std::vector<std::string> args = {"check", "--model", model, "--text", std::string(k.text)};
    if (k.merge) args.push_back("--merge-phrases");
    std::string out;
    c.expect(cli(args, &out) == 0, k.golden + ": CLI exit 0");
    const auto want = read_or_empty(golden(k.golden));
    c.expect(!want.empty() && out == want, k.golden + ": CLI byte-exact");

    json body = {{"text", k.text}};
    if (k.merge) body["merge_phrases"] = true;
    const auto res = client.Post("/v1/check", body.dump(), "application/json");
    c.expect(res && res->status == 200, k.golden + ": HTTP 200");
    c.expect(res && res->body + "\n" == want, k.golden + ": HTTP byte-exact");
    if (res) {
      const auto j = nlohmann::ordered_json::parse(res->body);
      std::vector<std::string> keys;
      for (const auto& [key, _] : j.items()) keys.push_back(key);
      c.expect(keys == std::vector<std::string>{"safety_label", "explanation"},
               k.golden + ": key set");
    }
  }
  std::string out;
  cli({"check", "--model", model, "--text", std::string(kCanonical), "--verbose"}, &out);
  const auto verbose = nlohmann::ordered_json::parse(out);
  std::vector<std::string> keys;
  for (const auto& [key, _] : verbose.items()) keys.push_back(key);
  c.expect(keys == std::vector<std::string>{"safety_label", "explanation", "scores",
                                            "prompt_score"},
           "verbose key set");
  server.stop();
  thread.join();
  return c.outcome(std::to_string(cases.size()) + " goldens over CLI and HTTP");
}

Outcome determinism() {
  if (!workspace().trained) return {false, "needs the A3 model"};
  auto& ws = workspace();
  Checks c;
  const auto model2 = ws.dir / "model2.ckpt";
  const auto report2 = ws.dir / "train_report2.json";
  c.expect(cli(train_args(model2, report2)) == 0, "second training run");
  c.expect(testing::read_file(ws.model) == read_or_empty(model2), "checkpoints identical");
  c.expect(testing::read_file(ws.report) == read_or_empty(report2), "train reports identical");

  auto twice = [&](const std::string& name, std::vector<std::string> args,
                   const std::string& output_flag) {
    std::string first, second;
    for (std::string* dest : {&first, &second}) {
      auto a = args;
      const auto path = ws.dir / (name + (dest == &first ? ".1" : ".2"));
      a.push_back(output_flag);
      a.push_back(path.string());
      c.expect(cli(a) == 0, name + " run");
      *dest = read_or_empty(path);
    }
    c.expect(!first.empty() && first == second, name + " outputs identical");
  };
  const auto corpus = ws.corpus.string();
  const auto model = ws.model.string();
  twice("eval", {"eval", "--model", model, "--data", corpus, "--grouped"}, "--output");
  twice("faithfulness", {"faithfulness", "--model", model, "--data", corpus}, "--output");
  twice("label",
        {"label", "--input", corpus, "--client", "mock", "--lexicon", ws.lexicon.string(),
         "--bias-rate", "0.3", "--max-in-flight", "1"},
        "--output");
  return c.outcome("train, eval, faithfulness and label re-runs");
}

}  // namespace
}  // namespace lexguard::acceptance

int main() {
  using namespace lexguard::acceptance;
  const std::vector<Criterion> criteria = {
      {"A1", "formula fidelity", "abs 1e-6", 10, formula_fidelity},
      {"A2", "gradient correctness", "rel 1e-3", 120, gradient_correctness},
      {"A3", "planted-corpus learning", "F1 >= 0.95", 300, planted_learning},
      {"A4", "faithfulness direction", "strict at k=1", 60, faithfulness_direction},
      {"A5", "labeling gate", "exact", 60, labeling_gate},
      {"A6", "ablation equivalence", "abs 1e-6", 60, ablation_equivalence},
      {"A7", "post-hoc oracles", "abs 0.02", 120, posthoc_oracles},
      {"A8", "overlap tooling", "sum 100 +- 0.1", 60, overlap_tooling},
      {"A9", "interface contract", "byte-exact", 60, interface_contract},
      {"A10", "determinism", "byte-exact", 600, determinism},
  };
  int failed = 0;
  for (const auto& crit : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = crit.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < crit.budget_seconds;
    const bool pass = outcome.pass && in_time;
    if (!pass) ++failed;
    std::printf("%-3s %s  %-24s [%s]  %.2fs / %.0fs%s  %s\n", crit.id.c_str(),
                pass ? "PASS" : "FAIL", crit.name.c_str(), crit.tolerance.c_str(), seconds,
                crit.budget_seconds, in_time ? "" : " (over budget)", outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
