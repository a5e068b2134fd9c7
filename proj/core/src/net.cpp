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

#include "lexguard/net.hpp"

#include <cmath>
#include <numbers>

namespace lexguard {

namespace {

constexpr double kLayerNormEps = 1e-5;

void layer_norm(const Matrix& x, const Matrix& gain, const Matrix& bias,
                Matrix& norm, std::vector<double>& rstd, Matrix& out) {
  const std::size_t d = x.cols();
  norm = Matrix(x.rows(), d);
  out = Matrix(x.rows(), d);
  rstd.assign(x.rows(), 0.0);
  for (std::size_t t = 0; t < x.rows(); ++t) {
    const auto row = x.row(t);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (double v : row) var += (v - mean) * (v - mean);
    var /= static_cast<double>(d);
    rstd[t] = 1.0 / std::sqrt(var + kLayerNormEps);
    for (std::size_t c = 0; c < d; ++c) {
      norm(t, c) = (row[c] - mean) * rstd[t];
      out(t, c) = gain(0, c) * norm(t, c) + bias(0, c);
    }
  }
}

// dx += d(layer_norm)/dx applied to `dout`.
void layer_norm_backward(const Matrix& dout, const Matrix& norm,
                         const std::vector<double>& rstd, const Matrix& gain,
                         Matrix& dgain, Matrix& dbias, Matrix& dx) {
  const std::size_t d = dout.cols();
  std::vector<double> dnorm(d);
  for (std::size_t t = 0; t < dout.rows(); ++t) {
    double mean_dnorm = 0.0;
    double mean_dnorm_norm = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      dgain(0, c) += dout(t, c) * norm(t, c);
      dbias(0, c) += dout(t, c);
      dnorm[c] = dout(t, c) * gain(0, c);
      mean_dnorm += dnorm[c];
      mean_dnorm_norm += dnorm[c] * norm(t, c);
    }
    mean_dnorm /= static_cast<double>(d);
    mean_dnorm_norm /= static_cast<double>(d);
    for (std::size_t c = 0; c < d; ++c) {
      dx(t, c) += rstd[t] * (dnorm[c] - mean_dnorm - norm(t, c) * mean_dnorm_norm);
    }
  }
}

double gelu(double u) { return 0.5 * u * (1.0 + std::erf(u / std::numbers::sqrt2)); }

double gelu_grad(double u) {
  const double cdf = 0.5 * (1.0 + std::erf(u / std::numbers::sqrt2));
  const double pdf = std::exp(-0.5 * u * u) * std::numbers::inv_sqrtpi / std::numbers::sqrt2;
  return cdf + u * pdf;
}

// Inverted-dropout mask (entries 0 or 1/(1-rate)); empty when inactive.
Matrix dropout_mask(std::size_t rows, std::size_t cols, double rate,
                    std::mt19937_64* rng) {
  if (rng == nullptr || rate <= 0.0) return {};
  Matrix mask(rows, cols);
  std::bernoulli_distribution keep(1.0 - rate);
  const double scale = 1.0 / (1.0 - rate);
  for (double& v : mask.values()) v = keep(*rng) ? scale : 0.0;
  return mask;
}

void apply_mask(Matrix& m, const Matrix& mask) {
  if (mask.size() == 0) return;
  auto values = m.values();
  const auto factors = mask.values();
  for (std::size_t i = 0; i < values.size(); ++i) values[i] *= factors[i];
}

bool is_pad(const PadMask& pad, std::size_t t) { return !pad.empty() && pad[t]; }

void check_inputs(const GuardrailModel& model, std::span<const TokenId> ids,
                  const PadMask& pad) {
  const auto& config = model.config();
  if (ids.empty()) throw Error("empty token sequence");
  if (ids.size() > config.max_len) {
    throw Error("sequence length " + std::to_string(ids.size()) +
                " exceeds max_len " + std::to_string(config.max_len));
  }
  if (!pad.empty() && pad.size() != ids.size()) throw Error("pad mask length mismatch");
  bool any_real = false;
  for (std::size_t t = 0; t < ids.size(); ++t) {
    if (ids[t] >= config.vocab_size) throw Error("token id out of range");
    any_real = any_real || !is_pad(pad, t);
  }
  if (!any_real) throw Error("sequence is entirely padding");
}

Matrix encode(const GuardrailModel& model, std::span<const TokenId> ids,
              const PadMask& pad, std::mt19937_64* rng, ForwardTrace& trace) {
  const auto& config = model.config();
  const auto& params = model.params();
  const std::size_t T = ids.size();
  const std::size_t d = config.d_model;
  const std::size_t heads = config.n_heads;
  const std::size_t dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  Matrix x(T, d);
  for (std::size_t t = 0; t < T; ++t) {
    const auto tok = params.token_embedding.row(ids[t]);
    const auto pos = params.position_embedding.row(t);
    for (std::size_t c = 0; c < d; ++c) x(t, c) = tok[c] + pos[c];
  }

  trace.layers.resize(config.n_layers);
  for (std::size_t l = 0; l < config.n_layers; ++l) {
    const auto& p = params.layers[l];
    auto& tr = trace.layers[l];
    tr.input = x;
    layer_norm(x, p.ln1_gain, p.ln1_bias, tr.ln1_norm, tr.ln1_rstd, tr.ln1_out);

    tr.query = matmul(tr.ln1_out, p.query_w);
    add_row_vector(tr.query, p.query_b);
    tr.key = matmul(tr.ln1_out, p.key_w);
    add_row_vector(tr.key, p.key_b);
    tr.value = matmul(tr.ln1_out, p.value_w);
    add_row_vector(tr.value, p.value_b);

    tr.context = Matrix(T, d);
    tr.attn.assign(heads, Matrix(T, T));
    std::vector<double> scores(T);
    for (std::size_t h = 0; h < heads; ++h) {
      const std::size_t off = h * dh;
      auto& attn = tr.attn[h];
      for (std::size_t i = 0; i < T; ++i) {
        double top = -INFINITY;
        for (std::size_t j = 0; j < T; ++j) {
          if (is_pad(pad, j)) continue;
          double s = 0.0;
          for (std::size_t c = 0; c < dh; ++c) s += tr.query(i, off + c) * tr.key(j, off + c);
          scores[j] = s * scale;
          top = std::max(top, scores[j]);
        }
        double total = 0.0;
        for (std::size_t j = 0; j < T; ++j) {
          if (is_pad(pad, j)) continue;
          attn(i, j) = std::exp(scores[j] - top);
          total += attn(i, j);
        }
        for (std::size_t j = 0; j < T; ++j) {
          if (is_pad(pad, j)) continue;
          attn(i, j) /= total;
          for (std::size_t c = 0; c < dh; ++c) {
            tr.context(i, off + c) += attn(i, j) * tr.value(j, off + c);
          }
        }
      }
    }

    Matrix attn_out = matmul(tr.context, p.out_w);
    add_row_vector(attn_out, p.out_b);
    tr.attn_drop = dropout_mask(T, d, config.dropout, rng);
    apply_mask(attn_out, tr.attn_drop);
    tr.mid = x;
    for (std::size_t i = 0; i < x.size(); ++i) tr.mid.values()[i] += attn_out.values()[i];

    layer_norm(tr.mid, p.ln2_gain, p.ln2_bias, tr.ln2_norm, tr.ln2_rstd, tr.ln2_out);
    tr.ff_pre = matmul(tr.ln2_out, p.ff_in_w);
    add_row_vector(tr.ff_pre, p.ff_in_b);
    tr.ff_act = tr.ff_pre;
    for (double& v : tr.ff_act.values()) v = gelu(v);
    Matrix ff_out = matmul(tr.ff_act, p.ff_out_w);
    add_row_vector(ff_out, p.ff_out_b);
    tr.ff_drop = dropout_mask(T, d, config.dropout, rng);
    apply_mask(ff_out, tr.ff_drop);

    x = tr.mid;
    for (std::size_t i = 0; i < x.size(); ++i) x.values()[i] += ff_out.values()[i];
  }
  return x;
}

void check_finite(const ForwardOutput& out) {
  auto finite = [](std::span<const double> v) {
    for (double x : v) {
      if (!std::isfinite(x)) return false;
    }
    return true;
  };
  if (!finite(out.prompt_probs) || !finite(out.token_probs.values()) ||
      !finite(out.attention) || !finite(out.hidden.values())) {
    throw Error("non-finite value in model output");
  }
}

}  // namespace

void EncoderConfig::validate() const {
  if (vocab_size < Vocabulary::kNumReserved) throw Error("vocab_size too small");
  if (d_model == 0 || n_heads == 0 || d_ff == 0 || max_len == 0) {
    throw Error("encoder sizes must be positive");
  }
  if (d_model % n_heads != 0) throw Error("d_model must be divisible by n_heads");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw Error("dropout must lie in [0, 1)");
}

nlohmann::json EncoderConfig::to_json() const {
  return {{"vocab_size", vocab_size}, {"d_model", d_model}, {"n_layers", n_layers},
          {"n_heads", n_heads},       {"d_ff", d_ff},       {"max_len", max_len},
          {"dropout", dropout}};
}

EncoderConfig EncoderConfig::from_json(const nlohmann::json& j) {
  EncoderConfig config;
  config.vocab_size = j.at("vocab_size").get<std::size_t>();
  config.d_model = j.at("d_model").get<std::size_t>();
  config.n_layers = j.at("n_layers").get<std::size_t>();
  config.n_heads = j.at("n_heads").get<std::size_t>();
  config.d_ff = j.at("d_ff").get<std::size_t>();
  config.max_len = j.at("max_len").get<std::size_t>();
  config.dropout = j.at("dropout").get<double>();
  return config;
}

ParameterSet ParameterSet::zeros(const EncoderConfig& config) {
  const std::size_t d = config.d_model;
  const std::size_t f = config.d_ff;
  ParameterSet p;
  p.token_embedding = Matrix(config.vocab_size, d);
  p.position_embedding = Matrix(config.max_len, d);
  p.layers.resize(config.n_layers);
  for (auto& layer : p.layers) {
    layer.ln1_gain = Matrix(1, d);
    layer.ln1_bias = Matrix(1, d);
    layer.query_w = Matrix(d, d);
    layer.query_b = Matrix(1, d);
    layer.key_w = Matrix(d, d);
    layer.key_b = Matrix(1, d);
    layer.value_w = Matrix(d, d);
    layer.value_b = Matrix(1, d);
    layer.out_w = Matrix(d, d);
    layer.out_b = Matrix(1, d);
    layer.ln2_gain = Matrix(1, d);
    layer.ln2_bias = Matrix(1, d);
    layer.ff_in_w = Matrix(d, f);
    layer.ff_in_b = Matrix(1, f);
    layer.ff_out_w = Matrix(f, d);
    layer.ff_out_b = Matrix(1, d);
  }
  p.pool_w = Matrix(1, d);
  p.pool_b = Matrix(1, 1);
  p.prompt_w = Matrix(kNumClasses, d);
  p.prompt_b = Matrix(1, kNumClasses);
  p.token_w = Matrix(kNumClasses, d);
  p.token_b = Matrix(1, kNumClasses);
  p.log_variance = Matrix(1, 2);
  return p;
}

std::size_t ParameterSet::count() const {
  std::size_t n = 0;
  for_each([&n](const std::string&, const Matrix& m) { n += m.size(); });
  return n;
}

bool ParameterSet::all_finite() const {
  bool ok = true;
  for_each([&ok](const std::string&, const Matrix& m) {
    for (double v : m.values()) ok = ok && std::isfinite(v);
  });
  return ok;
}

void round_to_float(ParameterSet& params) {
  params.for_each([](const std::string&, Matrix& m) {
    for (double& v : m.values()) v = static_cast<double>(static_cast<float>(v));
  });
}

GuardrailModel::GuardrailModel(EncoderConfig config, ParameterSet params)
    : config_(config), params_(std::move(params)) {
  config_.validate();
  const auto expected = ParameterSet::zeros(config_);
  std::vector<std::pair<std::size_t, std::size_t>> shapes;
  expected.for_each([&shapes](const std::string&, const Matrix& m) {
    shapes.emplace_back(m.rows(), m.cols());
  });
  std::size_t i = 0;
  bool ok = params_.layers.size() == config_.n_layers;
  if (ok) {
    params_.for_each([&](const std::string&, const Matrix& m) {
      ok = ok && i < shapes.size() && shapes[i] == std::pair{m.rows(), m.cols()};
      ++i;
    });
  }
  if (!ok || i != shapes.size()) throw Error("parameter shapes do not match config");
}

GuardrailModel GuardrailModel::initialize(const EncoderConfig& config,
                                          std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  auto params = ParameterSet::zeros(config);
  std::normal_distribution<double> embed(0.0, 0.1);
  auto xavier = [&rng](Matrix& m, std::size_t fan_in, std::size_t fan_out) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& v : m.values()) v = dist(rng);
  };
  for (double& v : params.token_embedding.values()) v = embed(rng);
  for (double& v : params.position_embedding.values()) v = embed(rng);
  const std::size_t d = config.d_model;
  for (auto& layer : params.layers) {
    layer.ln1_gain.fill(1.0);
    layer.ln2_gain.fill(1.0);
    xavier(layer.query_w, d, d);
    xavier(layer.key_w, d, d);
    xavier(layer.value_w, d, d);
    xavier(layer.out_w, d, d);
    xavier(layer.ff_in_w, d, config.d_ff);
    xavier(layer.ff_out_w, config.d_ff, d);
  }
  xavier(params.pool_w, d, 1);
  xavier(params.prompt_w, d, kNumClasses);
  xavier(params.token_w, d, kNumClasses);
  round_to_float(params);
  return GuardrailModel(config, std::move(params));
}

double GuardrailModel::sigma(std::size_t task) const {
  return std::exp(0.5 * params_.log_variance(0, task));
}

std::size_t count_params(const GuardrailModel& model) { return model.params().count(); }

ForwardOutput apply_heads(const GuardrailModel& model, const Matrix& hidden,
                          const PadMask& pad) {
  const auto& p = model.params();
  const std::size_t T = hidden.rows();
  const std::size_t d = hidden.cols();
  if (!pad.empty() && pad.size() != T) throw Error("pad mask length mismatch");

  ForwardOutput out;
  out.hidden = hidden;
  out.attention.assign(T, 0.0);
  double top = -INFINITY;
  for (std::size_t t = 0; t < T; ++t) {
    if (is_pad(pad, t)) continue;
    out.attention[t] = dot(p.pool_w.row(0), hidden.row(t)) + p.pool_b(0, 0);
    top = std::max(top, out.attention[t]);
  }
  if (top == -INFINITY) throw Error("sequence is entirely padding");
  double total = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    if (is_pad(pad, t)) continue;
    out.attention[t] = std::exp(out.attention[t] - top);
    total += out.attention[t];
  }
  out.pooled.assign(d, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    if (is_pad(pad, t)) continue;
    out.attention[t] /= total;
    for (std::size_t c = 0; c < d; ++c) out.pooled[c] += out.attention[t] * hidden(t, c);
  }

  for (std::size_t k = 0; k < kNumClasses; ++k) {
    out.prompt_probs[k] = dot(p.prompt_w.row(k), out.pooled) + p.prompt_b(0, k);
  }
  softmax_inplace(out.prompt_probs);

  out.token_probs = Matrix(T, kNumClasses);
  for (std::size_t t = 0; t < T; ++t) {
    auto row = out.token_probs.row(t);
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      row[k] = dot(p.token_w.row(k), hidden.row(t)) + p.token_b(0, k);
    }
    softmax_inplace(row);
  }
  check_finite(out);
  return out;
}

ForwardOutput forward_train(const GuardrailModel& model, std::span<const TokenId> ids,
                            const PadMask& pad, std::mt19937_64* dropout_rng,
                            ForwardTrace& trace) {
  check_inputs(model, ids, pad);
  trace.ids.assign(ids.begin(), ids.end());
  trace.pad = pad;
  const Matrix hidden = encode(model, ids, pad, dropout_rng, trace);
  trace.output = apply_heads(model, hidden, pad);
  return trace.output;
}

ForwardOutput forward(const GuardrailModel& model, std::span<const TokenId> ids,
                      const PadMask& pad) {
  ForwardTrace trace;
  return forward_train(model, ids, pad, nullptr, trace);
}

void backward(const GuardrailModel& model, const ForwardTrace& trace,
              const LogitGradients& upstream, ParameterSet& grads) {
  const auto& config = model.config();
  const auto& p = model.params();
  const auto& out = trace.output;
  const auto& pad = trace.pad;
  const std::size_t T = out.hidden.rows();
  const std::size_t d = config.d_model;
  const std::size_t heads = config.n_heads;
  const std::size_t dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  Matrix dh_mat(T, d);

  // Prompt head.
  std::vector<double> dpooled(d, 0.0);
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const double g = upstream.prompt[k];
    grads.prompt_b(0, k) += g;
    for (std::size_t c = 0; c < d; ++c) {
      grads.prompt_w(k, c) += g * out.pooled[c];
      dpooled[c] += g * p.prompt_w(k, c);
    }
  }

  // Token head.
  if (upstream.token.rows() != 0) {
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t k = 0; k < kNumClasses; ++k) {
        const double g = upstream.token(t, k);
        if (g == 0.0) continue;
        grads.token_b(0, k) += g;
        for (std::size_t c = 0; c < d; ++c) {
          grads.token_w(k, c) += g * out.hidden(t, c);
          dh_mat(t, c) += g * p.token_w(k, c);
        }
      }
    }
  }

  // Attention pooling.
  std::vector<double> dalpha(T, 0.0);
  double weighted = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    if (is_pad(pad, t)) continue;
    dalpha[t] = dot(out.hidden.row(t), dpooled);
    weighted += out.attention[t] * dalpha[t];
    for (std::size_t c = 0; c < d; ++c) dh_mat(t, c) += out.attention[t] * dpooled[c];
  }
  for (std::size_t t = 0; t < T; ++t) {
    if (is_pad(pad, t)) continue;
    const double de = out.attention[t] * (dalpha[t] - weighted);
    grads.pool_b(0, 0) += de;
    for (std::size_t c = 0; c < d; ++c) {
      grads.pool_w(0, c) += de * out.hidden(t, c);
      dh_mat(t, c) += de * p.pool_w(0, c);
    }
  }

  // Encoder blocks, last to first. dh_mat holds d(loss)/d(block output).
  for (std::size_t l = config.n_layers; l-- > 0;) {
    const auto& w = p.layers[l];
    auto& g = grads.layers[l];
    const auto& tr = trace.layers[l];

    Matrix dmid = dh_mat;
    Matrix dff = dh_mat;
    apply_mask(dff, tr.ff_drop);
    accumulate_transposed_product(tr.ff_act, dff, g.ff_out_w);
    accumulate_column_sums(dff, g.ff_out_b);
    Matrix dact = matmul_transposed(dff, w.ff_out_w);
    for (std::size_t i = 0; i < dact.size(); ++i) {
      dact.values()[i] *= gelu_grad(tr.ff_pre.values()[i]);
    }
    accumulate_transposed_product(tr.ln2_out, dact, g.ff_in_w);
    accumulate_column_sums(dact, g.ff_in_b);
    const Matrix dln2 = matmul_transposed(dact, w.ff_in_w);
    layer_norm_backward(dln2, tr.ln2_norm, tr.ln2_rstd, w.ln2_gain, g.ln2_gain,
                        g.ln2_bias, dmid);

    Matrix dx = dmid;
    Matrix dattn_out = dmid;
    apply_mask(dattn_out, tr.attn_drop);
    accumulate_transposed_product(tr.context, dattn_out, g.out_w);
    accumulate_column_sums(dattn_out, g.out_b);
    const Matrix dcontext = matmul_transposed(dattn_out, w.out_w);

    Matrix dq(T, d);
    Matrix dk(T, d);
    Matrix dv(T, d);
    std::vector<double> da(T);
    for (std::size_t h = 0; h < heads; ++h) {
      const std::size_t off = h * dh;
      const auto& attn = tr.attn[h];
      for (std::size_t i = 0; i < T; ++i) {
        double weighted_da = 0.0;
        for (std::size_t j = 0; j < T; ++j) {
          if (is_pad(pad, j)) continue;
          double s = 0.0;
          for (std::size_t c = 0; c < dh; ++c) {
            s += dcontext(i, off + c) * tr.value(j, off + c);
            dv(j, off + c) += attn(i, j) * dcontext(i, off + c);
          }
          da[j] = s;
          weighted_da += attn(i, j) * s;
        }
        for (std::size_t j = 0; j < T; ++j) {
          if (is_pad(pad, j)) continue;
          const double ds = attn(i, j) * (da[j] - weighted_da) * scale;
          for (std::size_t c = 0; c < dh; ++c) {
            dq(i, off + c) += ds * tr.key(j, off + c);
            dk(j, off + c) += ds * tr.query(i, off + c);
          }
        }
      }
    }
    accumulate_transposed_product(tr.ln1_out, dq, g.query_w);
    accumulate_column_sums(dq, g.query_b);
    accumulate_transposed_product(tr.ln1_out, dk, g.key_w);
    accumulate_column_sums(dk, g.key_b);
    accumulate_transposed_product(tr.ln1_out, dv, g.value_w);
    accumulate_column_sums(dv, g.value_b);
    Matrix dln1 = matmul_transposed(dq, w.query_w);
    const Matrix dln1_k = matmul_transposed(dk, w.key_w);
    const Matrix dln1_v = matmul_transposed(dv, w.value_w);
    for (std::size_t i = 0; i < dln1.size(); ++i) {
      dln1.values()[i] += dln1_k.values()[i] + dln1_v.values()[i];
    }
    layer_norm_backward(dln1, tr.ln1_norm, tr.ln1_rstd, w.ln1_gain, g.ln1_gain,
                        g.ln1_bias, dx);
    dh_mat = std::move(dx);
  }

  for (std::size_t t = 0; t < T; ++t) {
    auto tok = grads.token_embedding.row(trace.ids[t]);
    auto pos = grads.position_embedding.row(t);
    for (std::size_t c = 0; c < d; ++c) {
      tok[c] += dh_mat(t, c);
      pos[c] += dh_mat(t, c);
    }
  }
}

WordScores score_words(const GuardrailModel& model, const Tokenized& tokens) {
  const auto out = forward(model, tokens.token_ids);
  WordScores scores;
  scores.words = tokens.words;
  scores.prompt_unsafe = out.prompt_unsafe();
  scores.unsafe.reserve(tokens.word_spans.size());
  for (const auto& span : tokens.word_spans) {
    double best = 0.0;
    for (std::size_t t = span.begin; t < span.end; ++t) {
      best = std::max(best, out.token_unsafe(t));
    }
    scores.unsafe.push_back(best);
  }
  return scores;
}

Verdict predict(const GuardrailModel& model, const Tokenized& tokens, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error("threshold must lie in (0, 1)");
  }
  if (tokens.num_tokens() == 0) throw DataError("empty text");
  auto scores = score_words(model, tokens);
  Verdict verdict;
  verdict.prompt_score = scores.prompt_unsafe;
  verdict.safety_label =
      scores.prompt_unsafe >= threshold ? Label::kUnsafe : Label::kSafe;
  if (verdict.safety_label == Label::kUnsafe) {
    for (std::size_t w = 0; w < scores.words.size(); ++w) {
      if (scores.unsafe[w] >= 0.5) {
        verdict.explanation.push_back(scores.words[w]);
        verdict.explanation_positions.push_back(w);
      }
    }
  }
  verdict.words = std::move(scores.words);
  verdict.word_scores = std::move(scores.unsafe);
  return verdict;
}

Verdict predict(const GuardrailModel& model, const Vocabulary& vocab,
                std::string_view text, double threshold) {
  auto tokens = tokenize(text, vocab);
  truncate(tokens, model.config().max_len);
  return predict(model, tokens, threshold);
}

}  // namespace lexguard
