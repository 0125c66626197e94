// SPDX-License-Identifier: Apache-2.0
//
// Straight-line reference implementations of the STAM and STAM-Lite forward
// passes: scalar loops over raw parameter arrays, no graph machinery, softmax
// written directly as exp(e)/sum(exp). Kept deliberately independent of the
// library's compute path so the two can check each other.
#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "stam/models/model.hpp"

namespace oracle {

using stam::SequenceModel;
using stam::Tensor;

class ParamView {
 public:
  explicit ParamView(const SequenceModel& model) {
    for (const auto& p : model.params()) by_name_[p.name] = p.tensor;
  }
  const Tensor& operator()(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw std::runtime_error("oracle: no parameter " + name);
    return *it->second;
  }

 private:
  std::map<std::string, const Tensor*> by_name_;
};

using Vec = std::vector<double>;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline Vec affine(const Tensor& W, const Tensor& b, const Vec& x) {
  Vec y(static_cast<size_t>(W.shape.rows()));
  for (int r = 0; r < W.shape.rows(); ++r) {
    double acc = b.values[static_cast<size_t>(r)];
    for (int c = 0; c < W.shape.cols(); ++c) acc += W.at(r, c) * x[static_cast<size_t>(c)];
    y[static_cast<size_t>(r)] = acc;
  }
  return y;
}

inline Vec relu_vec(Vec v) {
  for (double& x : v) x = x > 0.0 ? x : 0.0;
  return v;
}

inline Vec concat(const Vec& a, const Vec& b) {
  Vec out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

inline Vec softmax_plain(const Vec& e) {
  Vec out(e.size());
  double denom = 0.0;
  for (double v : e) denom += std::exp(v);
  for (size_t i = 0; i < e.size(); ++i) out[i] = std::exp(e[i]) / denom;
  return out;
}

struct LstmRef {
  const Tensor *W_f, *W_i, *W_o, *W_g, *b_f, *b_i, *b_o, *b_g;
  LstmRef(const ParamView& p, const std::string& name)
      : W_f(&p(name + ".W_f")), W_i(&p(name + ".W_i")), W_o(&p(name + ".W_o")),
        W_g(&p(name + ".W_g")), b_f(&p(name + ".b_f")), b_i(&p(name + ".b_i")),
        b_o(&p(name + ".b_o")), b_g(&p(name + ".b_g")) {}

  void step(Vec& h, Vec& c, const Vec& x) const {
    const Vec z = concat(x, h);
    const size_t state = h.size();
    Vec f = affine(*W_f, *b_f, z), i = affine(*W_i, *b_i, z);
    Vec o = affine(*W_o, *b_o, z), g = affine(*W_g, *b_g, z);
    for (size_t k = 0; k < state; ++k) {
      f[k] = sigmoid(f[k]);
      i[k] = sigmoid(i[k]);
      o[k] = sigmoid(o[k]);
      g[k] = std::tanh(g[k]);
      c[k] = f[k] * c[k] + i[k] * g[k];
      h[k] = o[k] * std::tanh(c[k]);
    }
  }
};

struct ForwardRef {
  Vec y;                        // Ty predictions
  std::vector<Vec> beta;        // Ty rows of N spatial weights
  std::vector<Vec> alpha;       // Ty rows of Tx temporal weights
};

// Shared pieces: per-variable embeddings and the two-layer encoder sequence.
inline std::vector<Vec> embeddings(const ParamView& p, const stam::ModelConfig& cfg,
                                   const Tensor& X) {
  std::vector<Vec> d;
  for (int i = 0; i < cfg.n_vars; ++i) {
    Vec xi(static_cast<size_t>(cfg.input_len));
    for (int t = 0; t < cfg.input_len; ++t) xi[static_cast<size_t>(t)] = X.at(i, t);
    const std::string name =
        cfg.per_var_embed ? "var_embedder." + std::to_string(i) : "spatial_embedder";
    d.push_back(relu_vec(affine(p(name + ".W"), p(name + ".b"), xi)));
  }
  return d;
}

inline std::vector<Vec> encode(const ParamView& p, const stam::ModelConfig& cfg, const Tensor& X) {
  const LstmRef l1(p, "encoder_l1"), l2(p, "encoder_l2");
  Vec h1(static_cast<size_t>(cfg.enc_dim), 0.0), c1 = h1, h2 = h1, c2 = h1;
  std::vector<Vec> H;
  for (int t = 0; t < cfg.input_len; ++t) {
    Vec xt(static_cast<size_t>(cfg.n_vars));
    for (int i = 0; i < cfg.n_vars; ++i) xt[static_cast<size_t>(i)] = X.at(i, t);
    l1.step(h1, c1, xt);
    l2.step(h2, c2, h1);
    H.push_back(h2);
  }
  return H;
}

// relu alignment energy over [query ; key], then plain softmax weights.
inline Vec attention_weights(const Tensor& W, const Tensor& b, const Vec& query,
                             const std::vector<Vec>& keys) {
  Vec e(keys.size());
  for (size_t k = 0; k < keys.size(); ++k) {
    const Vec in = concat(query, keys[k]);
    double acc = b.values[0];
    for (size_t j = 0; j < in.size(); ++j) acc += W.values[j] * in[j];
    e[k] = acc > 0.0 ? acc : 0.0;
  }
  return softmax_plain(e);
}

inline Vec weighted_sum(const Vec& w, const std::vector<Vec>& keys) {
  Vec out(keys[0].size(), 0.0);
  for (size_t k = 0; k < keys.size(); ++k)
    for (size_t j = 0; j < out.size(); ++j) out[j] += w[k] * keys[k][j];
  return out;
}

/// Dual-decoder forward: spatial attention queried by the G decoder state,
/// temporal by the S decoder state, contexts reduced, both LSTMs stepped,
/// prediction off the concatenated states, previous prediction fed back.
inline ForwardRef stam_forward(const SequenceModel& model, const Tensor& X) {
  const ParamView p(model);
  const stam::ModelConfig& cfg = model.config();
  const std::vector<Vec> d = embeddings(p, cfg, X);
  const std::vector<Vec> H = encode(p, cfg, X);
  const LstmRef dec_g(p, "dec_g"), dec_s(p, "dec_s");
  Vec h_g(static_cast<size_t>(cfg.dec_dim), 0.0), c_g = h_g, h_s = h_g, c_s = h_g;
  double y_prev = 0.0;
  ForwardRef out;
  for (int j = 0; j < cfg.output_len; ++j) {
    const Vec beta = attention_weights(p("spatial_align.W"), p("spatial_align.b"), h_g, d);
    const Vec g_ctx = weighted_sum(beta, d);
    const Vec alpha = attention_weights(p("temporal_align.W"), p("temporal_align.b"), h_s, H);
    const Vec s_ctx = weighted_sum(alpha, H);
    Vec r_g = relu_vec(affine(p("reduce_g.W"), p("reduce_g.b"), g_ctx));
    r_g.push_back(y_prev);
    Vec r_s = relu_vec(affine(p("reduce_s.W"), p("reduce_s.b"), s_ctx));
    r_s.push_back(y_prev);
    dec_g.step(h_g, c_g, r_g);
    dec_s.step(h_s, c_s, r_s);
    const Vec joint = concat(h_g, h_s);
    const double y = affine(p("head.W"), p("head.b"), joint)[0];
    out.y.push_back(y);
    out.beta.push_back(beta);
    out.alpha.push_back(alpha);
    y_prev = y;
  }
  return out;
}

/// Single-decoder forward: both attentions queried by the one decoder state,
/// contexts concatenated then reduced once.
inline ForwardRef stam_lite_forward(const SequenceModel& model, const Tensor& X) {
  const ParamView p(model);
  const stam::ModelConfig& cfg = model.config();
  const std::vector<Vec> d = embeddings(p, cfg, X);
  const std::vector<Vec> H = encode(p, cfg, X);
  const LstmRef dec(p, "dec");
  Vec h(static_cast<size_t>(cfg.dec_dim), 0.0), c = h;
  double y_prev = 0.0;
  ForwardRef out;
  for (int j = 0; j < cfg.output_len; ++j) {
    const Vec beta = attention_weights(p("spatial_align.W"), p("spatial_align.b"), h, d);
    const Vec g_ctx = weighted_sum(beta, d);
    const Vec alpha = attention_weights(p("temporal_align.W"), p("temporal_align.b"), h, H);
    const Vec s_ctx = weighted_sum(alpha, H);
    Vec r = relu_vec(affine(p("reduce_gs.W"), p("reduce_gs.b"), concat(g_ctx, s_ctx)));
    r.push_back(y_prev);
    dec.step(h, c, r);
    const double y = affine(p("head.W"), p("head.b"), h)[0];
    out.y.push_back(y);
    out.beta.push_back(beta);
    out.alpha.push_back(alpha);
    y_prev = y;
  }
  return out;
}

}  // namespace oracle
