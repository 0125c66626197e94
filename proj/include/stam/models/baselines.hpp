// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>
#include <vector>

#include "stam/models/attention.hpp"
#include "stam/models/encoder.hpp"
#include "stam/models/model.hpp"

namespace stam {

/// Classic encoder-decoder: the final encoder state is the whole context,
/// repeated at every output step. No attention, so explain() rejects it.
class EncDecModel : public SequenceModel {
 public:
  explicit EncDecModel(const ModelConfig& cfg) : SequenceModel(cfg) {
    std::mt19937_64 rng = make_rng(cfg_.seed, RngStream::kInit);
    encoder_ = StackedEncoder(cfg_.n_vars, cfg_.enc_dim, rng);
    dec_ = LstmCell(cfg_.enc_dim + 1, cfg_.dec_dim, rng);
    head_ = DenseLayer(cfg_.dec_dim, 1, Activation::kIdentity, rng);
    register_lstm("encoder_l1", encoder_.l1);
    register_lstm("encoder_l2", encoder_.l2);
    register_lstm("dec", dec_);
    register_dense("head", head_);
  }

  BatchForward build(Graph& g, const BatchInput& in, Mode mode,
                     std::mt19937_64& rng) override {
    const DropoutSpec drop{cfg_.dropout_rate, mode};
    const int B = in.batch, p = cfg_.dec_dim;
    std::vector<Var> h = encoder_.run(g, in, cfg_.dropout_rate, mode, rng);
    Var context = h.back();
    Var h_dec = g.zeros(Shape::mat(B, p));
    Var c_dec = h_dec;
    Var y_prev = g.zeros(Shape::mat(B, 1));
    BatchForward bf;
    std::vector<Var> preds;
    for (int j = 0; j < cfg_.output_len; ++j) {
      std::tie(h_dec, c_dec) = dec_.step(g, h_dec, c_dec, g.concat(context, y_prev));
      Var y = head_.forward(g, dropout_apply(g, drop, h_dec, rng));
      y_prev = y;
      preds.push_back(y);
    }
    bf.pred = g.concat(preds);
    return bf;
  }

 private:
  StackedEncoder encoder_;
  LstmCell dec_;
  DenseLayer head_;
};

/// Encoder-decoder with temporal attention only: each output step attends
/// over all encoder states and feeds [s_j ; y_prev] to the decoder LSTM.
/// The alignment network keeps the pre-STAM tanh activation.
class LstmAttModel : public SequenceModel {
 public:
  explicit LstmAttModel(const ModelConfig& cfg) : SequenceModel(cfg) {
    std::mt19937_64 rng = make_rng(cfg_.seed, RngStream::kInit);
    encoder_ = StackedEncoder(cfg_.n_vars, cfg_.enc_dim, rng);
    temporal_align_ = DenseLayer(cfg_.dec_dim + cfg_.enc_dim, 1, Activation::kTanh, rng);
    dec_ = LstmCell(cfg_.enc_dim + 1, cfg_.dec_dim, rng);
    head_ = DenseLayer(cfg_.dec_dim, 1, Activation::kIdentity, rng);
    register_lstm("encoder_l1", encoder_.l1);
    register_lstm("encoder_l2", encoder_.l2);
    register_dense("temporal_align", temporal_align_);
    register_lstm("dec", dec_);
    register_dense("head", head_);
  }

  BatchForward build(Graph& g, const BatchInput& in, Mode mode,
                     std::mt19937_64& rng) override {
    const DropoutSpec drop{cfg_.dropout_rate, mode};
    const int B = in.batch, p = cfg_.dec_dim;
    std::vector<Var> h = encoder_.run(g, in, cfg_.dropout_rate, mode, rng);
    Var h_dec = g.zeros(Shape::mat(B, p));
    Var c_dec = h_dec;
    Var y_prev = g.zeros(Shape::mat(B, 1));
    BatchForward bf;
    std::vector<Var> preds;
    for (int j = 0; j < cfg_.output_len; ++j) {
      AttentionOut tem = attend(g, temporal_align_, h_dec, h);
      std::tie(h_dec, c_dec) = dec_.step(g, h_dec, c_dec, g.concat(tem.context, y_prev));
      Var y = head_.forward(g, dropout_apply(g, drop, h_dec, rng));
      y_prev = y;
      preds.push_back(y);
      bf.temporal.push_back(tem.weights);
    }
    bf.pred = g.concat(preds);
    return bf;
  }

 private:
  StackedEncoder encoder_;
  DenseLayer temporal_align_;
  LstmCell dec_;
  DenseLayer head_;
};

/// Dual-stage attention baseline. Spatial attention sits inside the encoder:
/// at every input step the alignment reads the previous encoder state pair
/// and each variable's FULL series,
///
///   e^i_t = v_e . tanh(W_e [h_{t-1} ; c_{t-1}] + U_e x^i),
///
/// the step input is replaced by the weighted x̂_t = β_t (.) x_t, and the
/// weighted series feeds a single encoder LSTM. Because x^i spans the whole
/// window, x̂_t depends on inputs ahead of t — the model is deliberately
/// non-causal and is kept verbatim as the contrast case. The decoder reuses
/// the temporal-attention construction.
class DaRnnModel : public SequenceModel {
 public:
  explicit DaRnnModel(const ModelConfig& cfg) : SequenceModel(cfg) {
    std::mt19937_64 rng = make_rng(cfg_.seed, RngStream::kInit);
    const int m = cfg_.enc_dim, p = cfg_.dec_dim, tx = cfg_.input_len;
    W_e_ = Tensor(Shape::mat(tx, 2 * m));  // alignment hidden width = Tx
    U_e_ = Tensor(Shape::mat(tx, tx));
    v_e_ = Tensor(Shape::mat(tx, 1));
    for (Tensor* t : {&W_e_, &U_e_, &v_e_}) {
      t->requires_grad = true;
      for (double& v : t->values) v = uniform_fan_in(rng, tx);
    }
    enc_ = LstmCell(cfg_.n_vars, m, rng);
    temporal_align_ = DenseLayer(p + m, 1, Activation::kTanh, rng);
    dec_ = LstmCell(m + 1, p, rng);
    head_ = DenseLayer(p, 1, Activation::kIdentity, rng);
    register_tensor("spatial_align.W_e", W_e_);
    register_tensor("spatial_align.U_e", U_e_);
    register_tensor("spatial_align.v_e", v_e_);
    register_lstm("enc", enc_);
    register_dense("temporal_align", temporal_align_);
    register_lstm("dec", dec_);
    register_dense("head", head_);
  }

  struct EncoderRun {
    std::vector<Var> weighted;  // x̂_t, each [B x N]
    std::vector<Var> betas;     // β_t, each [B x N]
    std::vector<Var> states;    // h_t, each [B x m] (dropout applied)
  };

  /// Encoder pass with per-step spatial weighting.
  EncoderRun run_encoder(Graph& g, const BatchInput& in, Mode mode, std::mt19937_64& rng) {
    const DropoutSpec drop{cfg_.dropout_rate, mode};
    const int B = in.batch, m = cfg_.enc_dim, n = cfg_.n_vars, tx = cfg_.input_len;
    Var zero_bias = g.zeros(Shape::vec(tx));
    Var v_e = g.leaf(v_e_);
    // U_e x^i is step-independent; hoist it out of the time loop.
    std::vector<Var> series_proj;
    series_proj.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
      series_proj.push_back(
          g.linear(g.constant(in.x_var[static_cast<size_t>(i)]), g.leaf(U_e_), zero_bias));
    Var h = g.zeros(Shape::mat(B, m)), c = h;
    EncoderRun run;
    for (size_t t = 0; t < in.x_t.size(); ++t) {
      Var state_proj = g.linear(g.concat(h, c), g.leaf(W_e_), zero_bias);
      std::vector<Var> energies;
      energies.reserve(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i)
        energies.push_back(
            g.matmul(g.tanh(g.add(state_proj, series_proj[static_cast<size_t>(i)])), v_e));
      Var beta = g.softmax(g.concat(energies));
      Var x_hat = g.mul(beta, g.constant(in.x_t[t]));
      std::tie(h, c) = enc_.step(g, h, c, x_hat);
      run.weighted.push_back(x_hat);
      run.betas.push_back(beta);
      run.states.push_back(dropout_apply(g, drop, h, rng));
    }
    return run;
  }

  /// The weighted series X̂ = [x̂_1 .. x̂_Tx] for one window, materialized as
  /// an [N x Tx] tensor. Probes the future-dependence of x̂_t directly.
  Tensor weighted_input(const Tensor& X) {
    Graph g;
    std::mt19937_64 rng(0);
    EncoderRun run = run_encoder(g, BatchInput::from_window(X), Mode::kEval, rng);
    Tensor out(Shape::mat(cfg_.n_vars, cfg_.input_len));
    for (int t = 0; t < cfg_.input_len; ++t) {
      auto row = g.values(run.weighted[static_cast<size_t>(t)]);
      for (int i = 0; i < cfg_.n_vars; ++i) out.at(i, t) = row[static_cast<size_t>(i)];
    }
    return out;
  }

  BatchForward build(Graph& g, const BatchInput& in, Mode mode,
                     std::mt19937_64& rng) override {
    const DropoutSpec drop{cfg_.dropout_rate, mode};
    const int B = in.batch, p = cfg_.dec_dim;
    EncoderRun run = run_encoder(g, in, mode, rng);
    Var h_dec = g.zeros(Shape::mat(B, p));
    Var c_dec = h_dec;
    Var y_prev = g.zeros(Shape::mat(B, 1));
    BatchForward bf;
    bf.spatial = run.betas;  // one row per input step
    std::vector<Var> preds;
    for (int j = 0; j < cfg_.output_len; ++j) {
      AttentionOut tem = attend(g, temporal_align_, h_dec, run.states);
      std::tie(h_dec, c_dec) = dec_.step(g, h_dec, c_dec, g.concat(tem.context, y_prev));
      Var y = head_.forward(g, dropout_apply(g, drop, h_dec, rng));
      y_prev = y;
      preds.push_back(y);
      bf.temporal.push_back(tem.weights);
    }
    bf.pred = g.concat(preds);
    return bf;
  }

 private:
  Tensor W_e_, U_e_, v_e_;
  LstmCell enc_;
  DenseLayer temporal_align_;
  LstmCell dec_;
  DenseLayer head_;
};

}  // namespace stam
