// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>
#include <vector>

#include "stam/models/attention.hpp"
#include "stam/models/encoder.hpp"
#include "stam/models/model.hpp"

namespace stam {

/// Spatiotemporal attention model with a dual-LSTM decoder.
///
/// Per output step j: spatial attention (queried by the G-decoder state)
/// weights the per-variable embeddings d^i into a context g_j; temporal
/// attention (queried by the S-decoder state) weights the encoder states h_t
/// into s_j. Each context is reduced to q dims, concatenated with the
/// previous prediction and fed to its own decoder LSTM; the prediction reads
/// the concatenated decoder states.
class StamModel : public SequenceModel {
 public:
  explicit StamModel(const ModelConfig& cfg) : SequenceModel(cfg) {
    std::mt19937_64 rng = make_rng(cfg_.seed, RngStream::kInit);
    const int m = cfg_.enc_dim, p = cfg_.dec_dim, q = cfg_.ctx_dim;
    if (cfg_.per_var_embed) {
      var_embedders_.reserve(static_cast<size_t>(cfg_.n_vars));
      for (int i = 0; i < cfg_.n_vars; ++i)
        var_embedders_.emplace_back(cfg_.input_len, m, Activation::kRelu, rng);
    } else {
      spatial_embedder_ = DenseLayer(cfg_.input_len, m, Activation::kRelu, rng);
    }
    encoder_ = StackedEncoder(cfg_.n_vars, m, rng);
    spatial_align_ = DenseLayer(p + m, 1, Activation::kRelu, rng);
    temporal_align_ = DenseLayer(p + m, 1, Activation::kRelu, rng);
    reduce_g_ = DenseLayer(m, q, Activation::kRelu, rng);
    reduce_s_ = DenseLayer(m, q, Activation::kRelu, rng);
    dec_g_ = LstmCell(q + 1, p, rng);
    dec_s_ = LstmCell(q + 1, p, rng);
    head_ = DenseLayer(2 * p, 1, Activation::kIdentity, rng);

    if (cfg_.per_var_embed) {
      for (int i = 0; i < cfg_.n_vars; ++i)
        register_dense("var_embedder." + std::to_string(i), var_embedders_[static_cast<size_t>(i)]);
    } else {
      register_dense("spatial_embedder", spatial_embedder_);
    }
    register_lstm("encoder_l1", encoder_.l1);
    register_lstm("encoder_l2", encoder_.l2);
    register_dense("spatial_align", spatial_align_);
    register_dense("temporal_align", temporal_align_);
    register_dense("reduce_g", reduce_g_);
    register_dense("reduce_s", reduce_s_);
    register_lstm("dec_g", dec_g_);
    register_lstm("dec_s", dec_s_);
    register_dense("head", head_);
  }

  /// Embeds each variable's input-window series: D = [d^1 .. d^N], [B x m]
  /// each. With shared weights, permuting variables permutes D identically.
  std::vector<Var> spatial_embed(Graph& g, const BatchInput& in) {
    std::vector<Var> d;
    d.reserve(in.x_var.size());
    for (size_t i = 0; i < in.x_var.size(); ++i) {
      DenseLayer& e = cfg_.per_var_embed ? var_embedders_[i] : spatial_embedder_;
      d.push_back(e.forward(g, g.constant(in.x_var[i])));
    }
    return d;
  }

  /// Temporal embeddings H = [h_1 .. h_Tx] from the two-layer encoder.
  std::vector<Var> encode(Graph& g, const BatchInput& in, Mode mode, std::mt19937_64& rng) {
    return encoder_.run(g, in, cfg_.dropout_rate, mode, rng);
  }

  AttentionOut spatial_attention(Graph& g, Var h_dec_prev, std::span<const Var> d) {
    return attend(g, spatial_align_, h_dec_prev, d);
  }

  AttentionOut temporal_attention(Graph& g, Var h_dec_prev, std::span<const Var> h) {
    return attend(g, temporal_align_, h_dec_prev, h);
  }

  struct DecoderState {
    Var h_g, c_g, h_s, c_s;
  };

  struct DecodeStep {
    Var y_hat;  // [B x 1]
    DecoderState state;
    Var beta;   // [B x N]
    Var alpha;  // [B x Tx]
  };

  /// One output step: both attentions, context reduction, both decoder LSTM
  /// updates and the unified prediction off [h'_G ; h'_S].
  DecodeStep decode_step(Graph& g, const DecoderState& st, std::span<const Var> d,
                         std::span<const Var> h, Var y_prev, Mode mode, std::mt19937_64& rng) {
    const DropoutSpec drop{cfg_.dropout_rate, mode};
    AttentionOut spa = spatial_attention(g, st.h_g, d);
    AttentionOut tem = temporal_attention(g, st.h_s, h);
    Var r_g = g.concat(reduce_g_.forward(g, spa.context), y_prev);
    Var r_s = g.concat(reduce_s_.forward(g, tem.context), y_prev);
    DecodeStep out;
    std::tie(out.state.h_g, out.state.c_g) = dec_g_.step(g, st.h_g, st.c_g, r_g);
    std::tie(out.state.h_s, out.state.c_s) = dec_s_.step(g, st.h_s, st.c_s, r_s);
    Var joint = g.concat(dropout_apply(g, drop, out.state.h_g, rng),
                         dropout_apply(g, drop, out.state.h_s, rng));
    out.y_hat = head_.forward(g, joint);
    out.beta = spa.weights;
    out.alpha = tem.weights;
    return out;
  }

  BatchForward build(Graph& g, const BatchInput& in, Mode mode,
                     std::mt19937_64& rng) override {
    const int B = in.batch, p = cfg_.dec_dim;
    std::vector<Var> d = spatial_embed(g, in);
    std::vector<Var> h = encode(g, in, mode, rng);
    DecoderState st;
    st.h_g = g.zeros(Shape::mat(B, p));
    st.c_g = st.h_g;
    st.h_s = g.zeros(Shape::mat(B, p));
    st.c_s = st.h_s;
    Var y_prev = g.zeros(Shape::mat(B, 1));  // standardized series, 0 = training mean
    BatchForward bf;
    std::vector<Var> preds;
    preds.reserve(static_cast<size_t>(cfg_.output_len));
    for (int j = 0; j < cfg_.output_len; ++j) {
      DecodeStep step = decode_step(g, st, d, h, y_prev, mode, rng);
      st = step.state;
      y_prev = step.y_hat;
      preds.push_back(step.y_hat);
      bf.spatial.push_back(step.beta);
      bf.temporal.push_back(step.alpha);
    }
    bf.pred = g.concat(preds);
    return bf;
  }

 private:
  DenseLayer spatial_embedder_;
  std::vector<DenseLayer> var_embedders_;
  StackedEncoder encoder_;
  DenseLayer spatial_align_, temporal_align_;
  DenseLayer reduce_g_, reduce_s_;
  LstmCell dec_g_, dec_s_;
  DenseLayer head_;
};

/// Single-decoder variant: the two context vectors are concatenated, reduced
/// once to q dims, joined with the previous prediction and consumed by one
/// decoder LSTM. Both attentions are queried by that decoder's state.
class StamLiteModel : public SequenceModel {
 public:
  explicit StamLiteModel(const ModelConfig& cfg) : SequenceModel(cfg) {
    std::mt19937_64 rng = make_rng(cfg_.seed, RngStream::kInit);
    const int m = cfg_.enc_dim, p = cfg_.dec_dim, q = cfg_.ctx_dim;
    if (cfg_.per_var_embed) {
      var_embedders_.reserve(static_cast<size_t>(cfg_.n_vars));
      for (int i = 0; i < cfg_.n_vars; ++i)
        var_embedders_.emplace_back(cfg_.input_len, m, Activation::kRelu, rng);
    } else {
      spatial_embedder_ = DenseLayer(cfg_.input_len, m, Activation::kRelu, rng);
    }
    encoder_ = StackedEncoder(cfg_.n_vars, m, rng);
    spatial_align_ = DenseLayer(p + m, 1, Activation::kRelu, rng);
    temporal_align_ = DenseLayer(p + m, 1, Activation::kRelu, rng);
    reduce_gs_ = DenseLayer(2 * m, q, Activation::kRelu, rng);
    dec_ = LstmCell(q + 1, p, rng);
    head_ = DenseLayer(p, 1, Activation::kIdentity, rng);

    if (cfg_.per_var_embed) {
      for (int i = 0; i < cfg_.n_vars; ++i)
        register_dense("var_embedder." + std::to_string(i), var_embedders_[static_cast<size_t>(i)]);
    } else {
      register_dense("spatial_embedder", spatial_embedder_);
    }
    register_lstm("encoder_l1", encoder_.l1);
    register_lstm("encoder_l2", encoder_.l2);
    register_dense("spatial_align", spatial_align_);
    register_dense("temporal_align", temporal_align_);
    register_dense("reduce_gs", reduce_gs_);
    register_lstm("dec", dec_);
    register_dense("head", head_);
  }

  BatchForward build(Graph& g, const BatchInput& in, Mode mode,
                     std::mt19937_64& rng) override {
    const DropoutSpec drop{cfg_.dropout_rate, mode};
    const int B = in.batch, p = cfg_.dec_dim;
    std::vector<Var> d;
    d.reserve(in.x_var.size());
    for (size_t i = 0; i < in.x_var.size(); ++i) {
      DenseLayer& e = cfg_.per_var_embed ? var_embedders_[i] : spatial_embedder_;
      d.push_back(e.forward(g, g.constant(in.x_var[i])));
    }
    std::vector<Var> h = encoder_.run(g, in, cfg_.dropout_rate, mode, rng);
    Var h_dec = g.zeros(Shape::mat(B, p));
    Var c_dec = h_dec;
    Var y_prev = g.zeros(Shape::mat(B, 1));
    BatchForward bf;
    std::vector<Var> preds;
    preds.reserve(static_cast<size_t>(cfg_.output_len));
    for (int j = 0; j < cfg_.output_len; ++j) {
      AttentionOut spa = attend(g, spatial_align_, h_dec, d);
      AttentionOut tem = attend(g, temporal_align_, h_dec, h);
      Var reduced = reduce_gs_.forward(g, g.concat(spa.context, tem.context));
      Var r = g.concat(reduced, y_prev);
      std::tie(h_dec, c_dec) = dec_.step(g, h_dec, c_dec, r);
      Var y = head_.forward(g, dropout_apply(g, drop, h_dec, rng));
      y_prev = y;
      preds.push_back(y);
      bf.spatial.push_back(spa.weights);
      bf.temporal.push_back(tem.weights);
    }
    bf.pred = g.concat(preds);
    return bf;
  }

 private:
  DenseLayer spatial_embedder_;
  std::vector<DenseLayer> var_embedders_;
  StackedEncoder encoder_;
  DenseLayer spatial_align_, temporal_align_;
  DenseLayer reduce_gs_;
  LstmCell dec_;
  DenseLayer head_;
};

}  // namespace stam
