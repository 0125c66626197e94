// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "stam/core/graph.hpp"
#include "stam/layers/dense.hpp"
#include "stam/layers/dropout.hpp"
#include "stam/layers/lstm.hpp"
#include "stam/models/config.hpp"

namespace stam {

struct NamedParam {
  std::string name;
  Tensor* tensor = nullptr;
};

/// One batch of input windows, gathered into the two layouts the models
/// consume: per-time-step slices x_t (encoder input) and per-variable series
/// x_var (spatial embeddings / DA-RNN alignment).
struct BatchInput {
  int batch = 0;
  std::vector<Tensor> x_t;    // input_len tensors, each [B x n_vars]
  std::vector<Tensor> x_var;  // n_vars tensors, each [B x input_len]

  /// Single window X:[n_vars x input_len] as a batch of one.
  static BatchInput from_window(const Tensor& X) {
    if (X.shape.rank() != 2) throw ShapeError("window must be rank 2, got " + X.shape.str());
    const int n = X.shape.rows(), tx = X.shape.cols();
    BatchInput bi;
    bi.batch = 1;
    bi.x_t.reserve(static_cast<size_t>(tx));
    for (int t = 0; t < tx; ++t) {
      Tensor xt(Shape::mat(1, n));
      for (int i = 0; i < n; ++i) xt.at(0, i) = X.at(i, t);
      bi.x_t.push_back(std::move(xt));
    }
    bi.x_var.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      Tensor xv(Shape::mat(1, tx));
      for (int t = 0; t < tx; ++t) xv.at(0, t) = X.at(i, t);
      bi.x_var.push_back(std::move(xv));
    }
    return bi;
  }

  int n_vars() const { return x_t.empty() ? 0 : x_t[0].shape.cols(); }
  int input_len() const { return static_cast<int>(x_t.size()); }
};

/// Attention weights captured during one window's decode. `spatial` has one
/// row per output step for the decoder-attention models and one row per
/// input step for DA-RNN (whose spatial weights live in the encoder);
/// `temporal` has one row per output step. Rows are simplex vectors.
struct AttentionRecord {
  int spatial_rows = 0, n_vars = 0;
  int temporal_rows = 0, input_len = 0;
  std::vector<double> spatial;   // spatial_rows x n_vars, row-major
  std::vector<double> temporal;  // temporal_rows x input_len, row-major

  double spatial_at(int r, int c) const {
    return spatial[static_cast<size_t>(r) * n_vars + c];
  }
  double temporal_at(int r, int c) const {
    return temporal[static_cast<size_t>(r) * input_len + c];
  }
};

struct ForwardResult {
  std::vector<double> y_hat;  // output_len predictions (standardized units)
  AttentionRecord attn;
};

/// Everything a batched forward pass exposes: predictions plus the per-step
/// attention weight nodes for record extraction.
struct BatchForward {
  Var pred;                   // [B x output_len]
  std::vector<Var> spatial;   // each [B x n_vars]
  std::vector<Var> temporal;  // each [B x input_len]
};

/// Common surface of the five architectures. A model owns its parameters;
/// build() appends one batched forward computation to the caller's graph.
/// Instances are single-writer: train from one thread, share only frozen.
class SequenceModel {
 public:
  explicit SequenceModel(const ModelConfig& cfg) : cfg_(cfg) { cfg_.validate(); }
  virtual ~SequenceModel() = default;
  SequenceModel(const SequenceModel&) = delete;
  SequenceModel& operator=(const SequenceModel&) = delete;

  const ModelConfig& config() const { return cfg_; }

  virtual BatchForward build(Graph& g, const BatchInput& in, Mode mode,
                             std::mt19937_64& dropout_rng) = 0;

  const std::vector<NamedParam>& params() const { return params_; }

  int64_t param_total() const {
    int64_t total = 0;
    for (const auto& p : params_) total += p.tensor->count();
    return total;
  }

  void zero_grad() {
    for (auto& p : params_) {
      p.tensor->ensure_grad();
      p.tensor->zero_grad();
    }
  }

  /// Forward one window X:[n_vars x input_len]. Autoregressive: each decode
  /// step consumes the model's own previous prediction (never a target), in
  /// train and eval mode alike.
  ForwardResult forward(const Tensor& X, Mode mode) {
    std::mt19937_64 rng(cfg_.seed);  // only consumed when mode == kTrain
    return forward(X, mode, rng);
  }

  ForwardResult forward(const Tensor& X, Mode mode, std::mt19937_64& dropout_rng) {
    if (X.shape.rank() != 2 || X.shape.rows() != cfg_.n_vars || X.shape.cols() != cfg_.input_len)
      throw ShapeError("forward: window " + X.shape.str() + " for model expecting [" +
                       std::to_string(cfg_.n_vars) + "x" + std::to_string(cfg_.input_len) + "]");
    if (!X.all_finite()) throw ContractError("forward: window contains non-finite values");
    Graph g;
    BatchForward bf = build(g, BatchInput::from_window(X), mode, dropout_rng);
    ForwardResult out;
    auto pred = g.values(bf.pred);
    out.y_hat.assign(pred.begin(), pred.end());
    for (int j = 0; j < cfg_.output_len; ++j)
      if (!std::isfinite(out.y_hat[static_cast<size_t>(j)]))
        throw DivergedError("forward: non-finite prediction at output step " + std::to_string(j), j);
    out.attn = extract_record(g, bf, 0);
    return out;
  }

  /// Copies one batch row's attention weights out of a built graph.
  AttentionRecord extract_record(const Graph& g, const BatchForward& bf, int row) const {
    AttentionRecord rec;
    rec.n_vars = cfg_.n_vars;
    rec.input_len = cfg_.input_len;
    rec.spatial_rows = static_cast<int>(bf.spatial.size());
    rec.temporal_rows = static_cast<int>(bf.temporal.size());
    rec.spatial.reserve(static_cast<size_t>(rec.spatial_rows) * cfg_.n_vars);
    for (Var v : bf.spatial) {
      auto w = g.values(v);
      const int c = g.shape(v).cols();
      for (int j = 0; j < c; ++j) rec.spatial.push_back(w[static_cast<size_t>(row) * c + j]);
    }
    rec.temporal.reserve(static_cast<size_t>(rec.temporal_rows) * cfg_.input_len);
    for (Var v : bf.temporal) {
      auto w = g.values(v);
      const int c = g.shape(v).cols();
      for (int j = 0; j < c; ++j) rec.temporal.push_back(w[static_cast<size_t>(row) * c + j]);
    }
    return rec;
  }

 protected:
  void register_dense(const std::string& name, DenseLayer& l) {
    params_.push_back({name + ".W", &l.W});
    params_.push_back({name + ".b", &l.b});
  }
  void register_lstm(const std::string& name, LstmCell& c) {
    params_.push_back({name + ".W_f", &c.W_f});
    params_.push_back({name + ".W_i", &c.W_i});
    params_.push_back({name + ".W_o", &c.W_o});
    params_.push_back({name + ".W_g", &c.W_g});
    params_.push_back({name + ".b_f", &c.b_f});
    params_.push_back({name + ".b_i", &c.b_i});
    params_.push_back({name + ".b_o", &c.b_o});
    params_.push_back({name + ".b_g", &c.b_g});
  }
  void register_tensor(const std::string& name, Tensor& t) { params_.push_back({name, &t}); }

  ModelConfig cfg_;
  std::vector<NamedParam> params_;
};

}  // namespace stam
