// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stam/models/model.hpp"

namespace stam {

struct TrainConfig {
  double learning_rate = 0.001;
  int batch_size = 256;
  int epochs = 50;
  double beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8;
  uint64_t seed = 0;
  bool shuffle = true;
  // max-norm gradient clipping for divergence rescue; 0 disables it, which
  // is the default protocol
  double clip_norm = 0.0;

  void validate() const {
    std::vector<std::string> bad;
    if (learning_rate <= 0.0) bad.push_back("learning_rate must be > 0");
    if (batch_size < 1) bad.push_back("batch_size must be >= 1");
    if (epochs < 1) bad.push_back("epochs must be >= 1");
    if (beta1 < 0.0 || beta1 >= 1.0) bad.push_back("beta1 must lie in [0,1)");
    if (beta2 < 0.0 || beta2 >= 1.0) bad.push_back("beta2 must lie in [0,1)");
    if (epsilon <= 0.0) bad.push_back("epsilon must be > 0");
    if (clip_norm < 0.0) bad.push_back("clip_norm must be >= 0");
    if (!bad.empty()) {
      std::string msg = "invalid train config:";
      for (const auto& b : bad) msg += " " + b + ";";
      throw ConfigError(msg);
    }
  }
};

/// Adam with bias correction. Moment buffers mirror the parameter list and
/// start at zero; the step counter advances exactly once per step() call.
/// A parameter whose grad was never allocated counts as zero gradient.
class AdamState {
 public:
  explicit AdamState(std::span<const NamedParam> params) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const auto& p : params) {
      m_.emplace_back(p.tensor->values.size(), 0.0);
      v_.emplace_back(p.tensor->values.size(), 0.0);
    }
  }

  int64_t steps() const { return t_; }

  void step(std::span<const NamedParam> params, const TrainConfig& cfg) {
    if (params.size() != m_.size())
      throw ShapeError("adam_step: state tracks " + std::to_string(m_.size()) +
                       " parameters, got " + std::to_string(params.size()));
    double clip_scale = 1.0;
    if (cfg.clip_norm > 0.0) {
      double sq = 0.0;
      for (const auto& p : params)
        for (double gv : p.tensor->grad) sq += gv * gv;
      const double norm = std::sqrt(sq);
      if (norm > cfg.clip_norm) clip_scale = cfg.clip_norm / norm;
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t_));
    for (size_t p = 0; p < params.size(); ++p) {
      Tensor& t = *params[p].tensor;
      if (!t.grad.empty() && t.grad.size() != t.values.size())
        throw ShapeError("adam_step: grad size mismatch on '" + params[p].name + "'");
      if (m_[p].size() != t.values.size())
        throw ShapeError("adam_step: moment size mismatch on '" + params[p].name + "'");
      for (size_t i = 0; i < t.values.size(); ++i) {
        const double g = (t.grad.empty() ? 0.0 : t.grad[i]) * clip_scale;
        m_[p][i] = cfg.beta1 * m_[p][i] + (1.0 - cfg.beta1) * g;
        v_[p][i] = cfg.beta2 * v_[p][i] + (1.0 - cfg.beta2) * g * g;
        const double m_hat = m_[p][i] / bc1;
        const double v_hat = v_[p][i] / bc2;
        t.values[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
      }
    }
  }

 private:
  int64_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace stam
