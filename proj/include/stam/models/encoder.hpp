// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>
#include <vector>

#include "stam/layers/dropout.hpp"
#include "stam/layers/lstm.hpp"
#include "stam/models/model.hpp"

namespace stam {

/// Two stacked LSTM layers reading the input columns x_1..x_Tx in order.
/// Strictly causal by construction: the state at step t is a function of
/// x_1..x_t only. Dropout (train mode) sits on each layer's hidden output,
/// never on the recurrent path, so the recurrence itself stays clean.
struct StackedEncoder {
  LstmCell l1, l2;

  StackedEncoder() = default;
  StackedEncoder(int n_vars, int dim, std::mt19937_64& rng)
      : l1(n_vars, dim, rng), l2(dim, dim, rng) {}

  /// Returns the layer-2 hidden sequence H = [h_1 .. h_Tx], each [B x m].
  std::vector<Var> run(Graph& g, const BatchInput& in, double dropout_rate, Mode mode,
                       std::mt19937_64& rng) {
    const DropoutSpec drop{dropout_rate, mode};
    const int B = in.batch, m = l1.state_dim;
    Var h1 = g.zeros(Shape::mat(B, m)), c1 = h1;
    Var h2 = g.zeros(Shape::mat(B, m)), c2 = h2;
    std::vector<Var> states;
    states.reserve(in.x_t.size());
    for (const Tensor& xt : in.x_t) {
      std::tie(h1, c1) = l1.step(g, h1, c1, g.constant(xt));
      Var h1_out = dropout_apply(g, drop, h1, rng);
      std::tie(h2, c2) = l2.step(g, h2, c2, h1_out);
      states.push_back(dropout_apply(g, drop, h2, rng));
    }
    return states;
  }

  int64_t param_count() const { return l1.param_count() + l2.param_count(); }
};

}  // namespace stam
