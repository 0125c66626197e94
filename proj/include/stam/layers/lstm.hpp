// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>
#include <utility>

#include "stam/core/graph.hpp"
#include "stam/core/rng.hpp"

namespace stam {

/// LSTM cell with the four gate blocks stored separately in f, i, o, g
/// order (the serialization layout relies on this ordering). Each weight is
/// [state x (input + state)] and acts on the concatenation [x ; h_prev].
///
///   f,i,o = sigmoid(W_* [x;h] + b_*),  g = tanh(W_g [x;h] + b_g)
///   c' = f (.) c + i (.) g,            h' = o (.) tanh(c')
struct LstmCell {
  int input_dim = 0, state_dim = 0;
  Tensor W_f, W_i, W_o, W_g;
  Tensor b_f, b_i, b_o, b_g;

  LstmCell() = default;
  LstmCell(int input, int state, std::mt19937_64& rng) : input_dim(input), state_dim(state) {
    const Shape w = Shape::mat(state, input + state);
    const Shape b = Shape::vec(state);
    for (Tensor* t : {&W_f, &W_i, &W_o, &W_g}) {
      *t = Tensor(w);
      t->requires_grad = true;
      for (double& v : t->values) v = uniform_fan_in(rng, input + state);
    }
    for (Tensor* t : {&b_f, &b_i, &b_o, &b_g}) {
      *t = Tensor(b);
      t->requires_grad = true;
    }
    // forget gate starts open so early training retains cell memory
    for (double& v : b_f.values) v = 1.0;
  }

  /// One recurrence step; all of x:[B x input], h,c:[B x state].
  std::pair<Var, Var> step(Graph& g, Var h_prev, Var c_prev, Var x) {
    if (g.shape(x).cols() != input_dim || g.shape(h_prev).cols() != state_dim ||
        g.shape(c_prev).cols() != state_dim)
      throw ShapeError("lstm_step: x " + g.shape(x).str() + ", h " + g.shape(h_prev).str() +
                       " for cell " + std::to_string(input_dim) + "->" +
                       std::to_string(state_dim));
    Var z = g.concat(x, h_prev);
    Var f = g.sigmoid(g.linear(z, g.leaf(W_f), g.leaf(b_f)));
    Var i = g.sigmoid(g.linear(z, g.leaf(W_i), g.leaf(b_i)));
    Var o = g.sigmoid(g.linear(z, g.leaf(W_o), g.leaf(b_o)));
    Var gg = g.tanh(g.linear(z, g.leaf(W_g), g.leaf(b_g)));
    Var c = g.add(g.mul(f, c_prev), g.mul(i, gg));
    Var h = g.mul(o, g.tanh(c));
    return {h, c};
  }

  int64_t param_count() const {
    return 4 * (int64_t{input_dim} * state_dim + int64_t{state_dim} * state_dim + state_dim);
  }
};

}  // namespace stam
