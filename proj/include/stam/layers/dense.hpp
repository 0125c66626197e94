// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>
#include <string>

#include "stam/core/graph.hpp"
#include "stam/core/rng.hpp"

namespace stam {

enum class Activation { kIdentity, kRelu, kTanh };

/// Fully connected layer y = act(W x + b), W stored [out x in] row-major.
struct DenseLayer {
  int in_dim = 0, out_dim = 0;
  Activation act = Activation::kIdentity;
  Tensor W, b;

  DenseLayer() = default;
  DenseLayer(int in, int out, Activation a, std::mt19937_64& rng)
      : in_dim(in), out_dim(out), act(a), W(Shape::mat(out, in)), b(Shape::vec(out)) {
    W.requires_grad = true;
    b.requires_grad = true;
    for (double& w : W.values) w = uniform_fan_in(rng, in);
  }

  /// x: [B x in] -> [B x out]
  Var forward(Graph& g, Var x) {
    Var y = g.linear(x, g.leaf(W), g.leaf(b));
    switch (act) {
      case Activation::kRelu:
        return g.relu(y);
      case Activation::kTanh:
        return g.tanh(y);
      case Activation::kIdentity:
        return y;
    }
    return y;
  }

  int64_t param_count() const { return int64_t{out_dim} * in_dim + out_dim; }
};

}  // namespace stam
