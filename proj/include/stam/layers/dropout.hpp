// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>

#include "stam/core/graph.hpp"

namespace stam {

enum class Mode { kTrain, kEval };

/// Inverted dropout: surviving activations are scaled by 1/(1-rate) at train
/// time so the expected value of every entry is preserved; eval mode is the
/// identity (returns the input Var untouched, no extra nodes).
struct DropoutSpec {
  double rate = 0.0;
  Mode mode = Mode::kEval;
};

inline Var dropout_apply(Graph& g, const DropoutSpec& spec, Var x, std::mt19937_64& rng) {
  if (spec.rate < 0.0 || spec.rate >= 1.0)
    throw ContractError("dropout: rate must lie in [0,1), got " + std::to_string(spec.rate));
  if (spec.mode == Mode::kEval || spec.rate == 0.0) return x;
  const Shape s = g.shape(x);
  Tensor mask(s);
  const double keep_scale = 1.0 / (1.0 - spec.rate);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& m : mask.values) m = u(rng) < spec.rate ? 0.0 : keep_scale;
  return g.mul(x, g.constant(mask));
}

}  // namespace stam
