// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stam/core/graph.hpp"

namespace stam {

/// Mean squared error over all entries. For a [B x Ty] batch this equals the
/// mean of the per-window MSEs, since every window contributes Ty entries.
inline Var mse_loss(Graph& g, Var pred, Var target) {
  if (g.shape(pred) != g.shape(target))
    throw ShapeError("mse_loss: prediction " + g.shape(pred).str() + " vs target " +
                     g.shape(target).str());
  Var diff = g.sub(pred, target);
  return g.scale(g.sum(g.mul(diff, diff)), 1.0 / static_cast<double>(g.shape(pred).count()));
}

}  // namespace stam
