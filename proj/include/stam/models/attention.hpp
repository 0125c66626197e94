// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "stam/layers/dense.hpp"

namespace stam {

struct AttentionOut {
  Var weights;  // [B x K], rows nonnegative and summing to 1
  Var context;  // [B x m], attention-weighted sum of the keys
};

/// Additive attention over a set of keys. Each energy is the alignment
/// network applied to [query ; key_k]; weights are the softmax over keys and
/// the context is the weighted key sum. Serves both the spatial form (keys =
/// variable embeddings d^i) and the temporal form (keys = encoder states h_t).
inline AttentionOut attend(Graph& g, DenseLayer& align, Var query, std::span<const Var> keys) {
  if (keys.empty()) throw ContractError("attend: needs at least one key");
  std::vector<Var> energies;
  energies.reserve(keys.size());
  for (Var key : keys) energies.push_back(align.forward(g, g.concat(query, key)));
  Var weights = g.softmax(g.concat(energies));
  Var context;
  for (size_t k = 0; k < keys.size(); ++k) {
    Var scaled = g.row_scale(keys[k], g.slice_cols(weights, static_cast<int>(k),
                                                   static_cast<int>(k) + 1));
    context = k == 0 ? scaled : g.add(context, scaled);
  }
  return {weights, context};
}

}  // namespace stam
