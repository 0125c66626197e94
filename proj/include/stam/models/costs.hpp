// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "stam/models/config.hpp"

namespace stam {

namespace detail {

inline int64_t lstm_params(int64_t in, int64_t state) {
  return 4 * (in * state + state * state + state);
}
inline int64_t dense_params(int64_t in, int64_t out) { return out * in + out; }

}  // namespace detail

/// Exact trainable-parameter count for the pinned architectures, as a closed
/// form over the config — no model is constructed. Independent of output_len
/// for every arch (decoding reuses the same weights at each step).
inline int64_t param_count(const ModelConfig& cfg) {
  cfg.validate();
  const int64_t n = cfg.n_vars, tx = cfg.input_len;
  const int64_t m = cfg.enc_dim, p = cfg.dec_dim, q = cfg.ctx_dim;
  using detail::dense_params;
  using detail::lstm_params;
  const int64_t embed = (cfg.per_var_embed ? n : 1) * dense_params(tx, m);
  const int64_t stacked_enc = lstm_params(n, m) + lstm_params(m, m);
  const int64_t align = dense_params(p + m, 1);
  switch (cfg.arch) {
    case Arch::kStam:
      return embed + stacked_enc + 2 * align + 2 * dense_params(m, q) +
             2 * lstm_params(q + 1, p) + dense_params(2 * p, 1);
    case Arch::kStamLite:
      return embed + stacked_enc + 2 * align + dense_params(2 * m, q) + lstm_params(q + 1, p) +
             dense_params(p, 1);
    case Arch::kEncDec:
      return stacked_enc + lstm_params(m + 1, p) + dense_params(p, 1);
    case Arch::kLstmAtt:
      return stacked_enc + align + lstm_params(m + 1, p) + dense_params(p, 1);
    case Arch::kDaRnn:
      // encoder alignment W_e:[Tx x 2m], U_e:[Tx x Tx], v_e:[Tx], no bias
      return tx * 2 * m + tx * tx + tx + lstm_params(n, m) + align + lstm_params(m + 1, p) +
             dense_params(p, 1);
  }
  throw ConfigError("param_count: unknown arch");
}

/// Inference cost model: 8(Nm + m^2 + 2m)Tx for the encoder,
/// (p + 2 + 2m)(N + Tx)Ty for the two attentions, and 8Ty(p^2 + pq + 3p)
/// for the dual decoder — coefficient 4 for the single-decoder variant.
inline int64_t flop_estimate(const ModelConfig& cfg) {
  if (cfg.arch != Arch::kStam && cfg.arch != Arch::kStamLite)
    throw ConfigError("flop_estimate: only stam and stam_lite have a pinned cost model, got " +
                      to_string(cfg.arch));
  cfg.validate();
  const int64_t n = cfg.n_vars, tx = cfg.input_len, ty = cfg.output_len;
  const int64_t m = cfg.enc_dim, p = cfg.dec_dim, q = cfg.ctx_dim;
  const int64_t encoder = 8 * (n * m + m * m + 2 * m) * tx;
  const int64_t attention = (p + 2 + 2 * m) * (n + tx) * ty;
  const int64_t dec_coeff = cfg.arch == Arch::kStam ? 8 : 4;
  const int64_t decoder = dec_coeff * ty * (p * p + p * q + 3 * p);
  return encoder + attention + decoder;
}

}  // namespace stam
