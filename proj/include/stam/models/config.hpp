// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stam/core/error.hpp"

namespace stam {

enum class Arch { kStam, kStamLite, kEncDec, kLstmAtt, kDaRnn };

inline std::string to_string(Arch a) {
  switch (a) {
    case Arch::kStam: return "stam";
    case Arch::kStamLite: return "stam_lite";
    case Arch::kEncDec: return "enc_dec";
    case Arch::kLstmAtt: return "lstm_att";
    case Arch::kDaRnn: return "da_rnn";
  }
  throw ConfigError("unknown arch value");
}

inline Arch arch_from_string(const std::string& s) {
  if (s == "stam") return Arch::kStam;
  if (s == "stam_lite") return Arch::kStamLite;
  if (s == "enc_dec") return Arch::kEncDec;
  if (s == "lstm_att") return Arch::kLstmAtt;
  if (s == "da_rnn") return Arch::kDaRnn;
  throw ConfigError("unknown arch '" + s + "' (expected stam|stam_lite|enc_dec|lstm_att|da_rnn)");
}

/// Dimensions and architecture choice for one model instance.
///   n_vars     N  input variables per time step
///   input_len  Tx input window length
///   output_len Ty forecast horizon
///   enc_dim    m  encoder state / embedding width
///   dec_dim    p  decoder state width
///   ctx_dim    q  reduced context width fed to the decoder LSTMs
struct ModelConfig {
  int n_vars = 1;
  int input_len = 1;
  int output_len = 1;
  int enc_dim = 32;
  int dec_dim = 32;
  int ctx_dim = 4;
  double dropout_rate = 0.0;
  Arch arch = Arch::kStam;
  uint64_t seed = 0;
  bool per_var_embed = false;  // one embedder per variable instead of shared weights

  /// Throws ConfigError naming every offending field at once.
  void validate() const {
    std::vector<std::string> bad;
    if (n_vars < 1) bad.push_back("n_vars must be >= 1");
    if (input_len < 1) bad.push_back("input_len must be >= 1");
    if (output_len < 1) bad.push_back("output_len must be >= 1");
    if (enc_dim < 1) bad.push_back("enc_dim must be >= 1");
    if (dec_dim < 1) bad.push_back("dec_dim must be >= 1");
    if (ctx_dim < 1) bad.push_back("ctx_dim must be >= 1");
    if (ctx_dim > enc_dim) bad.push_back("ctx_dim must not exceed enc_dim");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0) bad.push_back("dropout_rate must lie in [0,1)");
    if (!bad.empty()) {
      std::string msg = "invalid model config:";
      for (const auto& b : bad) msg += " " + b + ";";
      throw ConfigError(msg);
    }
  }
};

}  // namespace stam
