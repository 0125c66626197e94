// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>

#include "stam/models/baselines.hpp"
#include "stam/models/stam.hpp"

namespace stam {

inline std::unique_ptr<SequenceModel> make_model(const ModelConfig& cfg) {
  switch (cfg.arch) {
    case Arch::kStam: return std::make_unique<StamModel>(cfg);
    case Arch::kStamLite: return std::make_unique<StamLiteModel>(cfg);
    case Arch::kEncDec: return std::make_unique<EncDecModel>(cfg);
    case Arch::kLstmAtt: return std::make_unique<LstmAttModel>(cfg);
    case Arch::kDaRnn: return std::make_unique<DaRnnModel>(cfg);
  }
  throw ConfigError("make_model: unknown arch");
}

}  // namespace stam
