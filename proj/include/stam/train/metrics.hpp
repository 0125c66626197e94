// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <span>

#include "stam/core/error.hpp"

namespace stam {

/// Pooled regression metrics. r2 = 1 - SS_res/SS_tot with SS_tot taken
/// around the mean of the evaluated targets themselves.
struct Metrics {
  double rmse = 0.0;
  double mae = 0.0;
  double r2 = 0.0;
  int64_t count = 0;
};

inline Metrics compute_metrics(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size() || pred.empty())
    throw ContractError("metrics: " + std::to_string(pred.size()) + " predictions vs " +
                        std::to_string(target.size()) + " targets");
  const auto n = static_cast<double>(pred.size());
  double t_mean = 0.0;
  for (double t : target) t_mean += t;
  t_mean /= n;
  double ss_res = 0.0, abs_sum = 0.0, ss_tot = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    ss_res += d * d;
    abs_sum += std::fabs(d);
    const double c = target[i] - t_mean;
    ss_tot += c * c;
  }
  if (ss_tot <= 0.0)
    throw DataError("metrics: target variance is zero, R^2 is undefined");
  Metrics m;
  m.rmse = std::sqrt(ss_res / n);
  m.mae = abs_sum / n;
  m.r2 = 1.0 - ss_res / ss_tot;
  m.count = static_cast<int64_t>(pred.size());
  return m;
}

}  // namespace stam
