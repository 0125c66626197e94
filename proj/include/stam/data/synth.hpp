// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>
#include <string>
#include <vector>

#include "stam/data/csv.hpp"

namespace stam {

/// Synthetic series with planted relevance: every driver variable x^i is an
/// independent AR(1) with unit marginal variance, and the target column y is
/// a fixed weighted sum of the planted drivers at a known lag plus Gaussian
/// noise. Because the ground truth is known, attention interpretability can
/// be tested falsifiably instead of narratively.
struct SynthSpec {
  int n_vars = 8;
  int64_t length = 10000;
  std::vector<int> relevant = {0, 1};
  int lag = 1;
  double noise_std = 0.1;
  uint64_t seed = 0;
  double ar_coeff = 0.8;
  std::vector<double> weights;  // empty -> defaults 1.0, 0.8, 0.6, ... per planted var

  void validate() const {
    std::vector<std::string> bad;
    if (n_vars < 1) bad.push_back("n_vars must be >= 1");
    if (length < 2) bad.push_back("length must be >= 2");
    if (relevant.empty()) bad.push_back("relevant set must be nonempty");
    for (int i : relevant)
      if (i < 0 || i >= n_vars) bad.push_back("relevant index " + std::to_string(i) + " out of range");
    if (lag < 1) bad.push_back("lag must be >= 1");
    if (noise_std < 0.0) bad.push_back("noise_std must be >= 0");
    if (ar_coeff <= -1.0 || ar_coeff >= 1.0) bad.push_back("ar_coeff must lie in (-1,1)");
    if (!weights.empty() && weights.size() != relevant.size())
      bad.push_back("weights length must match relevant set");
    if (!bad.empty()) {
      std::string msg = "invalid synth spec:";
      for (const auto& b : bad) msg += " " + b + ";";
      throw ConfigError(msg);
    }
  }

  std::vector<double> effective_weights() const {
    if (!weights.empty()) return weights;
    std::vector<double> w(relevant.size());
    for (size_t k = 0; k < w.size(); ++k) w[k] = 1.0 - 0.2 * static_cast<double>(k % 5);
    return w;
  }
};

/// Columns are x0..x{n-1} plus the target column y; the schema marks only
/// the drivers as inputs, so the model sees N = n_vars variables.
inline RawSeries synth_generate(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = spec.n_vars;
  const int64_t len = spec.length;

  std::vector<std::vector<double>> x(static_cast<size_t>(n));
  const double phi = spec.ar_coeff;
  const double innov = std::sqrt(1.0 - phi * phi);  // keeps marginal variance at 1
  for (int i = 0; i < n; ++i) {
    auto& xi = x[static_cast<size_t>(i)];
    xi.resize(static_cast<size_t>(len));
    xi[0] = gauss(rng);
    for (int64_t t = 1; t < len; ++t) xi[static_cast<size_t>(t)] = phi * xi[static_cast<size_t>(t - 1)] + innov * gauss(rng);
  }

  const std::vector<double> w = spec.effective_weights();
  std::vector<double> y(static_cast<size_t>(len), 0.0);
  for (int64_t t = 0; t < len; ++t) {
    double signal = 0.0;
    if (t >= spec.lag) {
      for (size_t k = 0; k < spec.relevant.size(); ++k)
        signal += w[k] * x[static_cast<size_t>(spec.relevant[k])][static_cast<size_t>(t - spec.lag)];
    }
    y[static_cast<size_t>(t)] = signal + (spec.noise_std > 0.0 ? spec.noise_std * gauss(rng) : 0.0);
  }

  RawSeries out;
  out.n_rows = static_cast<int>(len);
  out.n_cols = n + 1;
  for (int i = 0; i < n; ++i) out.columns.push_back("x" + std::to_string(i));
  out.columns.push_back("y");
  out.target_col = n;
  for (int i = 0; i < n; ++i) out.input_cols.push_back(i);
  out.data.resize(static_cast<size_t>(len) * (n + 1));
  for (int64_t t = 0; t < len; ++t) {
    for (int i = 0; i < n; ++i)
      out.data[static_cast<size_t>(t) * (n + 1) + i] = x[static_cast<size_t>(i)][static_cast<size_t>(t)];
    out.data[static_cast<size_t>(t) * (n + 1) + n] = y[static_cast<size_t>(t)];
  }
  return out;
}

}  // namespace stam
