// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <vector>

#include "stam/data/csv.hpp"

namespace stam {

/// Per-column standardization fitted on training rows only and applied
/// unchanged to validation/test (no statistics leakage). Constant columns
/// are rejected — they cannot be scaled and carry no signal.
struct StandardScaler {
  std::vector<double> mean, std_dev;

  static StandardScaler fit(const RawSeries& train) {
    if (train.n_rows < 1) throw DataError("scaler: cannot fit on an empty series");
    StandardScaler s;
    s.mean.resize(static_cast<size_t>(train.n_cols));
    s.std_dev.resize(static_cast<size_t>(train.n_cols));
    for (int c = 0; c < train.n_cols; ++c) {
      double acc = 0.0;
      for (int r = 0; r < train.n_rows; ++r) acc += train.at(r, c);
      const double mu = acc / train.n_rows;
      double var = 0.0;
      for (int r = 0; r < train.n_rows; ++r) {
        const double d = train.at(r, c) - mu;
        var += d * d;
      }
      const double sd = std::sqrt(var / train.n_rows);
      if (sd < 1e-12)
        throw DataError("scaler: column '" + train.columns[static_cast<size_t>(c)] +
                        "' is constant on the training split");
      s.mean[static_cast<size_t>(c)] = mu;
      s.std_dev[static_cast<size_t>(c)] = sd;
    }
    return s;
  }

  void apply_in_place(RawSeries& series) const {
    if (static_cast<size_t>(series.n_cols) != mean.size())
      throw DataError("scaler: fitted on " + std::to_string(mean.size()) + " columns, applied to " +
                      std::to_string(series.n_cols));
    for (int r = 0; r < series.n_rows; ++r)
      for (int c = 0; c < series.n_cols; ++c)
        series.at(r, c) = (series.at(r, c) - mean[static_cast<size_t>(c)]) /
                          std_dev[static_cast<size_t>(c)];
  }

  RawSeries transform(const RawSeries& series) const {
    RawSeries out = series;
    apply_in_place(out);
    return out;
  }

  double inverse(double v, int col) const {
    return v * std_dev[static_cast<size_t>(col)] + mean[static_cast<size_t>(col)];
  }
};

}  // namespace stam
