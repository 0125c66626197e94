// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "stam/data/scaler.hpp"
#include "stam/models/model.hpp"

namespace stam {

/// Sliding-window view over one standardized split. Window i covers source
/// rows [start_i, start_i + Tx) as inputs and the target column at rows
/// [start_i + Tx, start_i + Tx + Ty) as labels. Windows overlap, so the
/// split's matrix is stored once and batches gather from it.
struct WindowedDataset {
  int n_rows = 0, n_cols = 0;
  std::vector<double> data;  // standardized, row-major
  std::vector<int> input_cols;
  int target_col = -1;
  int tx = 0, ty = 0, stride = 1;
  std::vector<int> starts;
  StandardScaler scaler;
  std::vector<std::string> columns;
  std::vector<std::string> input_names;
  std::string source, split_name;

  int64_t size() const { return static_cast<int64_t>(starts.size()); }
  int n_vars() const { return static_cast<int>(input_cols.size()); }

  double at(int r, int c) const { return data[static_cast<size_t>(r) * n_cols + c]; }

  /// Input window of one sample as an [N x Tx] tensor (unit-test convenience).
  Tensor window(int64_t i) const {
    Tensor X(Shape::mat(n_vars(), tx));
    const int s = starts[static_cast<size_t>(i)];
    for (int v = 0; v < n_vars(); ++v)
      for (int t = 0; t < tx; ++t) X.at(v, t) = at(s + t, input_cols[static_cast<size_t>(v)]);
    return X;
  }

  /// Standardized targets of one sample (length Ty).
  std::vector<double> target(int64_t i) const {
    std::vector<double> y(static_cast<size_t>(ty));
    const int s = starts[static_cast<size_t>(i)];
    for (int j = 0; j < ty; ++j) y[static_cast<size_t>(j)] = at(s + tx + j, target_col);
    return y;
  }

  /// Gathers a batch of windows into the layouts the models consume.
  BatchInput gather(std::span<const int64_t> idx) const {
    const int B = static_cast<int>(idx.size()), n = n_vars();
    BatchInput bi;
    bi.batch = B;
    bi.x_t.assign(static_cast<size_t>(tx), Tensor(Shape::mat(B, n)));
    bi.x_var.assign(static_cast<size_t>(n), Tensor(Shape::mat(B, tx)));
    for (int b = 0; b < B; ++b) {
      const int s = starts[static_cast<size_t>(idx[static_cast<size_t>(b)])];
      for (int t = 0; t < tx; ++t)
        for (int v = 0; v < n; ++v) {
          const double x = at(s + t, input_cols[static_cast<size_t>(v)]);
          bi.x_t[static_cast<size_t>(t)].at(b, v) = x;
          bi.x_var[static_cast<size_t>(v)].at(b, t) = x;
        }
    }
    return bi;
  }

  /// Standardized targets of a batch as a [B x Ty] tensor.
  Tensor gather_targets(std::span<const int64_t> idx) const {
    const int B = static_cast<int>(idx.size());
    Tensor y(Shape::mat(B, ty));
    for (int b = 0; b < B; ++b) {
      const int s = starts[static_cast<size_t>(idx[static_cast<size_t>(b)])];
      for (int j = 0; j < ty; ++j) y.at(b, j) = at(s + tx + j, target_col);
    }
    return y;
  }

  double target_mean() const { return scaler.mean[static_cast<size_t>(target_col)]; }
  double target_std() const { return scaler.std_dev[static_cast<size_t>(target_col)]; }
};

/// Builds the window index over an already standardized split.
inline WindowedDataset make_windows(const RawSeries& standardized, const StandardScaler& scaler,
                                    int tx, int ty, int stride = 1,
                                    const std::string& split_name = "",
                                    const std::string& source = "") {
  if (tx < 1 || ty < 1 || stride < 1)
    throw ContractError("make_windows: tx, ty and stride must be >= 1");
  if (standardized.n_rows < tx + ty)
    throw DataError("make_windows: split '" + split_name + "' has " +
                    std::to_string(standardized.n_rows) + " rows, needs at least " +
                    std::to_string(tx + ty) + " for one window");
  WindowedDataset out;
  out.n_rows = standardized.n_rows;
  out.n_cols = standardized.n_cols;
  out.data = standardized.data;
  out.input_cols = standardized.input_cols;
  out.target_col = standardized.target_col;
  out.tx = tx;
  out.ty = ty;
  out.stride = stride;
  out.scaler = scaler;
  out.columns = standardized.columns;
  for (int c : standardized.input_cols)
    out.input_names.push_back(standardized.columns[static_cast<size_t>(c)]);
  out.source = source;
  out.split_name = split_name;
  const int count = (standardized.n_rows - tx - ty) / stride + 1;
  out.starts.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) out.starts.push_back(i * stride);
  return out;
}

}  // namespace stam
