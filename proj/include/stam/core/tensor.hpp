// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "stam/core/shape.hpp"

namespace stam {

/// Dense 64-bit real array. The universal numeric value of the library:
/// model parameters, data windows and cached node outputs are all Tensors.
/// `grad` is empty until a backward pass (or ensure_grad) allocates it and
/// then always matches `values` in length.
struct Tensor {
  Shape shape;
  std::vector<double> values;
  bool requires_grad = false;
  std::vector<double> grad;

  Tensor() = default;
  explicit Tensor(Shape s, double fill = 0.0)
      : shape(s), values(static_cast<size_t>(s.count()), fill) {}
  Tensor(Shape s, std::vector<double> v) : shape(s), values(std::move(v)) {
    if (static_cast<int64_t>(values.size()) != shape.count())
      throw ShapeError("Tensor: " + std::to_string(values.size()) + " values for shape " +
                       shape.str());
  }

  int64_t count() const { return shape.count(); }

  double& at(int i) { return values[static_cast<size_t>(i)]; }
  double at(int i) const { return values[static_cast<size_t>(i)]; }
  double& at(int r, int c) { return values[static_cast<size_t>(r) * shape.cols() + c]; }
  double at(int r, int c) const { return values[static_cast<size_t>(r) * shape.cols() + c]; }

  void ensure_grad() {
    if (grad.size() != values.size()) grad.assign(values.size(), 0.0);
  }
  void zero_grad() {
    std::fill(grad.begin(), grad.end(), 0.0);
  }

  bool all_finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

}  // namespace stam
