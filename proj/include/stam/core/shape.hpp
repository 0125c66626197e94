// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "stam/core/error.hpp"

namespace stam {

/// Dense array extents. Rank 1 (vectors) and rank 2 (row-major matrices)
/// cover everything this library computes with. Every extent is >= 1.
class Shape {
 public:
  Shape() = default;

  static Shape vec(int n) { return Shape(n); }
  static Shape mat(int r, int c) { return Shape(r, c); }

  explicit Shape(int n) : dims_{n, 1}, rank_(1) {
    if (n < 1) throw ShapeError("Shape: extent must be >= 1, got " + std::to_string(n));
  }
  Shape(int r, int c) : dims_{r, c}, rank_(2) {
    if (r < 1 || c < 1)
      throw ShapeError("Shape: extents must be >= 1, got " + std::to_string(r) + "x" +
                       std::to_string(c));
  }

  int rank() const { return rank_; }
  int dim(int i) const { return dims_[static_cast<size_t>(i)]; }
  /// Rows of a matrix; a vector counts as a single row.
  int rows() const { return rank_ == 2 ? dims_[0] : 1; }
  /// Columns of a matrix, or the length of a vector.
  int cols() const { return rank_ == 2 ? dims_[1] : dims_[0]; }
  int64_t count() const { return rank_ == 0 ? 0 : int64_t{dims_[0]} * (rank_ == 2 ? dims_[1] : 1); }

  bool operator==(const Shape& o) const { return rank_ == o.rank_ && dims_ == o.dims_; }
  bool operator!=(const Shape& o) const { return !(*this == o); }

  std::string str() const {
    if (rank_ == 0) return "[]";
    if (rank_ == 1) return "[" + std::to_string(dims_[0]) + "]";
    return "[" + std::to_string(dims_[0]) + "x" + std::to_string(dims_[1]) + "]";
  }

 private:
  std::array<int, 2> dims_{0, 0};
  int rank_ = 0;
};

}  // namespace stam
