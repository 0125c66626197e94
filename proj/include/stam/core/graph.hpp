// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "stam/core/tensor.hpp"

namespace stam {

/// Handle to a node on a Graph. Cheap to copy; only meaningful together
/// with the Graph that produced it.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

namespace detail {

enum class Op : uint8_t {
  kConst,
  kLeaf,
  kAdd,
  kSub,
  kMul,
  kTanh,
  kSigmoid,
  kRelu,
  kExp,
  kMatmul,
  kLinear,
  kConcat,
  kSoftmax,
  kRowScale,
  kSliceCols,
  kSum,
  kScale,
};

// C[r x c] (+)= A[r x k] * B[k x c], all row-major.
inline void gemm_nn(int r, int k, int c, const double* A, const double* B, double* C) {
  for (int i = 0; i < r; ++i) {
    const double* a = A + static_cast<size_t>(i) * k;
    double* ci = C + static_cast<size_t>(i) * c;
    for (int kk = 0; kk < k; ++kk) {
      const double av = a[kk];
      if (av == 0.0) continue;
      const double* b = B + static_cast<size_t>(kk) * c;
      for (int j = 0; j < c; ++j) ci[j] += av * b[j];
    }
  }
}

// C[r x c] (+)= A[r x k] * B^T, B stored [c x k] row-major.
inline void gemm_nt(int r, int k, int c, const double* A, const double* B, double* C) {
  for (int i = 0; i < r; ++i) {
    const double* a = A + static_cast<size_t>(i) * k;
    double* ci = C + static_cast<size_t>(i) * c;
    for (int j = 0; j < c; ++j) {
      const double* b = B + static_cast<size_t>(j) * k;
      double acc = 0.0;
      for (int kk = 0; kk < k; ++kk) acc += a[kk] * b[kk];
      ci[j] += acc;
    }
  }
}

// C[k x c] (+)= A^T * B, A stored [r x k], B stored [r x c] row-major.
inline void gemm_tn(int r, int k, int c, const double* A, const double* B, double* C) {
  for (int i = 0; i < r; ++i) {
    const double* a = A + static_cast<size_t>(i) * k;
    const double* b = B + static_cast<size_t>(i) * c;
    for (int kk = 0; kk < k; ++kk) {
      const double av = a[kk];
      if (av == 0.0) continue;
      double* ck = C + static_cast<size_t>(kk) * c;
      for (int j = 0; j < c; ++j) ck[j] += av * b[j];
    }
  }
}

inline double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace detail

/// Define-by-run reverse-mode differentiation tape.
///
/// Nodes are appended in evaluation order and evaluated eagerly; node values
/// live in a single arena that is recycled across forward passes via clear().
/// backward() walks the tape in exact reverse append order and accumulates
/// d(root)/d(leaf) into each bound parameter Tensor's `grad` (additively, so
/// a second backward call without zeroing the parameters accumulates).
///
/// A Graph and its nodes form a single-writer unit: build, read and
/// differentiate from one thread at a time.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // ---- leaves -------------------------------------------------------------

  /// Constant input (no gradient tracked).
  Var constant(Shape s, std::span<const double> v) {
    if (static_cast<int64_t>(v.size()) != s.count())
      throw ShapeError("constant: " + std::to_string(v.size()) + " values for shape " + s.str());
    Var out = append(detail::Op::kConst, s, false, {});
    std::copy(v.begin(), v.end(), val(out.id));
    return out;
  }
  Var constant(const Tensor& t) { return constant(t.shape, t.values); }
  Var zeros(Shape s) { return append(detail::Op::kConst, s, false, {}); }

  /// Differentiable leaf bound to an external parameter Tensor. The same
  /// Tensor always maps to the same node within one graph, so shared weights
  /// accumulate one combined gradient.
  Var leaf(Tensor& t) {
    auto it = leaf_ids_.find(&t);
    if (it != leaf_ids_.end()) return Var{it->second};
    Var out = append(detail::Op::kLeaf, t.shape, t.requires_grad, {});
    std::copy(t.values.begin(), t.values.end(), val(out.id));
    nodes_[static_cast<size_t>(out.id)].ext = &t;
    leaf_ids_.emplace(&t, out.id);
    return out;
  }

  // ---- elementwise --------------------------------------------------------

  /// Binary elementwise ops require equal shapes, except that either operand
  /// may be a single element, which broadcasts against the other.
  Var add(Var a, Var b) { return binary(detail::Op::kAdd, a, b); }
  Var sub(Var a, Var b) { return binary(detail::Op::kSub, a, b); }
  Var mul(Var a, Var b) { return binary(detail::Op::kMul, a, b); }

  Var tanh(Var a) { return unary(detail::Op::kTanh, a); }
  Var sigmoid(Var a) { return unary(detail::Op::kSigmoid, a); }
  Var relu(Var a) { return unary(detail::Op::kRelu, a); }
  Var exp(Var a) { return unary(detail::Op::kExp, a); }

  /// out = a * k for a compile-time-known constant k.
  Var scale(Var a, double k) {
    Var out = append(detail::Op::kScale, shape(a), needs_grad(a), {a.id});
    node(out).k = k;
    const double* x = val(a.id);
    double* y = val(out.id);
    for (int64_t i = 0, n = shape(a).count(); i < n; ++i) y[i] = x[i] * k;
    return out;
  }

  // ---- linear algebra -----------------------------------------------------

  /// Standard matrix product [r x k] * [k x c] -> [r x c].
  Var matmul(Var a, Var b) {
    const Shape sa = shape(a), sb = shape(b);
    if (sa.rank() != 2 || sb.rank() != 2 || sa.cols() != sb.rows())
      throw ShapeError("matmul: incompatible shapes " + sa.str() + " and " + sb.str());
    Var out = append(detail::Op::kMatmul, Shape::mat(sa.rows(), sb.cols()), needs_grad(a) || needs_grad(b),
                     {a.id, b.id});
    detail::gemm_nn(sa.rows(), sa.cols(), sb.cols(), val(a.id), val(b.id), val(out.id));
    return out;
  }

  /// Affine map y = x * W^T + b with x:[B x in], W:[out x in], b:[out].
  Var linear(Var x, Var W, Var b) {
    const Shape sx = shape(x), sw = shape(W), sb = shape(b);
    if (sx.rank() != 2 || sw.rank() != 2 || sx.cols() != sw.cols())
      throw ShapeError("linear: input " + sx.str() + " does not match weight " + sw.str());
    if (sb.rank() != 1 || sb.cols() != sw.rows())
      throw ShapeError("linear: bias " + sb.str() + " does not match weight " + sw.str());
    Var out = append(detail::Op::kLinear, Shape::mat(sx.rows(), sw.rows()),
                     needs_grad(x) || needs_grad(W) || needs_grad(b), {x.id, W.id, b.id});
    const int B = sx.rows(), in = sx.cols(), o = sw.rows();
    const double* bias = val(b.id);
    double* y = val(out.id);
    for (int i = 0; i < B; ++i)
      for (int j = 0; j < o; ++j) y[static_cast<size_t>(i) * o + j] = bias[j];
    detail::gemm_nt(B, in, o, val(x.id), val(W.id), y);
    return out;
  }

  // ---- shape manipulation -------------------------------------------------

  /// Concatenation. Rank-1 inputs join end to end; rank-2 inputs must share
  /// a row count and join column-wise (each row concatenated independently).
  Var concat(std::span<const Var> parts) {
    if (parts.empty()) throw ContractError("concat: needs at least one input");
    const int rank = shape(parts[0]).rank();
    int rows = shape(parts[0]).rows(), total = 0;
    bool req = false;
    std::vector<int> in;
    in.reserve(parts.size());
    for (Var p : parts) {
      const Shape s = shape(p);
      if (s.rank() != rank || (rank == 2 && s.rows() != rows))
        throw ShapeError("concat: mismatched part " + s.str() + " vs " + shape(parts[0]).str());
      total += s.cols();
      req = req || needs_grad(p);
      in.push_back(p.id);
    }
    const Shape out_shape = rank == 1 ? Shape::vec(total) : Shape::mat(rows, total);
    Var out = append(detail::Op::kConcat, out_shape, req, std::move(in));
    double* y = val(out.id);
    int col = 0;
    for (Var p : parts) {
      const int c = shape(p).cols();
      const double* x = val(p.id);
      for (int r = 0; r < rows; ++r)
        std::copy(x + static_cast<size_t>(r) * c, x + static_cast<size_t>(r + 1) * c,
                  y + static_cast<size_t>(r) * total + col);
      col += c;
    }
    return out;
  }
  Var concat(Var a, Var b) {
    const Var parts[2] = {a, b};
    return concat(std::span<const Var>(parts, 2));
  }

  /// Column slice [c0, c1) of a rank-2 tensor.
  Var slice_cols(Var a, int c0, int c1) {
    const Shape s = shape(a);
    if (s.rank() != 2 || c0 < 0 || c1 > s.cols() || c0 >= c1)
      throw ContractError("slice_cols: [" + std::to_string(c0) + "," + std::to_string(c1) +
                          ") out of range for " + s.str());
    Var out = append(detail::Op::kSliceCols, Shape::mat(s.rows(), c1 - c0), needs_grad(a), {a.id});
    node(out).a0 = c0;
    node(out).a1 = c1;
    const double* x = val(a.id);
    double* y = val(out.id);
    const int c = s.cols(), w = c1 - c0;
    for (int r = 0; r < s.rows(); ++r)
      std::copy(x + static_cast<size_t>(r) * c + c0, x + static_cast<size_t>(r) * c + c1,
                y + static_cast<size_t>(r) * w);
    return out;
  }

  // ---- reductions and normalization ---------------------------------------

  /// Numerically stable softmax over the last dimension (whole vector for
  /// rank 1, each row independently for rank 2). Outputs are positive and
  /// each row sums to 1.
  Var softmax(Var a) {
    const Shape s = shape(a);
    Var out = append(detail::Op::kSoftmax, s, needs_grad(a), {a.id});
    const int rows = s.rows(), c = s.cols();
    const double* x = val(a.id);
    double* y = val(out.id);
    for (int r = 0; r < rows; ++r) {
      const double* xr = x + static_cast<size_t>(r) * c;
      double* yr = y + static_cast<size_t>(r) * c;
      double mx = xr[0];
      for (int j = 1; j < c; ++j) mx = std::max(mx, xr[j]);
      double sum = 0.0;
      for (int j = 0; j < c; ++j) {
        yr[j] = std::exp(xr[j] - mx);
        sum += yr[j];
      }
      const double inv = 1.0 / sum;
      for (int j = 0; j < c; ++j) yr[j] *= inv;
    }
    return out;
  }

  /// Scales every row of a:[B x m] by the matching entry of s:[B x 1].
  Var row_scale(Var a, Var s) {
    const Shape sa = shape(a), ss = shape(s);
    if (sa.rank() != 2 || ss.rank() != 2 || ss.cols() != 1 || ss.rows() != sa.rows())
      throw ShapeError("row_scale: " + sa.str() + " with scales " + ss.str());
    Var out = append(detail::Op::kRowScale, sa, needs_grad(a) || needs_grad(s), {a.id, s.id});
    const int rows = sa.rows(), c = sa.cols();
    const double* x = val(a.id);
    const double* sc = val(s.id);
    double* y = val(out.id);
    for (int r = 0; r < rows; ++r) {
      const double k = sc[r];
      for (int j = 0; j < c; ++j)
        y[static_cast<size_t>(r) * c + j] = x[static_cast<size_t>(r) * c + j] * k;
    }
    return out;
  }

  /// Sum of all entries, as a length-1 vector.
  Var sum(Var a) {
    Var out = append(detail::Op::kSum, Shape::vec(1), needs_grad(a), {a.id});
    const double* x = val(a.id);
    double acc = 0.0;
    for (int64_t i = 0, n = shape(a).count(); i < n; ++i) acc += x[i];
    *val(out.id) = acc;
    return out;
  }

  // ---- access ---------------------------------------------------------

  Shape shape(Var v) const { return nodes_[check(v)].shape; }
  std::span<const double> values(Var v) const {
    const Node& n = nodes_[check(v)];
    return {vals_.data() + n.off, static_cast<size_t>(n.shape.count())};
  }
  double scalar(Var v) const {
    if (shape(v).count() != 1) throw ContractError("scalar: node has shape " + shape(v).str());
    return values(v)[0];
  }
  Tensor tensor(Var v) const {
    auto sp = values(v);
    return Tensor(shape(v), std::vector<double>(sp.begin(), sp.end()));
  }
  size_t node_count() const { return nodes_.size(); }

  // ---- differentiation ------------------------------------------------

  /// Reverse sweep from a scalar root. Every reachable leaf bound to a
  /// requires_grad Tensor receives += d(root)/d(leaf) into its grad.
  void backward(Var root) {
    if (shape(root).count() != 1)
      throw ContractError("backward: root must be scalar, got " + shape(root).str());
    grads_.assign(vals_.size(), 0.0);
    grads_[nodes_[static_cast<size_t>(root.id)].off] = 1.0;
    for (int id = static_cast<int>(nodes_.size()) - 1; id >= 0; --id) {
      if (nodes_[static_cast<size_t>(id)].requires_grad) backprop(id);
    }
  }

  /// Recycle the tape (keeps arena capacity for the next forward pass).
  void clear() {
    nodes_.clear();
    vals_.clear();
    grads_.clear();
    leaf_ids_.clear();
  }

 private:
  struct Node {
    detail::Op op;
    bool requires_grad = false;
    Shape shape;
    size_t off = 0;  // offset into vals_ / grads_
    std::vector<int> in;
    Tensor* ext = nullptr;  // kLeaf binding
    double k = 0.0;         // kScale factor
    int a0 = 0, a1 = 0;     // kSliceCols bounds
  };

  std::vector<Node> nodes_;
  std::vector<double> vals_;
  std::vector<double> grads_;
  std::unordered_map<const Tensor*, int> leaf_ids_;

  size_t check(Var v) const {
    if (!v.valid() || static_cast<size_t>(v.id) >= nodes_.size())
      throw ContractError("Var does not belong to this graph");
    return static_cast<size_t>(v.id);
  }
  Node& node(Var v) { return nodes_[check(v)]; }
  bool needs_grad(Var v) const { return nodes_[check(v)].requires_grad; }

  double* val(int id) { return vals_.data() + nodes_[static_cast<size_t>(id)].off; }
  const double* val(int id) const { return vals_.data() + nodes_[static_cast<size_t>(id)].off; }
  double* grd(int id) { return grads_.data() + nodes_[static_cast<size_t>(id)].off; }

  Var append(detail::Op op, Shape s, bool req, std::vector<int> in) {
    Node n;
    n.op = op;
    n.requires_grad = req;
    n.shape = s;
    n.off = vals_.size();
    n.in = std::move(in);
    vals_.resize(vals_.size() + static_cast<size_t>(s.count()), 0.0);
    nodes_.push_back(std::move(n));
    return Var{static_cast<int>(nodes_.size()) - 1};
  }

  Var unary(detail::Op op, Var a) {
    Var out = append(op, shape(a), needs_grad(a), {a.id});
    const double* x = val(a.id);
    double* y = val(out.id);
    const int64_t n = shape(a).count();
    switch (op) {
      case detail::Op::kTanh:
        for (int64_t i = 0; i < n; ++i) y[i] = std::tanh(x[i]);
        break;
      case detail::Op::kSigmoid:
        for (int64_t i = 0; i < n; ++i) y[i] = detail::stable_sigmoid(x[i]);
        break;
      case detail::Op::kRelu:
        for (int64_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
        break;
      case detail::Op::kExp:
        for (int64_t i = 0; i < n; ++i) y[i] = std::exp(x[i]);
        break;
      default:
        throw ContractError("unary: bad op");
    }
    return out;
  }

  Var binary(detail::Op op, Var a, Var b) {
    const Shape sa = shape(a), sb = shape(b);
    const bool bcast_a = sa.count() == 1 && sb.count() > 1;
    const bool bcast_b = sb.count() == 1 && sa.count() > 1;
    if (!(sa == sb || bcast_a || bcast_b))
      throw ShapeError("elementwise: mismatched shapes " + sa.str() + " and " + sb.str());
    Var out = append(op, bcast_a ? sb : sa, needs_grad(a) || needs_grad(b), {a.id, b.id});
    const double* xa = val(a.id);
    const double* xb = val(b.id);
    double* y = val(out.id);
    const int64_t n = shape(out).count();
    const int64_t stride_a = bcast_a ? 0 : 1, stride_b = bcast_b ? 0 : 1;
    switch (op) {
      case detail::Op::kAdd:
        for (int64_t i = 0; i < n; ++i) y[i] = xa[i * stride_a] + xb[i * stride_b];
        break;
      case detail::Op::kSub:
        for (int64_t i = 0; i < n; ++i) y[i] = xa[i * stride_a] - xb[i * stride_b];
        break;
      case detail::Op::kMul:
        for (int64_t i = 0; i < n; ++i) y[i] = xa[i * stride_a] * xb[i * stride_b];
        break;
      default:
        throw ContractError("binary: bad op");
    }
    return out;
  }

  void backprop(int id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    const double* gy = grd(id);
    const double* y = val(id);
    const int64_t cnt = n.shape.count();
    switch (n.op) {
      case detail::Op::kConst:
        break;
      case detail::Op::kLeaf:
        if (n.ext && n.ext->requires_grad) {
          n.ext->ensure_grad();
          for (int64_t i = 0; i < cnt; ++i) n.ext->grad[static_cast<size_t>(i)] += gy[i];
        }
        break;
      case detail::Op::kAdd:
      case detail::Op::kSub: {
        const double sign_b = n.op == detail::Op::kSub ? -1.0 : 1.0;
        for (int slot = 0; slot < 2; ++slot) {
          const int src = n.in[static_cast<size_t>(slot)];
          if (!nodes_[static_cast<size_t>(src)].requires_grad) continue;
          double* gx = grd(src);
          const double s = slot == 1 ? sign_b : 1.0;
          if (nodes_[static_cast<size_t>(src)].shape.count() == cnt) {
            for (int64_t i = 0; i < cnt; ++i) gx[i] += s * gy[i];
          } else {  // broadcast scalar operand
            double acc = 0.0;
            for (int64_t i = 0; i < cnt; ++i) acc += gy[i];
            gx[0] += s * acc;
          }
        }
        break;
      }
      case detail::Op::kMul: {
        const int ia = n.in[0], ib = n.in[1];
        const double* xa = val(ia);
        const double* xb = val(ib);
        const bool bcast_a = nodes_[static_cast<size_t>(ia)].shape.count() != cnt;
        const bool bcast_b = nodes_[static_cast<size_t>(ib)].shape.count() != cnt;
        if (nodes_[static_cast<size_t>(ia)].requires_grad) {
          double* ga = grd(ia);
          if (bcast_a) {
            double acc = 0.0;
            for (int64_t i = 0; i < cnt; ++i) acc += gy[i] * xb[bcast_b ? 0 : i];
            ga[0] += acc;
          } else {
            for (int64_t i = 0; i < cnt; ++i) ga[i] += gy[i] * xb[bcast_b ? 0 : i];
          }
        }
        if (nodes_[static_cast<size_t>(ib)].requires_grad) {
          double* gb = grd(ib);
          if (bcast_b) {
            double acc = 0.0;
            for (int64_t i = 0; i < cnt; ++i) acc += gy[i] * xa[bcast_a ? 0 : i];
            gb[0] += acc;
          } else {
            for (int64_t i = 0; i < cnt; ++i) gb[i] += gy[i] * xa[bcast_a ? 0 : i];
          }
        }
        break;
      }
      case detail::Op::kTanh: {
        double* gx = grd(n.in[0]);
        for (int64_t i = 0; i < cnt; ++i) gx[i] += gy[i] * (1.0 - y[i] * y[i]);
        break;
      }
      case detail::Op::kSigmoid: {
        double* gx = grd(n.in[0]);
        for (int64_t i = 0; i < cnt; ++i) gx[i] += gy[i] * y[i] * (1.0 - y[i]);
        break;
      }
      case detail::Op::kRelu: {
        // subgradient at exactly 0 pinned to 0
        const double* x = val(n.in[0]);
        double* gx = grd(n.in[0]);
        for (int64_t i = 0; i < cnt; ++i) gx[i] += x[i] > 0.0 ? gy[i] : 0.0;
        break;
      }
      case detail::Op::kExp: {
        double* gx = grd(n.in[0]);
        for (int64_t i = 0; i < cnt; ++i) gx[i] += gy[i] * y[i];
        break;
      }
      case detail::Op::kMatmul: {
        const int ia = n.in[0], ib = n.in[1];
        const Shape sa = nodes_[static_cast<size_t>(ia)].shape;
        const Shape sb = nodes_[static_cast<size_t>(ib)].shape;
        // dA = dC * B^T ; dB = A^T * dC
        if (nodes_[static_cast<size_t>(ia)].requires_grad)
          detail::gemm_nt(sa.rows(), sb.cols(), sa.cols(), gy, val(ib), grd(ia));
        if (nodes_[static_cast<size_t>(ib)].requires_grad)
          detail::gemm_tn(sa.rows(), sa.cols(), sb.cols(), val(ia), gy, grd(ib));
        break;
      }
      case detail::Op::kLinear: {
        const int ix = n.in[0], iw = n.in[1], ib = n.in[2];
        const Shape sx = nodes_[static_cast<size_t>(ix)].shape;
        const int B = sx.rows(), in_dim = sx.cols(), o = n.shape.cols();
        // dX = dY * W ; dW = dY^T * X ; db = column sums of dY
        if (nodes_[static_cast<size_t>(ix)].requires_grad)
          detail::gemm_nn(B, o, in_dim, gy, val(iw), grd(ix));
        if (nodes_[static_cast<size_t>(iw)].requires_grad)
          detail::gemm_tn(B, o, in_dim, gy, val(ix), grd(iw));
        if (nodes_[static_cast<size_t>(ib)].requires_grad) {
          double* gb = grd(ib);
          for (int r = 0; r < B; ++r)
            for (int j = 0; j < o; ++j) gb[j] += gy[static_cast<size_t>(r) * o + j];
        }
        break;
      }
      case detail::Op::kConcat: {
        const int rows = n.shape.rows(), total = n.shape.cols();
        int col = 0;
        for (int src : n.in) {
          const int c = nodes_[static_cast<size_t>(src)].shape.cols();
          if (nodes_[static_cast<size_t>(src)].requires_grad) {
            double* gx = grd(src);
            for (int r = 0; r < rows; ++r)
              for (int j = 0; j < c; ++j)
                gx[static_cast<size_t>(r) * c + j] += gy[static_cast<size_t>(r) * total + col + j];
          }
          col += c;
        }
        break;
      }
      case detail::Op::kSoftmax: {
        double* gx = grd(n.in[0]);
        const int rows = n.shape.rows(), c = n.shape.cols();
        for (int r = 0; r < rows; ++r) {
          const double* yr = y + static_cast<size_t>(r) * c;
          const double* gr = gy + static_cast<size_t>(r) * c;
          double dot = 0.0;
          for (int j = 0; j < c; ++j) dot += gr[j] * yr[j];
          double* gxr = gx + static_cast<size_t>(r) * c;
          for (int j = 0; j < c; ++j) gxr[j] += (gr[j] - dot) * yr[j];
        }
        break;
      }
      case detail::Op::kRowScale: {
        const int ia = n.in[0], is = n.in[1];
        const int rows = n.shape.rows(), c = n.shape.cols();
        const double* x = val(ia);
        const double* sc = val(is);
        if (nodes_[static_cast<size_t>(ia)].requires_grad) {
          double* ga = grd(ia);
          for (int r = 0; r < rows; ++r)
            for (int j = 0; j < c; ++j)
              ga[static_cast<size_t>(r) * c + j] += gy[static_cast<size_t>(r) * c + j] * sc[r];
        }
        if (nodes_[static_cast<size_t>(is)].requires_grad) {
          double* gs = grd(is);
          for (int r = 0; r < rows; ++r) {
            double acc = 0.0;
            for (int j = 0; j < c; ++j)
              acc += gy[static_cast<size_t>(r) * c + j] * x[static_cast<size_t>(r) * c + j];
            gs[r] += acc;
          }
        }
        break;
      }
      case detail::Op::kSliceCols: {
        const int src = n.in[0];
        const int c = nodes_[static_cast<size_t>(src)].shape.cols();
        const int w = n.shape.cols();
        double* gx = grd(src);
        for (int r = 0; r < n.shape.rows(); ++r)
          for (int j = 0; j < w; ++j)
            gx[static_cast<size_t>(r) * c + n.a0 + j] += gy[static_cast<size_t>(r) * w + j];
        break;
      }
      case detail::Op::kSum: {
        double* gx = grd(n.in[0]);
        const int64_t m = nodes_[static_cast<size_t>(n.in[0])].shape.count();
        for (int64_t i = 0; i < m; ++i) gx[i] += gy[0];
        break;
      }
      case detail::Op::kScale: {
        double* gx = grd(n.in[0]);
        for (int64_t i = 0; i < cnt; ++i) gx[i] += gy[i] * n.k;
        break;
      }
    }
  }
};

}  // namespace stam
