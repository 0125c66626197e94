// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "stam/core/graph.hpp"

namespace stam {

/// Builds a computation on the given graph and returns its scalar root.
/// Must be deterministic: grad_check replays it once per perturbed entry.
using GraphBuilder = std::function<Var(Graph&)>;

struct GradCheckEntry {
  std::string name;
  double max_rel_err = 0.0;
  int64_t worst_index = -1;
  double analytic = 0.0, numeric = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> params;
  double max_rel_err = 0.0;
  double tol = 0.0;
  bool pass = false;
};

namespace detail {

// Relative error with a floor so near-zero gradient pairs compare on an
// absolute scale instead of amplifying finite-difference noise.
inline double rel_err(double a, double n) {
  const double denom = std::max({std::fabs(a), std::fabs(n), 1e-4});
  return std::fabs(a - n) / denom;
}

inline double eval_loss(const GraphBuilder& f) {
  Graph g;
  const double loss = g.scalar(f(g));
  if (!std::isfinite(loss)) throw ContractError("grad_check: builder produced non-finite loss");
  return loss;
}

}  // namespace detail

/// Compares externally supplied analytic gradients against central finite
/// differences of the builder's loss. Parameters are perturbed in place and
/// restored; `analytic[i]` must match params[i] in length.
inline GradCheckReport grad_check_against(const GraphBuilder& f, std::span<Tensor* const> params,
                                          std::span<const std::vector<double>> analytic, double h,
                                          double tol,
                                          std::span<const std::string> names = {}) {
  if (h <= 0.0) throw ContractError("grad_check: step h must be positive");
  GradCheckReport report;
  report.tol = tol;
  for (size_t p = 0; p < params.size(); ++p) {
    Tensor& t = *params[p];
    GradCheckEntry entry;
    entry.name = p < names.size() ? names[p] : "param" + std::to_string(p);
    for (size_t i = 0; i < t.values.size(); ++i) {
      const double saved = t.values[i];
      t.values[i] = saved + h;
      const double plus = detail::eval_loss(f);
      t.values[i] = saved - h;
      const double minus = detail::eval_loss(f);
      t.values[i] = saved;
      const double numeric = (plus - minus) / (2.0 * h);
      const double a = analytic[p][i];
      const double err = detail::rel_err(a, numeric);
      if (err > entry.max_rel_err) {
        entry.max_rel_err = err;
        entry.worst_index = static_cast<int64_t>(i);
        entry.analytic = a;
        entry.numeric = numeric;
      }
    }
    report.max_rel_err = std::max(report.max_rel_err, entry.max_rel_err);
    report.params.push_back(std::move(entry));
  }
  report.pass = report.max_rel_err <= tol;
  return report;
}

/// Full pipeline: runs backward once for the analytic gradients, then checks
/// every entry of every parameter against central differences.
inline GradCheckReport grad_check(const GraphBuilder& f, std::span<Tensor* const> params, double h,
                                  double tol, std::span<const std::string> names = {}) {
  for (Tensor* t : params) {
    t->requires_grad = true;
    t->ensure_grad();
    t->zero_grad();
  }
  {
    Graph g;
    Var root = f(g);
    if (!std::isfinite(g.scalar(root)))
      throw ContractError("grad_check: builder produced non-finite loss");
    g.backward(root);
  }
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (Tensor* t : params) analytic.push_back(t->grad);
  return grad_check_against(f, params, analytic, h, tol, names);
}

}  // namespace stam
