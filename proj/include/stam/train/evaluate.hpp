// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <numeric>
#include <vector>

#include "stam/data/windows.hpp"
#include "stam/train/metrics.hpp"

namespace stam {

/// Eval-mode pass over a whole dataset. Predictions and targets come back
/// de-standardized (original target units); attention records are collected
/// per window when asked for. Batching is a throughput detail only — each
/// batch row computes exactly what a single-window forward would.
struct EvalRun {
  std::vector<double> pred;    // size() * Ty, original units
  std::vector<double> target;  // same layout
  std::vector<AttentionRecord> records;
  double seconds = 0.0;
};

inline EvalRun run_eval(SequenceModel& model, const WindowedDataset& ds, bool collect_attn = false,
                        int batch_size = 256) {
  if (ds.size() == 0) throw DataError("evaluate: dataset is empty");
  const auto t0 = std::chrono::steady_clock::now();
  const double mu = ds.target_mean(), sd = ds.target_std();
  EvalRun out;
  out.pred.reserve(static_cast<size_t>(ds.size() * ds.ty));
  out.target.reserve(static_cast<size_t>(ds.size() * ds.ty));
  std::mt19937_64 unused_rng(0);  // eval mode draws nothing
  Graph g;
  std::vector<int64_t> idx;
  for (int64_t first = 0; first < ds.size(); first += batch_size) {
    const int64_t last = std::min<int64_t>(first + batch_size, ds.size());
    idx.resize(static_cast<size_t>(last - first));
    std::iota(idx.begin(), idx.end(), first);
    g.clear();
    BatchForward bf = model.build(g, ds.gather(idx), Mode::kEval, unused_rng);
    auto pred = g.values(bf.pred);
    const Tensor targets = ds.gather_targets(idx);
    for (size_t i = 0; i < pred.size(); ++i) {
      out.pred.push_back(pred[i] * sd + mu);
      out.target.push_back(targets.values[i] * sd + mu);
    }
    if (collect_attn)
      for (int b = 0; b < static_cast<int>(idx.size()); ++b)
        out.records.push_back(model.extract_record(g, bf, b));
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

/// RMSE / MAE / R^2 of a model on a dataset, pooled over every window and
/// output step, in original target units. Pure: the model is unchanged and
/// repeated calls return identical metrics.
inline Metrics evaluate(SequenceModel& model, const WindowedDataset& ds, int batch_size = 256) {
  const EvalRun run = run_eval(model, ds, false, batch_size);
  return compute_metrics(run.pred, run.target);
}

}  // namespace stam
