// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <chrono>
#include <ostream>
#include <random>

#include "stam/train/adam.hpp"
#include "stam/train/evaluate.hpp"
#include "stam/train/loss.hpp"

namespace stam {

struct EpochLog {
  int epoch = 0;          // 1-based
  double train_loss = 0;  // mean per-window MSE over the epoch (standardized units)
  Metrics val;            // original units
  double seconds = 0;
};

struct FitResult {
  std::vector<EpochLog> epochs;
};

inline void write_log_line(std::ostream& os, const EpochLog& e) {
  os << "{\"epoch\":" << e.epoch << ",\"train_loss\":" << e.train_loss
     << ",\"val_rmse\":" << e.val.rmse << ",\"val_mae\":" << e.val.mae
     << ",\"val_r2\":" << e.val.r2 << ",\"seconds\":" << e.seconds << "}\n";
}

/// MSE training loop: seeded shuffle, mini-batches (last partial batch
/// kept), batched forward in train mode, backward, Adam, zero grads. Runs
/// the fixed epoch count with no early stopping; validation metrics are
/// logged every epoch but never drive model selection — the final-epoch
/// weights are the result. Shuffling and dropout draw from independent
/// streams derived from cfg.seed, so disabling one cannot shift the other.
inline FitResult fit(SequenceModel& model, const WindowedDataset& train,
                     const WindowedDataset& val, const TrainConfig& cfg,
                     std::ostream* log_jsonl = nullptr) {
  cfg.validate();
  if (train.size() == 0 || val.size() == 0) throw DataError("fit: empty train or val dataset");
  std::mt19937_64 shuffle_rng = make_rng(cfg.seed, RngStream::kShuffle);
  std::mt19937_64 dropout_rng = make_rng(cfg.seed, RngStream::kDropout);
  AdamState adam(model.params());
  std::vector<int64_t> order(static_cast<size_t>(train.size()));
  std::iota(order.begin(), order.end(), 0);

  FitResult result;
  Graph g;
  model.zero_grad();
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.shuffle) std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    for (int64_t first = 0; first < train.size(); first += cfg.batch_size) {
      const int64_t last = std::min<int64_t>(first + cfg.batch_size, train.size());
      const std::span<const int64_t> idx(order.data() + first, static_cast<size_t>(last - first));
      g.clear();
      BatchForward bf = model.build(g, train.gather(idx), Mode::kTrain, dropout_rng);
      Var loss = mse_loss(g, bf.pred, g.constant(train.gather_targets(idx)));
      const double loss_value = g.scalar(loss);
      if (!std::isfinite(loss_value))
        throw DivergedError("fit: non-finite loss in epoch " + std::to_string(epoch), epoch);
      loss_sum += loss_value * static_cast<double>(idx.size());
      g.backward(loss);
      adam.step(model.params(), cfg);
      model.zero_grad();
    }
    EpochLog log;
    log.epoch = epoch;
    log.train_loss = loss_sum / static_cast<double>(train.size());
    log.val = evaluate(model, val, cfg.batch_size);
    log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (log_jsonl) write_log_line(*log_jsonl, log);
    result.epochs.push_back(log);
  }
  return result;
}

}  // namespace stam
