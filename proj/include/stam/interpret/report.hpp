// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "stam/models/model.hpp"

namespace stam {

/// Dataset-level spatial attention distribution: each variable's mean weight
/// over all windows and attention steps, as a percentage of 100.
struct SpatialReport {
  std::vector<std::string> names;
  std::vector<double> mean_pct;
  std::vector<double> std_pct;  // spread of the per-(window,step) weights
  int64_t windows = 0;
  int64_t rows = 0;  // total attention rows aggregated
};

struct TemporalReport {
  std::vector<double> mean_pct;  // one entry per input step 1..Tx
  int64_t windows = 0;
  int64_t rows = 0;
};

/// Uniform mean over every spatial attention row of every record. For the
/// decoder-attention models that averages over output steps; DA-RNN records
/// carry one row per input step and aggregate over those instead.
inline SpatialReport aggregate_spatial(std::span<const AttentionRecord> records,
                                       std::span<const std::string> names) {
  if (records.empty()) throw DataError("aggregate_spatial: no records");
  const int n = records[0].n_vars;
  if (static_cast<int>(names.size()) != n)
    throw DataError("aggregate_spatial: " + std::to_string(names.size()) + " names for " +
                    std::to_string(n) + " variables");
  SpatialReport rep;
  rep.names.assign(names.begin(), names.end());
  rep.windows = static_cast<int64_t>(records.size());
  std::vector<double> sum(static_cast<size_t>(n), 0.0), sum_sq(static_cast<size_t>(n), 0.0);
  for (const auto& rec : records) {
    if (rec.n_vars != n) throw DataError("aggregate_spatial: records disagree on variable count");
    if (rec.spatial_rows == 0)
      throw DataError("aggregate_spatial: record carries no spatial attention");
    for (int r = 0; r < rec.spatial_rows; ++r)
      for (int i = 0; i < n; ++i) {
        const double w = rec.spatial_at(r, i);
        sum[static_cast<size_t>(i)] += w;
        sum_sq[static_cast<size_t>(i)] += w * w;
      }
    rep.rows += rec.spatial_rows;
  }
  const double inv = 1.0 / static_cast<double>(rep.rows);
  for (int i = 0; i < n; ++i) {
    const double mu = sum[static_cast<size_t>(i)] * inv;
    const double var = std::max(0.0, sum_sq[static_cast<size_t>(i)] * inv - mu * mu);
    rep.mean_pct.push_back(mu * 100.0);
    rep.std_pct.push_back(std::sqrt(var) * 100.0);
  }
  return rep;
}

inline TemporalReport aggregate_temporal(std::span<const AttentionRecord> records) {
  if (records.empty()) throw DataError("aggregate_temporal: no records");
  const int tx = records[0].input_len;
  TemporalReport rep;
  rep.windows = static_cast<int64_t>(records.size());
  std::vector<double> sum(static_cast<size_t>(tx), 0.0);
  for (const auto& rec : records) {
    if (rec.input_len != tx) throw DataError("aggregate_temporal: records disagree on input length");
    if (rec.temporal_rows == 0)
      throw DataError("aggregate_temporal: record carries no temporal attention");
    for (int r = 0; r < rec.temporal_rows; ++r)
      for (int t = 0; t < tx; ++t) sum[static_cast<size_t>(t)] += rec.temporal_at(r, t);
    rep.rows += rec.temporal_rows;
  }
  for (int t = 0; t < tx; ++t)
    rep.mean_pct.push_back(sum[static_cast<size_t>(t)] / static_cast<double>(rep.rows) * 100.0);
  return rep;
}

enum class ReportFormat { kJson, kCsv };

namespace detail {

inline std::vector<int> rank_desc(const std::vector<double>& v) {
  std::vector<int> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return v[static_cast<size_t>(a)] > v[static_cast<size_t>(b)];
  });
  std::vector<int> rank(v.size());
  for (size_t pos = 0; pos < order.size(); ++pos)
    rank[static_cast<size_t>(order[pos])] = static_cast<int>(pos) + 1;
  return rank;
}

}  // namespace detail

inline nlohmann::json report_to_json(const SpatialReport& spatial, const TemporalReport& temporal) {
  nlohmann::json j;
  const std::vector<int> rank = detail::rank_desc(spatial.mean_pct);
  nlohmann::json vars = nlohmann::json::array();
  for (size_t i = 0; i < spatial.names.size(); ++i)
    vars.push_back({{"name", spatial.names[i]},
                    {"mean_pct", spatial.mean_pct[i]},
                    {"std_pct", spatial.std_pct[i]},
                    {"rank", rank[i]}});
  j["spatial"] = {{"variables", vars}, {"windows", spatial.windows}, {"rows", spatial.rows}};
  nlohmann::json steps = nlohmann::json::array();
  for (size_t t = 0; t < temporal.mean_pct.size(); ++t)
    steps.push_back({{"step", static_cast<int>(t) + 1}, {"mean_pct", temporal.mean_pct[t]}});
  j["temporal"] = {{"steps", steps}, {"windows", temporal.windows}, {"rows", temporal.rows}};
  return j;
}

inline std::pair<SpatialReport, TemporalReport> report_from_json(const nlohmann::json& j) {
  SpatialReport s;
  for (const auto& v : j.at("spatial").at("variables")) {
    s.names.push_back(v.at("name").get<std::string>());
    s.mean_pct.push_back(v.at("mean_pct").get<double>());
    s.std_pct.push_back(v.at("std_pct").get<double>());
  }
  s.windows = j.at("spatial").at("windows").get<int64_t>();
  s.rows = j.at("spatial").at("rows").get<int64_t>();
  TemporalReport t;
  for (const auto& v : j.at("temporal").at("steps"))
    t.mean_pct.push_back(v.at("mean_pct").get<double>());
  t.windows = j.at("temporal").at("windows").get<int64_t>();
  t.rows = j.at("temporal").at("rows").get<int64_t>();
  return {s, t};
}

/// Writes the reports with stable key/column order (variables in dataset
/// order plus a rank field). JSON puts both reports in one file; CSV writes
/// the spatial table to `path` and the temporal table next to it with a
/// `_temporal` suffix, both plot-ready.
inline void export_report(const SpatialReport& spatial, const TemporalReport& temporal,
                          const std::string& path, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    std::ofstream out(path);
    if (!out) throw IoError("export_report: cannot write '" + path + "'");
    out << report_to_json(spatial, temporal).dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("export_report: cannot write '" + path + "'");
  const std::vector<int> rank = detail::rank_desc(spatial.mean_pct);
  out << "variable,mean_pct,std_pct,rank\n";
  out.precision(12);
  for (size_t i = 0; i < spatial.names.size(); ++i)
    out << spatial.names[i] << "," << spatial.mean_pct[i] << "," << spatial.std_pct[i] << ","
        << rank[i] << "\n";
  const auto dot = path.rfind('.');
  const std::string temporal_path = dot == std::string::npos
                                        ? path + "_temporal"
                                        : path.substr(0, dot) + "_temporal" + path.substr(dot);
  std::ofstream out_t(temporal_path);
  if (!out_t) throw IoError("export_report: cannot write '" + temporal_path + "'");
  out_t << "step,mean_pct\n";
  out_t.precision(12);
  for (size_t t = 0; t < temporal.mean_pct.size(); ++t)
    out_t << (t + 1) << "," << temporal.mean_pct[t] << "\n";
}

}  // namespace stam
