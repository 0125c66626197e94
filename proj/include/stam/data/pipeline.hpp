// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>

#include <json.hpp>

#include "stam/data/synth.hpp"
#include "stam/data/windows.hpp"

namespace stam {

/// Where the rows come from: a CSV file with a schema, or the synthetic
/// generator. Split fractions and window stride ride along because they are
/// data decisions, not model ones.
struct DataSpec {
  bool use_synth = false;
  std::string csv_path;
  CsvSchema schema;
  SynthSpec synth;
  std::array<double, 3> split{0.6, 0.2, 0.2};
  int stride = 1;
};

struct DatasetBundle {
  WindowedDataset train, val, test;
  nlohmann::json manifest;  // reproduces the datasets bit-exactly
};

namespace detail {

inline nlohmann::json synth_to_json(const SynthSpec& s) {
  return {{"n_vars", s.n_vars},          {"length", s.length}, {"relevant", s.relevant},
          {"lag", s.lag},                {"noise_std", s.noise_std}, {"seed", s.seed},
          {"ar_coeff", s.ar_coeff},      {"weights", s.effective_weights()}};
}

}  // namespace detail

/// Full ingestion pipeline: load (or generate), chronological split, fit the
/// scaler on the training rows only, standardize every split with it, and
/// window each split. The manifest records everything needed to rebuild the
/// result: schema, split boundaries, scaler statistics and category codes.
inline DatasetBundle build_datasets(const DataSpec& spec, int tx, int ty) {
  RawSeries series = spec.use_synth ? synth_generate(spec.synth)
                                    : load_csv(spec.csv_path, spec.schema);
  SplitSeries splits = split_chronological(series, spec.split);
  StandardScaler scaler = StandardScaler::fit(splits.train);
  scaler.apply_in_place(splits.train);
  scaler.apply_in_place(splits.val);
  scaler.apply_in_place(splits.test);
  const std::string source = spec.use_synth ? "synth" : spec.csv_path;

  DatasetBundle out;
  out.train = make_windows(splits.train, scaler, tx, ty, spec.stride, "train", source);
  out.val = make_windows(splits.val, scaler, tx, ty, spec.stride, "val", source);
  out.test = make_windows(splits.test, scaler, tx, ty, spec.stride, "test", source);

  nlohmann::json m;
  m["source"] = source;
  if (spec.use_synth) {
    m["synth"] = detail::synth_to_json(spec.synth);
  } else {
    m["schema"] = {{"target", spec.schema.target},
                   {"categoricals", spec.schema.categoricals},
                   {"inputs", spec.schema.inputs},
                   {"drop", spec.schema.drop},
                   {"delimiter", std::string(1, spec.schema.delimiter)}};
  }
  m["split_fractions"] = spec.split;
  m["split_rows"] = {{"train", splits.train.n_rows},
                     {"val", splits.val.n_rows},
                     {"test", splits.test.n_rows}};
  m["window"] = {{"tx", tx}, {"ty", ty}, {"stride", spec.stride}};
  m["window_counts"] = {{"train", out.train.size()}, {"val", out.val.size()},
                        {"test", out.test.size()}};
  m["columns"] = series.columns;
  m["input_columns"] = out.train.input_names;
  m["target"] = series.columns[static_cast<size_t>(series.target_col)];
  nlohmann::json scaler_json = nlohmann::json::array();
  for (size_t c = 0; c < scaler.mean.size(); ++c)
    scaler_json.push_back({{"column", series.columns[c]},
                           {"mean", scaler.mean[c]},
                           {"std", scaler.std_dev[c]}});
  m["scaler"] = std::move(scaler_json);
  m["category_maps"] = series.category_maps;
  out.manifest = std::move(m);
  return out;
}

}  // namespace stam
