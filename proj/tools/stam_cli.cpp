// SPDX-License-Identifier: Apache-2.0
//
// Batch CLI for training, evaluating and explaining the forecasting models.
// Subcommands: train, eval, explain, bench, synth. Progress goes to stderr;
// machine-readable results go to files under the output directory.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stam/cli/experiment.hpp"
#include "stam/interpret/report.hpp"
#include "stam/models/costs.hpp"
#include "stam/models/serialize.hpp"
#include "stam/train/fit.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit codes are part of the CLI contract.
constexpr int kExitOk = 0;
constexpr int kExitError = 1;      // unexpected failure
constexpr int kExitConfig = 2;     // invalid config / arguments
constexpr int kExitData = 3;       // data or artifact I/O problem
constexpr int kExitDiverged = 4;   // training produced non-finite values

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
};

json load_config(const CommonOpts& opts) {
  if (opts.config_path.empty()) throw stam::ConfigError("--config is required");
  json cfg = stam::load_json_file(opts.config_path);
  for (const auto& o : opts.overrides) stam::apply_override(cfg, o);
  return cfg;
}

fs::path resolve_out_dir(const CommonOpts& opts, const stam::ExperimentConfig& cfg) {
  std::string dir = !opts.out_dir.empty() ? opts.out_dir : cfg.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv("STAM_OUT_DIR");
    if (env && *env) dir = env;
  }
  if (dir.empty()) throw stam::ConfigError("no output directory: pass --out, set out_dir in the "
                                           "config, or export STAM_OUT_DIR");
  fs::create_directories(dir);
  return {dir};
}

void resolve_n_vars(stam::ModelConfig& model, const stam::WindowedDataset& ds) {
  if (model.n_vars == 0) {
    model.n_vars = ds.n_vars();
  } else if (model.n_vars != ds.n_vars()) {
    throw stam::ConfigError("model.n_vars=" + std::to_string(model.n_vars) +
                            " but the data provides " + std::to_string(ds.n_vars()) +
                            " input variables");
  }
  model.validate();
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw stam::IoError("cannot write '" + path.string() + "'");
  out << j.dump(2) << "\n";
}

json metrics_to_json(const stam::Metrics& m) {
  return {{"rmse", m.rmse}, {"mae", m.mae}, {"r2", m.r2}, {"count", m.count}};
}

const stam::WindowedDataset& pick_split(const stam::DatasetBundle& b, const std::string& name) {
  if (name == "train") return b.train;
  if (name == "val") return b.val;
  if (name == "test") return b.test;
  throw stam::ConfigError("unknown split '" + name + "' (expected train|val|test)");
}

// ---------------------------------------------------------------------------

int cmd_train(const CommonOpts& opts) {
  stam::ExperimentConfig cfg = stam::parse_experiment(load_config(opts));
  const fs::path out = resolve_out_dir(opts, cfg);
  std::cerr << "[train] building datasets...\n";
  stam::DatasetBundle data = stam::build_datasets(cfg.data, cfg.model.input_len,
                                                  cfg.model.output_len);
  resolve_n_vars(cfg.model, data.train);
  write_json_file(out / "dataset_manifest.json", data.manifest);
  std::cerr << "[train] windows train/val/test = " << data.train.size() << "/" << data.val.size()
            << "/" << data.test.size() << ", arch=" << to_string(cfg.model.arch)
            << ", params=" << stam::param_count(cfg.model) << "\n";

  json runs = json::array();
  std::vector<stam::Metrics> test_metrics;
  for (uint64_t seed : cfg.seeds) {
    stam::ModelConfig mc = cfg.model;
    mc.seed = seed;
    stam::TrainConfig tc = cfg.train;
    tc.seed = seed;
    auto model = stam::make_model(mc);
    const std::string log_name = "train_log_seed" + std::to_string(seed) + ".jsonl";
    const std::string weights_name = "weights_seed" + std::to_string(seed) + ".stamw";
    std::ofstream log(out / log_name);
    if (!log) throw stam::IoError("cannot write '" + (out / log_name).string() + "'");
    std::cerr << "[train] seed " << seed << ": " << tc.epochs << " epochs x "
              << (data.train.size() + tc.batch_size - 1) / tc.batch_size << " batches\n";
    stam::FitResult fit_result = stam::fit(*model, data.train, data.val, tc, &log);
    stam::save_weights(*model, (out / weights_name).string());

    stam::EvalRun test_run = stam::run_eval(*model, data.test, false, tc.batch_size);
    const stam::Metrics test = stam::compute_metrics(test_run.pred, test_run.target);
    test_metrics.push_back(test);
    double epoch_seconds = 0.0;
    for (const auto& e : fit_result.epochs) epoch_seconds += e.seconds;
    epoch_seconds /= static_cast<double>(fit_result.epochs.size());
    runs.push_back({{"seed", seed},
                    {"weights", weights_name},
                    {"log", log_name},
                    {"test", metrics_to_json(test)},
                    {"test_seconds", test_run.seconds},
                    {"train_seconds_per_epoch", epoch_seconds}});
    std::cerr << "[train] seed " << seed << " done: test rmse=" << test.rmse
              << " mae=" << test.mae << " r2=" << test.r2 << "\n";
  }

  auto agg = [&](auto pick) {
    double mean = 0.0;
    for (const auto& m : test_metrics) mean += pick(m);
    mean /= static_cast<double>(test_metrics.size());
    double var = 0.0;
    for (const auto& m : test_metrics) var += (pick(m) - mean) * (pick(m) - mean);
    var /= static_cast<double>(test_metrics.size());
    return std::pair<double, double>(mean, std::sqrt(var));
  };
  const auto [rmse_m, rmse_s] = agg([](const stam::Metrics& m) { return m.rmse; });
  const auto [mae_m, mae_s] = agg([](const stam::Metrics& m) { return m.mae; });
  const auto [r2_m, r2_s] = agg([](const stam::Metrics& m) { return m.r2; });
  json summary = {{"arch", to_string(cfg.model.arch)},
                  {"seeds", cfg.seeds},
                  {"runs", runs},
                  {"test_mean", {{"rmse", rmse_m}, {"mae", mae_m}, {"r2", r2_m}}},
                  {"test_std", {{"rmse", rmse_s}, {"mae", mae_s}, {"r2", r2_s}}}};
  write_json_file(out / "summary.json", summary);
  std::cerr << "[train] summary written to " << (out / "summary.json") << "\n";
  return kExitOk;
}

int cmd_eval(const CommonOpts& opts, const std::string& weights, const std::string& data_csv,
             const std::string& split) {
  stam::ExperimentConfig cfg = stam::parse_experiment(load_config(opts));
  if (!data_csv.empty()) {
    cfg.data.use_synth = false;
    cfg.data.csv_path = data_csv;
  }
  auto model = stam::load_weights(weights);
  const stam::ModelConfig& mc = model->config();
  stam::DatasetBundle data = stam::build_datasets(cfg.data, mc.input_len, mc.output_len);
  const stam::WindowedDataset& ds = pick_split(data, split);
  if (ds.n_vars() != mc.n_vars)
    throw stam::DataError("schema mismatch: weights expect " + std::to_string(mc.n_vars) +
                          " input variables, data provides " + std::to_string(ds.n_vars()));
  const fs::path out = resolve_out_dir(opts, cfg);
  stam::EvalRun run = stam::run_eval(*model, ds, false, cfg.train.batch_size);
  const stam::Metrics m = stam::compute_metrics(run.pred, run.target);
  json result = {{"arch", to_string(mc.arch)},   {"weights", weights},
                 {"split", split},               {"metrics", metrics_to_json(m)},
                 {"test_seconds", run.seconds},  {"windows", ds.size()}};
  write_json_file(out / "eval.json", result);
  std::cout << result.dump(2) << "\n";
  return kExitOk;
}

int cmd_explain(const CommonOpts& opts, const std::string& weights, const std::string& data_csv,
                const std::string& split, const std::string& format) {
  stam::ExperimentConfig cfg = stam::parse_experiment(load_config(opts));
  if (!data_csv.empty()) {
    cfg.data.use_synth = false;
    cfg.data.csv_path = data_csv;
  }
  auto model = stam::load_weights(weights);
  const stam::ModelConfig& mc = model->config();
  if (mc.arch == stam::Arch::kEncDec)
    throw stam::ConfigError("explain: enc_dec has no attention to report");
  stam::DatasetBundle data = stam::build_datasets(cfg.data, mc.input_len, mc.output_len);
  const stam::WindowedDataset& ds = pick_split(data, split);
  if (ds.n_vars() != mc.n_vars)
    throw stam::DataError("schema mismatch: weights expect " + std::to_string(mc.n_vars) +
                          " input variables, data provides " + std::to_string(ds.n_vars()));
  const fs::path out = resolve_out_dir(opts, cfg);
  std::cerr << "[explain] aggregating attention over " << ds.size() << " windows\n";
  stam::EvalRun run = stam::run_eval(*model, ds, true, cfg.train.batch_size);
  stam::TemporalReport temporal = stam::aggregate_temporal(run.records);
  // lstm_att has temporal attention only; spatial applies to the others
  const bool has_spatial = mc.arch != stam::Arch::kLstmAtt;
  stam::SpatialReport spatial;
  if (has_spatial) spatial = stam::aggregate_spatial(run.records, ds.input_names);
  if (format == "json") {
    stam::export_report(spatial, temporal, (out / "attention.json").string(),
                        stam::ReportFormat::kJson);
    std::cerr << "[explain] wrote " << (out / "attention.json") << "\n";
  } else if (format == "csv") {
    stam::export_report(spatial, temporal, (out / "attention.csv").string(),
                        stam::ReportFormat::kCsv);
    std::cerr << "[explain] wrote " << (out / "attention.csv") << "\n";
  } else {
    throw stam::ConfigError("unknown --format '" + format + "' (expected json|csv)");
  }
  return kExitOk;
}

int cmd_bench(const CommonOpts& opts, const std::vector<std::string>& config_paths, int runs) {
  if (config_paths.empty()) throw stam::ConfigError("bench: pass at least one --config");
  if (runs < 1) throw stam::ConfigError("bench: --runs must be >= 1");
  json table = json::array();
  for (const auto& path : config_paths) {
    CommonOpts one = opts;
    one.config_path = path;
    stam::ExperimentConfig cfg = stam::parse_experiment(load_config(one));
    stam::DatasetBundle data = stam::build_datasets(cfg.data, cfg.model.input_len,
                                                    cfg.model.output_len);
    resolve_n_vars(cfg.model, data.train);
    json row;
    row["config"] = path;
    row["arch"] = to_string(cfg.model.arch);
    row["enc_dim"] = cfg.model.enc_dim;
    row["param_count"] = stam::param_count(cfg.model);
    if (cfg.model.arch == stam::Arch::kStam || cfg.model.arch == stam::Arch::kStamLite)
      row["flop_estimate"] = stam::flop_estimate(cfg.model);
    else
      row["flop_estimate"] = nullptr;

    std::vector<double> epoch_secs, test_secs;
    for (int r = 0; r < runs; ++r) {
      stam::ModelConfig mc = cfg.model;
      mc.seed = cfg.seeds[0] + static_cast<uint64_t>(r);
      stam::TrainConfig tc = cfg.train;
      tc.seed = mc.seed;
      tc.epochs = 1;
      auto model = stam::make_model(mc);
      stam::FitResult fr = stam::fit(*model, data.train, data.val, tc);
      epoch_secs.push_back(fr.epochs[0].seconds);
      stam::EvalRun er = stam::run_eval(*model, data.test, false, tc.batch_size);
      test_secs.push_back(er.seconds);
    }
    std::sort(epoch_secs.begin(), epoch_secs.end());
    std::sort(test_secs.begin(), test_secs.end());
    row["train_seconds_per_epoch"] = epoch_secs[epoch_secs.size() / 2];
    row["test_seconds"] = test_secs[test_secs.size() / 2];
    table.push_back(row);
    std::cerr << "[bench] " << path << ": params=" << row["param_count"]
              << " epoch_s=" << row["train_seconds_per_epoch"] << "\n";
  }
  stam::ExperimentConfig first = stam::parse_experiment(
      load_config({config_paths[0], opts.overrides, opts.out_dir}));
  const fs::path out = resolve_out_dir(opts, first);
  write_json_file(out / "bench.json", table);
  std::ofstream csv(out / "bench.csv");
  csv << "config,arch,enc_dim,param_count,flop_estimate,train_seconds_per_epoch,test_seconds\n";
  for (const auto& row : table)
    csv << row["config"].get<std::string>() << "," << row["arch"].get<std::string>() << ","
        << row["enc_dim"] << "," << row["param_count"] << ","
        << (row["flop_estimate"].is_null() ? "" : row["flop_estimate"].dump()) << ","
        << row["train_seconds_per_epoch"] << "," << row["test_seconds"] << "\n";
  std::cerr << "[bench] wrote " << (out / "bench.json") << "\n";
  return kExitOk;
}

int cmd_synth(const CommonOpts& opts) {
  stam::ExperimentConfig cfg = stam::parse_experiment(load_config(opts));
  if (!cfg.data.use_synth)
    throw stam::ConfigError("synth: the config must carry a data.synth block");
  const fs::path out = resolve_out_dir(opts, cfg);
  stam::RawSeries series = stam::synth_generate(cfg.data.synth);
  const fs::path csv_path = out / "synth.csv";
  std::ofstream csv(csv_path);
  if (!csv) throw stam::IoError("cannot write '" + csv_path.string() + "'");
  for (size_t c = 0; c < series.columns.size(); ++c)
    csv << (c ? "," : "") << series.columns[c];
  csv << "\n";
  char buf[32];
  for (int r = 0; r < series.n_rows; ++r) {
    for (int c = 0; c < series.n_cols; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", series.at(r, c));
      csv << (c ? "," : "") << buf;
    }
    csv << "\n";
  }
  json manifest = {{"columns", series.columns},
                   {"target", "y"},
                   {"inputs", [&] {
                      std::vector<std::string> v;
                      for (int c : series.input_cols)
                        v.push_back(series.columns[static_cast<size_t>(c)]);
                      return v;
                    }()},
                   {"spec", stam::detail::synth_to_json(cfg.data.synth)}};
  write_json_file(out / "synth_manifest.json", manifest);
  std::cerr << "[synth] wrote " << csv_path << " (" << series.n_rows << " rows)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatiotemporal-attention time series forecasting"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string weights, data_csv, split = "test", format = "json";
  std::vector<std::string> bench_configs;
  int bench_runs = 1;

  auto add_common = [&](CLI::App* sub, bool config_required = true) {
    auto* c = sub->add_option("--config", opts.config_path, "experiment config JSON");
    if (config_required) c->required();
    sub->add_option("--set", opts.overrides, "override config fields, key.path=value");
    sub->add_option("--out", opts.out_dir, "output directory (default: config out_dir or $STAM_OUT_DIR)");
  };

  CLI::App* train = app.add_subcommand("train", "train one model per seed and summarize");
  add_common(train);

  CLI::App* eval = app.add_subcommand("eval", "evaluate saved weights on a split");
  add_common(eval);
  eval->add_option("--weights", weights, "weight file")->required();
  eval->add_option("--data", data_csv, "override the config's CSV path");
  eval->add_option("--split", split, "train|val|test (default test)");

  CLI::App* explain = app.add_subcommand("explain", "aggregate attention weights into reports");
  add_common(explain);
  explain->add_option("--weights", weights, "weight file")->required();
  explain->add_option("--data", data_csv, "override the config's CSV path");
  explain->add_option("--split", split, "train|val|test (default test)");
  explain->add_option("--format", format, "json|csv (default json)");

  CLI::App* bench = app.add_subcommand("bench", "cost table: params, flops, measured timings");
  bench->add_option("--config", bench_configs, "experiment config(s)")->required();
  bench->add_option("--set", opts.overrides, "override config fields, key.path=value");
  bench->add_option("--out", opts.out_dir, "output directory");
  bench->add_option("--runs", bench_runs, "timing repetitions, median reported (default 1)");

  CLI::App* synth = app.add_subcommand("synth", "generate a planted-relevance CSV");
  add_common(synth);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (train->parsed()) return cmd_train(opts);
    if (eval->parsed()) return cmd_eval(opts, weights, data_csv, split);
    if (explain->parsed()) return cmd_explain(opts, weights, data_csv, split, format);
    if (bench->parsed()) return cmd_bench(opts, bench_configs, bench_runs);
    if (synth->parsed()) return cmd_synth(opts);
    std::cerr << "no subcommand\n";
    return kExitConfig;
  } catch (const stam::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const stam::DivergedError& e) {
    std::cerr << "diverged: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const stam::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const stam::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
