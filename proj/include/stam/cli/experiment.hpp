// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stam/data/pipeline.hpp"
#include "stam/train/adam.hpp"

namespace stam {

/// One experiment: data source, model, training protocol, split policy and
/// the seed list (one trained run per seed, matching the paper convention of
/// averaging repeated runs).
struct ExperimentConfig {
  DataSpec data;
  ModelConfig model;  // n_vars == 0 means "derive from the data schema"
  TrainConfig train;
  std::vector<uint64_t> seeds{0};
  std::string out_dir;
};

namespace detail {

/// Collects every offending field so a rejected config names all of them.
class FieldErrors {
 public:
  void add(const std::string& path, const std::string& msg) {
    errors_.push_back(path + ": " + msg);
  }
  void check_throw(const std::string& what) const {
    if (errors_.empty()) return;
    std::string msg = what + " rejected:";
    for (const auto& e : errors_) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  bool empty() const { return errors_.empty(); }

 private:
  std::vector<std::string> errors_;
};

template <typename T>
bool read_field(const nlohmann::json& j, const std::string& key, const std::string& path, T& out,
                FieldErrors& errs) {
  if (!j.contains(key)) return false;
  try {
    out = j.at(key).get<T>();
    return true;
  } catch (const nlohmann::json::exception&) {
    errs.add(path + "." + key, "wrong type");
    return false;
  }
}

inline SynthSpec synth_from_json(const nlohmann::json& j, const std::string& path,
                                 FieldErrors& errs) {
  SynthSpec s;
  read_field(j, "n_vars", path, s.n_vars, errs);
  read_field(j, "length", path, s.length, errs);
  read_field(j, "relevant", path, s.relevant, errs);
  read_field(j, "lag", path, s.lag, errs);
  read_field(j, "noise_std", path, s.noise_std, errs);
  read_field(j, "seed", path, s.seed, errs);
  read_field(j, "ar_coeff", path, s.ar_coeff, errs);
  read_field(j, "weights", path, s.weights, errs);
  return s;
}

}  // namespace detail

/// Parses and fully validates an experiment config, naming every offending
/// field in one ConfigError. Nothing is loaded or trained here.
inline ExperimentConfig parse_experiment(const nlohmann::json& j) {
  detail::FieldErrors errs;
  ExperimentConfig cfg;

  if (!j.contains("data")) {
    errs.add("data", "missing");
  } else {
    const auto& d = j.at("data");
    const bool has_csv = d.contains("csv");
    const bool has_synth = d.contains("synth");
    if (has_csv == has_synth) {
      errs.add("data", "exactly one of 'csv' or 'synth' is required");
    } else if (has_csv) {
      detail::read_field(d, "csv", "data", cfg.data.csv_path, errs);
      detail::read_field(d, "target", "data", cfg.data.schema.target, errs);
      if (cfg.data.schema.target.empty()) errs.add("data.target", "missing or empty");
      detail::read_field(d, "categoricals", "data", cfg.data.schema.categoricals, errs);
      detail::read_field(d, "inputs", "data", cfg.data.schema.inputs, errs);
      detail::read_field(d, "drop", "data", cfg.data.schema.drop, errs);
      std::string delim = ",";
      detail::read_field(d, "delimiter", "data", delim, errs);
      if (delim.size() != 1)
        errs.add("data.delimiter", "must be a single character");
      else
        cfg.data.schema.delimiter = delim[0];
    } else {
      cfg.data.use_synth = true;
      cfg.data.synth = detail::synth_from_json(d.at("synth"), "data.synth", errs);
      try {
        cfg.data.synth.validate();
      } catch (const ConfigError& e) {
        errs.add("data.synth", e.what());
      }
    }
    detail::read_field(d, "split", "data", cfg.data.split, errs);
    detail::read_field(d, "stride", "data", cfg.data.stride, errs);
    double split_sum = cfg.data.split[0] + cfg.data.split[1] + cfg.data.split[2];
    if (cfg.data.split[0] <= 0 || cfg.data.split[1] <= 0 || cfg.data.split[2] <= 0 ||
        std::fabs(split_sum - 1.0) > 1e-9)
      errs.add("data.split", "fractions must be positive and sum to 1");
    if (cfg.data.stride < 1) errs.add("data.stride", "must be >= 1");
  }

  if (!j.contains("model")) {
    errs.add("model", "missing");
  } else {
    const auto& m = j.at("model");
    if (!m.contains("arch")) {
      errs.add("model.arch", "missing");
    } else {
      std::string arch;
      if (detail::read_field(m, "arch", "model", arch, errs)) {
        try {
          cfg.model.arch = arch_from_string(arch);
        } catch (const ConfigError& e) {
          errs.add("model.arch", e.what());
        }
      }
    }
    cfg.model.n_vars = 0;  // derived from data unless given
    detail::read_field(m, "n_vars", "model", cfg.model.n_vars, errs);
    detail::read_field(m, "input_len", "model", cfg.model.input_len, errs);
    detail::read_field(m, "output_len", "model", cfg.model.output_len, errs);
    detail::read_field(m, "enc_dim", "model", cfg.model.enc_dim, errs);
    detail::read_field(m, "dec_dim", "model", cfg.model.dec_dim, errs);
    detail::read_field(m, "ctx_dim", "model", cfg.model.ctx_dim, errs);
    detail::read_field(m, "dropout_rate", "model", cfg.model.dropout_rate, errs);
    detail::read_field(m, "per_var_embed", "model", cfg.model.per_var_embed, errs);
    ModelConfig probe = cfg.model;
    probe.n_vars = cfg.model.n_vars == 0 ? 1 : cfg.model.n_vars;  // defer n_vars to data
    try {
      probe.validate();
    } catch (const ConfigError& e) {
      errs.add("model", e.what());
    }
    if (cfg.model.n_vars < 0) errs.add("model.n_vars", "must be >= 1 (or omitted to derive)");
  }

  if (j.contains("train")) {
    const auto& t = j.at("train");
    detail::read_field(t, "learning_rate", "train", cfg.train.learning_rate, errs);
    detail::read_field(t, "batch_size", "train", cfg.train.batch_size, errs);
    detail::read_field(t, "epochs", "train", cfg.train.epochs, errs);
    detail::read_field(t, "beta1", "train", cfg.train.beta1, errs);
    detail::read_field(t, "beta2", "train", cfg.train.beta2, errs);
    detail::read_field(t, "epsilon", "train", cfg.train.epsilon, errs);
    detail::read_field(t, "shuffle", "train", cfg.train.shuffle, errs);
    detail::read_field(t, "clip_norm", "train", cfg.train.clip_norm, errs);
    try {
      cfg.train.validate();
    } catch (const ConfigError& e) {
      errs.add("train", e.what());
    }
  }

  detail::read_field(j, "seeds", "", cfg.seeds, errs);
  if (cfg.seeds.empty()) errs.add("seeds", "must list at least one seed");
  detail::read_field(j, "out_dir", "", cfg.out_dir, errs);

  errs.check_throw("experiment config");
  return cfg;
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

/// Applies one `--set key=value` override to a config JSON. The key is a
/// dotted path; the value is parsed as JSON when possible, else kept as a
/// string (so `--set model.arch=stam_lite` works unquoted).
inline void apply_override(nlohmann::json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("--set expects key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  nlohmann::json value;
  try {
    value = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::exception&) {
    value = raw;  // plain string
  }
  nlohmann::json* node = &config;
  size_t begin = 0;
  while (true) {
    const size_t dot = key.find('.', begin);
    const std::string part = key.substr(begin, dot == std::string::npos ? dot : dot - begin);
    if (part.empty()) throw ConfigError("--set key '" + key + "' has an empty path segment");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    begin = dot + 1;
  }
}

}  // namespace stam
