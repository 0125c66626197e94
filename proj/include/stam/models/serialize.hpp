// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <string>

#include <json.hpp>

#include "stam/models/factory.hpp"

namespace stam {

namespace detail {

constexpr char kWeightMagic[9] = "STAMW001";

inline nlohmann::json config_to_json(const ModelConfig& cfg) {
  return {{"arch", to_string(cfg.arch)},
          {"n_vars", cfg.n_vars},
          {"input_len", cfg.input_len},
          {"output_len", cfg.output_len},
          {"enc_dim", cfg.enc_dim},
          {"dec_dim", cfg.dec_dim},
          {"ctx_dim", cfg.ctx_dim},
          {"dropout_rate", cfg.dropout_rate},
          {"seed", cfg.seed},
          {"per_var_embed", cfg.per_var_embed}};
}

inline ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig cfg;
  cfg.arch = arch_from_string(j.at("arch").get<std::string>());
  cfg.n_vars = j.at("n_vars").get<int>();
  cfg.input_len = j.at("input_len").get<int>();
  cfg.output_len = j.at("output_len").get<int>();
  cfg.enc_dim = j.at("enc_dim").get<int>();
  cfg.dec_dim = j.at("dec_dim").get<int>();
  cfg.ctx_dim = j.at("ctx_dim").get<int>();
  cfg.dropout_rate = j.at("dropout_rate").get<double>();
  cfg.seed = j.at("seed").get<uint64_t>();
  cfg.per_var_embed = j.value("per_var_embed", false);
  return cfg;
}

}  // namespace detail

/// Writes a versioned weight container: 8-byte magic, little-endian u32
/// header length, JSON header (arch, config, tensor manifest in registration
/// order), then each tensor's values as raw 64-bit floats. The manifest
/// order is the models' parameter registration order, which is pinned —
/// see the weight-file notes in the README.
inline void save_weights(const SequenceModel& model, const std::string& path) {
  nlohmann::json header;
  header["format_version"] = 1;
  header["config"] = detail::config_to_json(model.config());
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& p : model.params()) {
    const Shape s = p.tensor->shape;
    tensors.push_back({{"name", p.name}, {"rank", s.rank()},
                       {"dims", s.rank() == 1 ? nlohmann::json::array({s.cols()})
                                              : nlohmann::json::array({s.rows(), s.cols()})}});
  }
  header["tensors"] = std::move(tensors);
  const std::string head = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("save_weights: cannot open '" + path + "' for writing");
  out.write(detail::kWeightMagic, 8);
  const uint32_t len = static_cast<uint32_t>(head.size());
  out.write(reinterpret_cast<const char*>(&len), 4);
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  for (const auto& p : model.params())
    out.write(reinterpret_cast<const char*>(p.tensor->values.data()),
              static_cast<std::streamsize>(p.tensor->values.size() * sizeof(double)));
  if (!out) throw IoError("save_weights: write to '" + path + "' failed");
}

/// Reads a weight container, reconstructs the model it describes and fills
/// its parameters. Round trip reproduces bitwise-identical forwards.
inline std::unique_ptr<SequenceModel> load_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_weights: cannot open '" + path + "'");
  char magic[8];
  if (!in.read(magic, 8) || std::string(magic, 8) != std::string(detail::kWeightMagic, 8))
    throw IoError("load_weights: '" + path + "' is not a weight file (bad magic)");
  uint32_t len = 0;
  if (!in.read(reinterpret_cast<char*>(&len), 4))
    throw IoError("load_weights: '" + path + "' truncated in header length");
  std::string head(len, '\0');
  if (!in.read(head.data(), len))
    throw IoError("load_weights: '" + path + "' truncated in header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(head);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("load_weights: corrupt header in '" + path + "': " + e.what());
  }
  if (header.value("format_version", -1) != 1)
    throw IoError("load_weights: unsupported format_version in '" + path + "'");

  ModelConfig cfg = detail::config_from_json(header.at("config"));
  auto model = make_model(cfg);
  const auto& manifest = header.at("tensors");
  const auto& params = model->params();
  if (manifest.size() != params.size())
    throw IoError("load_weights: manifest lists " + std::to_string(manifest.size()) +
                  " tensors, model has " + std::to_string(params.size()));
  for (size_t i = 0; i < params.size(); ++i) {
    const auto& entry = manifest[i];
    if (entry.at("name").get<std::string>() != params[i].name)
      throw IoError("load_weights: tensor " + std::to_string(i) + " is '" +
                    entry.at("name").get<std::string>() + "', expected '" + params[i].name + "'");
    Tensor& t = *params[i].tensor;
    int64_t listed = 1;
    for (const auto& d : entry.at("dims")) listed *= d.get<int64_t>();
    if (listed != t.count())
      throw IoError("load_weights: tensor '" + params[i].name + "' has " + std::to_string(listed) +
                    " entries in '" + path + "', model expects " + std::to_string(t.count()));
    if (!in.read(reinterpret_cast<char*>(t.values.data()),
                 static_cast<std::streamsize>(t.values.size() * sizeof(double))))
      throw IoError("load_weights: '" + path + "' truncated in tensor '" + params[i].name + "'");
  }
  return model;
}

/// load_weights constrained to an expected architecture; a file holding any
/// other arch is a configuration mismatch, not an I/O problem.
inline std::unique_ptr<SequenceModel> load_weights_as(const std::string& path, Arch expected) {
  auto model = load_weights(path);
  if (model->config().arch != expected)
    throw ConfigError("load_weights: '" + path + "' holds " + to_string(model->config().arch) +
                      " weights, expected " + to_string(expected));
  return model;
}

}  // namespace stam
