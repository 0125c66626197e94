// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <random>

#include "stam/core/gradcheck.hpp"
#include "stam/models/costs.hpp"
#include "stam/models/factory.hpp"
#include "stam/models/serialize.hpp"
#include "support/oracle.hpp"

using namespace stam;
using Catch::Approx;

namespace {

ModelConfig toy_config(Arch arch, uint64_t seed = 7) {
  ModelConfig cfg;
  cfg.n_vars = 3;
  cfg.input_len = 4;
  cfg.output_len = 2;
  cfg.enc_dim = 5;
  cfg.dec_dim = 5;
  cfg.ctx_dim = 2;
  cfg.arch = arch;
  cfg.seed = seed;
  return cfg;
}

Tensor random_window(const ModelConfig& cfg, std::mt19937_64& rng, double scale = 1.0) {
  Tensor X(Shape::mat(cfg.n_vars, cfg.input_len));
  std::uniform_real_distribution<double> u(-scale, scale);
  for (double& v : X.values) v = u(rng);
  return X;
}

void zero_all_params(SequenceModel& model) {
  for (const auto& p : model.params())
    std::fill(p.tensor->values.begin(), p.tensor->values.end(), 0.0);
}

std::vector<Tensor*> param_ptrs(SequenceModel& model) {
  std::vector<Tensor*> out;
  for (const auto& p : model.params()) out.push_back(p.tensor);
  return out;
}

constexpr Arch kAllArchs[] = {Arch::kStam, Arch::kStamLite, Arch::kEncDec, Arch::kLstmAtt,
                              Arch::kDaRnn};
constexpr Arch kAttentionArchs[] = {Arch::kStam, Arch::kStamLite, Arch::kLstmAtt, Arch::kDaRnn};

}  // namespace

TEST_CASE("spatial embedding: zeros, permutation equivariance, gradients", "[models]") {
  StamModel model(toy_config(Arch::kStam));
  std::mt19937_64 rng(101);

  SECTION("zero embedder maps everything to zero") {
    zero_all_params(model);
    Graph g;
    auto d = model.spatial_embed(g, BatchInput::from_window(random_window(model.config(), rng)));
    for (Var v : d)
      for (double x : g.values(v)) REQUIRE(x == 0.0);
  }

  SECTION("shared weights make row swaps commute with embedding") {
    Tensor X = random_window(model.config(), rng);
    Tensor X_swapped = X;
    for (int t = 0; t < X.shape.cols(); ++t) std::swap(X_swapped.at(1, t), X_swapped.at(2, t));
    Graph g;
    auto d = model.spatial_embed(g, BatchInput::from_window(X));
    auto d_swapped = model.spatial_embed(g, BatchInput::from_window(X_swapped));
    for (int k = 0; k < model.config().enc_dim; ++k) {
      REQUIRE(g.values(d[1])[k] == g.values(d_swapped[2])[k]);
      REQUIRE(g.values(d[2])[k] == g.values(d_swapped[1])[k]);
      REQUIRE(g.values(d[0])[k] == g.values(d_swapped[0])[k]);
    }
  }

  SECTION("gradients through the embedding pass grad_check") {
    Tensor X = random_window(model.config(), rng);
    const auto& params = model.params();
    REQUIRE(params[0].name == "spatial_embedder.W");
    Tensor* embed_params[] = {params[0].tensor, params[1].tensor};
    auto builder = [&](Graph& g) {
      auto d = model.spatial_embed(g, BatchInput::from_window(X));
      Var acc = d[0];
      for (size_t i = 1; i < d.size(); ++i) acc = g.add(acc, d[i]);
      return g.sum(g.mul(acc, acc));
    };
    REQUIRE(grad_check(builder, embed_params, 1e-5, 1e-4).pass);
  }
}

TEST_CASE("encoder: zero params give zero states and causality is strict", "[models]") {
  std::mt19937_64 rng(103);

  SECTION("all-zero parameters produce H = 0") {
    StamModel model(toy_config(Arch::kStam));
    zero_all_params(model);
    std::mt19937_64 drng(0);
    Graph g;
    auto H = model.encode(g, BatchInput::from_window(random_window(model.config(), rng)),
                          Mode::kEval, drng);
    for (Var v : H)
      for (double x : g.values(v)) REQUIRE(x == 0.0);
  }

  SECTION("perturbing the last step leaves earlier states bitwise unchanged") {
    StamModel model(toy_config(Arch::kStam));
    const ModelConfig& cfg = model.config();
    Tensor X = random_window(cfg, rng);
    Tensor X_pert = X;
    for (int i = 0; i < cfg.n_vars; ++i) X_pert.at(i, cfg.input_len - 1) += 13.5;
    std::mt19937_64 drng(0);
    Graph g;
    auto h = model.encode(g, BatchInput::from_window(X), Mode::kEval, drng);
    auto h_pert = model.encode(g, BatchInput::from_window(X_pert), Mode::kEval, drng);
    for (int t = 0; t < cfg.input_len - 1; ++t)
      for (int k = 0; k < cfg.enc_dim; ++k)
        REQUIRE(g.values(h[static_cast<size_t>(t)])[static_cast<size_t>(k)] ==
                g.values(h_pert[static_cast<size_t>(t)])[static_cast<size_t>(k)]);
    bool changed = false;
    for (int k = 0; k < cfg.enc_dim; ++k)
      changed = changed || g.values(h.back())[static_cast<size_t>(k)] !=
                               g.values(h_pert.back())[static_cast<size_t>(k)];
    REQUIRE(changed);
  }
}

TEST_CASE("spatial attention: degenerate, symmetric and brute-force cases", "[models]") {
  std::mt19937_64 rng(107);

  SECTION("single variable takes all the weight") {
    ModelConfig cfg = toy_config(Arch::kStam);
    cfg.n_vars = 1;
    StamModel model(cfg);
    Graph g;
    auto d = model.spatial_embed(g, BatchInput::from_window(random_window(cfg, rng)));
    AttentionOut att = model.spatial_attention(g, g.zeros(Shape::mat(1, cfg.dec_dim)), d);
    REQUIRE(g.values(att.weights)[0] == 1.0);
    for (int k = 0; k < cfg.enc_dim; ++k)
      REQUIRE(g.values(att.context)[static_cast<size_t>(k)] ==
              g.values(d[0])[static_cast<size_t>(k)]);
  }

  SECTION("identical embeddings get uniform weights") {
    ModelConfig cfg = toy_config(Arch::kStam);
    StamModel model(cfg);
    Tensor X = random_window(cfg, rng);
    for (int i = 1; i < cfg.n_vars; ++i)
      for (int t = 0; t < cfg.input_len; ++t) X.at(i, t) = X.at(0, t);
    Graph g;
    auto d = model.spatial_embed(g, BatchInput::from_window(X));
    AttentionOut att = model.spatial_attention(g, g.zeros(Shape::mat(1, cfg.dec_dim)), d);
    for (double w : g.values(att.weights)) REQUIRE(w == Approx(1.0 / cfg.n_vars).margin(1e-15));
  }

  SECTION("context equals an independently recomputed weighted sum") {
    ModelConfig cfg = toy_config(Arch::kStam);
    StamModel model(cfg);
    Graph g;
    auto d = model.spatial_embed(g, BatchInput::from_window(random_window(cfg, rng)));
    Tensor query(Shape::mat(1, cfg.dec_dim));
    std::uniform_real_distribution<double> u(-1, 1);
    for (double& v : query.values) v = u(rng);
    AttentionOut att = model.spatial_attention(g, g.constant(query), d);
    auto w = g.values(att.weights);
    for (int k = 0; k < cfg.enc_dim; ++k) {
      double expect = 0.0;
      for (int i = 0; i < cfg.n_vars; ++i)
        expect += w[static_cast<size_t>(i)] * g.values(d[static_cast<size_t>(i)])[static_cast<size_t>(k)];
      REQUIRE(std::fabs(g.values(att.context)[static_cast<size_t>(k)] - expect) <= 1e-12);
    }
  }
}

TEST_CASE("temporal attention: degenerate, symmetric and brute-force cases", "[models]") {
  std::mt19937_64 rng(109);

  SECTION("single step takes all the weight") {
    ModelConfig cfg = toy_config(Arch::kStam);
    cfg.input_len = 1;
    StamModel model(cfg);
    std::mt19937_64 drng(0);
    Graph g;
    auto H = model.encode(g, BatchInput::from_window(random_window(cfg, rng)), Mode::kEval, drng);
    AttentionOut att = model.temporal_attention(g, g.zeros(Shape::mat(1, cfg.dec_dim)), H);
    REQUIRE(g.values(att.weights)[0] == 1.0);
    for (int k = 0; k < cfg.enc_dim; ++k)
      REQUIRE(g.values(att.context)[static_cast<size_t>(k)] ==
              g.values(H[0])[static_cast<size_t>(k)]);
  }

  SECTION("identical keys get uniform weights; brute-force context agrees") {
    ModelConfig cfg = toy_config(Arch::kStam);
    StamModel model(cfg);
    Graph g;
    Tensor key(Shape::mat(1, cfg.enc_dim));
    std::uniform_real_distribution<double> u(-1, 1);
    for (double& v : key.values) v = u(rng);
    std::vector<Var> same_keys(static_cast<size_t>(cfg.input_len), g.constant(key));
    AttentionOut att = model.temporal_attention(g, g.zeros(Shape::mat(1, cfg.dec_dim)), same_keys);
    for (double w : g.values(att.weights))
      REQUIRE(w == Approx(1.0 / cfg.input_len).margin(1e-15));

    std::mt19937_64 drng(0);
    auto H = model.encode(g, BatchInput::from_window(random_window(cfg, rng)), Mode::kEval, drng);
    Tensor query(Shape::mat(1, cfg.dec_dim));
    for (double& v : query.values) v = u(rng);
    AttentionOut att2 = model.temporal_attention(g, g.constant(query), H);
    auto w = g.values(att2.weights);
    for (int k = 0; k < cfg.enc_dim; ++k) {
      double expect = 0.0;
      for (int t = 0; t < cfg.input_len; ++t)
        expect += w[static_cast<size_t>(t)] * g.values(H[static_cast<size_t>(t)])[static_cast<size_t>(k)];
      REQUIRE(std::fabs(g.values(att2.context)[static_cast<size_t>(k)] - expect) <= 1e-12);
    }
  }
}

TEST_CASE("decode step: zero params give zero output and uniform attention", "[models]") {
  std::mt19937_64 rng(113);
  ModelConfig cfg = toy_config(Arch::kStam);
  StamModel model(cfg);
  zero_all_params(model);
  std::mt19937_64 drng(0);
  Graph g;
  BatchInput bi = BatchInput::from_window(random_window(cfg, rng));
  auto d = model.spatial_embed(g, bi);
  auto H = model.encode(g, bi, Mode::kEval, drng);
  StamModel::DecoderState st;
  st.h_g = g.zeros(Shape::mat(1, cfg.dec_dim));
  st.c_g = st.h_g;
  st.h_s = st.h_g;
  st.c_s = st.h_g;
  auto step = model.decode_step(g, st, d, H, g.zeros(Shape::mat(1, 1)), Mode::kEval, drng);
  REQUIRE(g.values(step.y_hat)[0] == 0.0);
  for (double b : g.values(step.beta)) REQUIRE(b == Approx(1.0 / cfg.n_vars).margin(1e-15));
  for (double a : g.values(step.alpha)) REQUIRE(a == Approx(1.0 / cfg.input_len).margin(1e-15));
}

TEST_CASE("forward is deterministic and shaped Ty for every arch", "[models]") {
  std::mt19937_64 rng(127);
  for (Arch arch : kAllArchs) {
    DYNAMIC_SECTION("arch " << to_string(arch)) {
      auto model = make_model(toy_config(arch));
      Tensor X = random_window(model->config(), rng);
      ForwardResult r1 = model->forward(X, Mode::kEval);
      ForwardResult r2 = model->forward(X, Mode::kEval);
      REQUIRE(r1.y_hat.size() == 2);
      for (double y : r1.y_hat) REQUIRE(std::isfinite(y));
      REQUIRE(r1.y_hat == r2.y_hat);
      REQUIRE(r1.attn.spatial == r2.attn.spatial);
      REQUIRE(r1.attn.temporal == r2.attn.temporal);
    }
  }
}

TEST_CASE("all-zero STAM predicts exactly zero", "[models]") {
  auto model = make_model(toy_config(Arch::kStam));
  zero_all_params(*model);
  std::mt19937_64 rng(131);
  ForwardResult r = model->forward(random_window(model->config(), rng), Mode::kEval);
  for (double y : r.y_hat) REQUIRE(y == 0.0);
}

TEST_CASE("single-window forward equals its row of a batched build", "[models]") {
  std::mt19937_64 rng(137);
  for (Arch arch : kAllArchs) {
    DYNAMIC_SECTION("arch " << to_string(arch)) {
      auto model = make_model(toy_config(arch));
      const ModelConfig& cfg = model->config();
      const int B = 4;
      std::vector<Tensor> windows;
      for (int b = 0; b < B; ++b) windows.push_back(random_window(cfg, rng));
      BatchInput batch;
      batch.batch = B;
      batch.x_t.assign(static_cast<size_t>(cfg.input_len), Tensor(Shape::mat(B, cfg.n_vars)));
      batch.x_var.assign(static_cast<size_t>(cfg.n_vars), Tensor(Shape::mat(B, cfg.input_len)));
      for (int b = 0; b < B; ++b)
        for (int t = 0; t < cfg.input_len; ++t)
          for (int i = 0; i < cfg.n_vars; ++i) {
            batch.x_t[static_cast<size_t>(t)].at(b, i) = windows[static_cast<size_t>(b)].at(i, t);
            batch.x_var[static_cast<size_t>(i)].at(b, t) = windows[static_cast<size_t>(b)].at(i, t);
          }
      Graph g;
      std::mt19937_64 drng(0);
      BatchForward bf = model->build(g, batch, Mode::kEval, drng);
      auto pred = g.values(bf.pred);
      for (int b = 0; b < B; ++b) {
        ForwardResult single = model->forward(windows[static_cast<size_t>(b)], Mode::kEval);
        for (int j = 0; j < cfg.output_len; ++j)
          REQUIRE(single.y_hat[static_cast<size_t>(j)] ==
                  pred[static_cast<size_t>(b) * cfg.output_len + static_cast<size_t>(j)]);
      }
    }
  }
}

TEST_CASE("attention rows are simplex vectors for every attention arch", "[models]") {
  std::mt19937_64 rng(149);
  for (Arch arch : kAttentionArchs) {
    DYNAMIC_SECTION("arch " << to_string(arch)) {
      for (int rep = 0; rep < 10; ++rep) {
        auto model = make_model(toy_config(arch, 1000 + static_cast<uint64_t>(rep)));
        ForwardResult r = model->forward(random_window(model->config(), rng, 2.0), Mode::kEval);
        REQUIRE(r.attn.temporal_rows == model->config().output_len);
        for (int row = 0; row < r.attn.temporal_rows; ++row) {
          double sum = 0.0;
          for (int t = 0; t < r.attn.input_len; ++t) {
            REQUIRE(r.attn.temporal_at(row, t) >= 0.0);
            sum += r.attn.temporal_at(row, t);
          }
          REQUIRE(std::fabs(sum - 1.0) <= 1e-9);
        }
        if (arch == Arch::kLstmAtt) continue;  // temporal attention only
        const int expected_rows =
            arch == Arch::kDaRnn ? model->config().input_len : model->config().output_len;
        REQUIRE(r.attn.spatial_rows == expected_rows);
        for (int row = 0; row < r.attn.spatial_rows; ++row) {
          double sum = 0.0;
          for (int i = 0; i < r.attn.n_vars; ++i) {
            REQUIRE(r.attn.spatial_at(row, i) >= 0.0);
            sum += r.attn.spatial_at(row, i);
          }
          REQUIRE(std::fabs(sum - 1.0) <= 1e-9);
        }
      }
    }
  }
}

TEST_CASE("da_rnn weighted input: N=1 identity and future dependence", "[models]") {
  std::mt19937_64 rng(151);

  SECTION("a single variable gets weight 1 so X_hat = X") {
    ModelConfig cfg = toy_config(Arch::kDaRnn);
    cfg.n_vars = 1;
    DaRnnModel model(cfg);
    Tensor X = random_window(cfg, rng);
    Tensor X_hat = model.weighted_input(X);
    for (size_t i = 0; i < X.values.size(); ++i) REQUIRE(X_hat.values[i] == X.values[i]);
  }

  SECTION("perturbing the future changes the first weighted step (5 seeds)") {
    int affected = 0;
    for (uint64_t seed = 1; seed <= 5; ++seed) {
      ModelConfig cfg = toy_config(Arch::kDaRnn, seed);
      DaRnnModel model(cfg);
      Tensor X = random_window(cfg, rng);
      Tensor X_pert = X;
      X_pert.at(0, cfg.input_len - 1) += 1.0;  // future-most sample of variable 0
      Tensor a = model.weighted_input(X);
      Tensor b = model.weighted_input(X_pert);
      bool changed = false;
      for (int i = 0; i < cfg.n_vars; ++i) changed = changed || a.at(i, 0) != b.at(i, 0);
      if (changed) ++affected;
    }
    REQUIRE(affected >= 4);
  }

  SECTION("β columns sum to 1 at every step") {
    ModelConfig cfg = toy_config(Arch::kDaRnn);
    DaRnnModel model(cfg);
    ForwardResult r = model.forward(random_window(cfg, rng), Mode::kEval);
    REQUIRE(r.attn.spatial_rows == cfg.input_len);
    for (int t = 0; t < cfg.input_len; ++t) {
      double sum = 0.0;
      for (int i = 0; i < cfg.n_vars; ++i) sum += r.attn.spatial_at(t, i);
      REQUIRE(sum == Approx(1.0).margin(1e-12));
    }
  }
}

TEST_CASE("param_count: pinned value, audits and Ty independence", "[models][costs]") {
  SECTION("the reference STAM setup counts 24,075 parameters exactly") {
    ModelConfig cfg;
    cfg.arch = Arch::kStam;
    cfg.n_vars = 9;
    cfg.input_len = 5;
    cfg.output_len = 3;
    cfg.enc_dim = 32;
    cfg.dec_dim = 32;
    cfg.ctx_dim = 4;
    REQUIRE(param_count(cfg) == 24075);
    StamModel model(cfg);
    REQUIRE(model.param_total() == 24075);
  }

  SECTION("hand-summable minimal config") {
    ModelConfig cfg = toy_config(Arch::kStam);
    cfg.n_vars = 1;
    cfg.input_len = 1;
    cfg.enc_dim = 1;
    cfg.dec_dim = 1;
    cfg.ctx_dim = 1;
    // embed 2; enc1 12; enc2 12; aligns 6; reducers 4; decoders 32; head 3
    REQUIRE(param_count(cfg) == 71);
    StamModel model(cfg);
    REQUIRE(model.param_total() == 71);
  }

  SECTION("count never depends on output_len") {
    for (Arch arch : kAllArchs) {
      ModelConfig cfg = toy_config(arch);
      cfg.output_len = 1;
      const int64_t base = param_count(cfg);
      cfg.output_len = 9;
      REQUIRE(param_count(cfg) == base);
    }
  }

  SECTION("closed form equals constructed totals on 20 random configs") {
    std::mt19937_64 rng(157);
    std::uniform_int_distribution<int> dim(1, 12), vars(1, 6), len(1, 6);
    for (int rep = 0; rep < 20; ++rep) {
      ModelConfig cfg;
      cfg.arch = kAllArchs[rep % 5];
      cfg.n_vars = vars(rng);
      cfg.input_len = len(rng);
      cfg.output_len = len(rng);
      cfg.enc_dim = dim(rng);
      cfg.dec_dim = dim(rng);
      cfg.ctx_dim = 1 + static_cast<int>(rng() % static_cast<uint64_t>(cfg.enc_dim));
      cfg.per_var_embed = rep % 7 == 3;
      cfg.seed = static_cast<uint64_t>(rep);
      auto model = make_model(cfg);
      CAPTURE(to_string(cfg.arch), cfg.n_vars, cfg.input_len, cfg.enc_dim, cfg.dec_dim,
              cfg.ctx_dim, cfg.per_var_embed);
      REQUIRE(model->param_total() == param_count(cfg));
    }
  }
}

TEST_CASE("flop_estimate reproduces the pinned arithmetic", "[models][costs]") {
  ModelConfig cfg;
  cfg.n_vars = 9;
  cfg.input_len = 5;
  cfg.output_len = 3;
  cfg.enc_dim = 32;
  cfg.dec_dim = 32;
  cfg.ctx_dim = 4;
  cfg.arch = Arch::kStam;
  REQUIRE(flop_estimate(cfg) == 89108);  // 55040 + 4116 + 29952
  cfg.arch = Arch::kStamLite;
  REQUIRE(flop_estimate(cfg) == 74132);  // 55040 + 4116 + 14976

  SECTION("lite always costs less") {
    std::mt19937_64 rng(163);
    std::uniform_int_distribution<int> dim(1, 64), len(1, 12);
    for (int rep = 0; rep < 50; ++rep) {
      ModelConfig c;
      c.n_vars = len(rng);
      c.input_len = len(rng);
      c.output_len = len(rng);
      c.enc_dim = dim(rng);
      c.dec_dim = dim(rng);
      c.ctx_dim = 1 + static_cast<int>(rng() % static_cast<uint64_t>(c.enc_dim));
      c.arch = Arch::kStam;
      const int64_t full = flop_estimate(c);
      c.arch = Arch::kStamLite;
      REQUIRE(flop_estimate(c) < full);
    }
  }

  SECTION("unsupported archs are rejected") {
    cfg.arch = Arch::kEncDec;
    REQUIRE_THROWS_AS(flop_estimate(cfg), ConfigError);
  }
}

TEST_CASE("weight files round-trip bitwise and reject corruption", "[models][serialize]") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "stam_serialize_test";
  fs::create_directories(dir);
  std::mt19937_64 rng(167);

  SECTION("save -> load -> forward is bitwise identical") {
    for (Arch arch : kAllArchs) {
      auto model = make_model(toy_config(arch, 99));
      Tensor X = random_window(model->config(), rng);
      ForwardResult before = model->forward(X, Mode::kEval);
      const std::string path = (dir / ("w_" + to_string(arch) + ".stamw")).string();
      save_weights(*model, path);
      auto loaded = load_weights(path);
      ForwardResult after = loaded->forward(X, Mode::kEval);
      REQUIRE(before.y_hat == after.y_hat);
    }
  }

  SECTION("truncated file reports corruption") {
    auto model = make_model(toy_config(Arch::kStam));
    const std::string path = (dir / "trunc.stamw").string();
    save_weights(*model, path);
    fs::resize_file(path, fs::file_size(path) - 64);
    REQUIRE_THROWS_AS(load_weights(path), IoError);
    fs::resize_file(path, 6);  // inside the magic
    REQUIRE_THROWS_AS(load_weights(path), IoError);
  }

  SECTION("garbage file is rejected by magic") {
    const std::string path = (dir / "garbage.stamw").string();
    std::ofstream(path) << "this is not a weight container at all";
    REQUIRE_THROWS_AS(load_weights(path), IoError);
  }

  SECTION("loading the wrong arch is a config mismatch") {
    auto model = make_model(toy_config(Arch::kEncDec));
    const std::string path = (dir / "encdec.stamw").string();
    save_weights(*model, path);
    REQUIRE_THROWS_AS(load_weights_as(path, Arch::kStam), ConfigError);
    REQUIRE_NOTHROW(load_weights_as(path, Arch::kEncDec));
  }
}

TEST_CASE("stam forward matches the straight-line reference within 1e-10", "[models][oracle]") {
  std::mt19937_64 rng(173);
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    auto model = make_model(toy_config(Arch::kStam, seed));
    Tensor X = random_window(model->config(), rng, 1.5);
    ForwardResult got = model->forward(X, Mode::kEval);
    oracle::ForwardRef want = oracle::stam_forward(*model, X);
    for (int j = 0; j < model->config().output_len; ++j) {
      REQUIRE(std::fabs(got.y_hat[static_cast<size_t>(j)] - want.y[static_cast<size_t>(j)]) <=
              1e-10);
      for (int i = 0; i < model->config().n_vars; ++i)
        REQUIRE(std::fabs(got.attn.spatial_at(j, i) -
                          want.beta[static_cast<size_t>(j)][static_cast<size_t>(i)]) <= 1e-10);
      for (int t = 0; t < model->config().input_len; ++t)
        REQUIRE(std::fabs(got.attn.temporal_at(j, t) -
                          want.alpha[static_cast<size_t>(j)][static_cast<size_t>(t)]) <= 1e-10);
    }
  }
}

TEST_CASE("stam_lite forward matches the straight-line reference within 1e-10",
          "[models][oracle]") {
  std::mt19937_64 rng(179);
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    auto model = make_model(toy_config(Arch::kStamLite, seed));
    Tensor X = random_window(model->config(), rng, 1.5);
    ForwardResult got = model->forward(X, Mode::kEval);
    oracle::ForwardRef want = oracle::stam_lite_forward(*model, X);
    for (int j = 0; j < model->config().output_len; ++j) {
      REQUIRE(std::fabs(got.y_hat[static_cast<size_t>(j)] - want.y[static_cast<size_t>(j)]) <=
              1e-10);
      for (int i = 0; i < model->config().n_vars; ++i)
        REQUIRE(std::fabs(got.attn.spatial_at(j, i) -
                          want.beta[static_cast<size_t>(j)][static_cast<size_t>(i)]) <= 1e-10);
    }
  }
}

TEST_CASE("full STAM and STAM-Lite pass end-to-end gradient checks", "[models][gradcheck]") {
  std::mt19937_64 rng(181);
  for (Arch arch : {Arch::kStam, Arch::kStamLite}) {
    DYNAMIC_SECTION("arch " << to_string(arch)) {
      auto model = make_model(toy_config(arch, 4242));
      Tensor X = random_window(model->config(), rng);
      Tensor target(Shape::mat(1, model->config().output_len));
      std::uniform_real_distribution<double> u(-1, 1);
      for (double& v : target.values) v = u(rng);
      std::vector<Tensor*> params = param_ptrs(*model);
      std::mt19937_64 drng(0);
      auto builder = [&](Graph& g) {
        BatchForward bf = model->build(g, BatchInput::from_window(X), Mode::kEval, drng);
        Var diff = g.sub(bf.pred, g.constant(target));
        return g.scale(g.sum(g.mul(diff, diff)), 1.0 / static_cast<double>(target.count()));
      };
      GradCheckReport report = grad_check(builder, params, 1e-5, 1e-4);
      CAPTURE(report.max_rel_err);
      REQUIRE(report.pass);
    }
  }
}

TEST_CASE("seed determinism: same config gives identical initial weights", "[models]") {
  for (Arch arch : kAllArchs) {
    auto a = make_model(toy_config(arch, 77));
    auto b = make_model(toy_config(arch, 77));
    auto c = make_model(toy_config(arch, 78));
    REQUIRE(a->params().size() == b->params().size());
    bool any_diff = false;
    for (size_t i = 0; i < a->params().size(); ++i) {
      REQUIRE(a->params()[i].tensor->values == b->params()[i].tensor->values);
      any_diff = any_diff || a->params()[i].tensor->values != c->params()[i].tensor->values;
    }
    REQUIRE(any_diff);
  }
}

TEST_CASE("forward rejects malformed windows", "[models]") {
  auto model = make_model(toy_config(Arch::kStam));
  REQUIRE_THROWS_AS(model->forward(Tensor(Shape::mat(2, 4)), Mode::kEval), ShapeError);
  Tensor bad(Shape::mat(3, 4));
  bad.values[5] = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_AS(model->forward(bad, Mode::kEval), ContractError);
}
