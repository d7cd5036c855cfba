// tests/test_network.cpp

// Copyright 2026  The wsm authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "oracles/test_corpora.hpp"
#include "wsm/network.hpp"

using namespace wsm;

namespace {

NetConfig tiny_config(int layers, std::uint64_t seed) {
  NetConfig cfg;
  cfg.input_dim = 4;
  cfg.hidden_layers = layers;
  cfg.hidden_units = 3;
  cfg.embedding_blocks = 2;
  cfg.block_dim = 2;
  cfg.seed = seed;
  return cfg;
}

// Batch whose loss surface is smooth around the operating point: no
// pre-activation near the ReLU kink, no hinge near the margin, no tiny norms.
struct SmoothBatch {
  Network net;
  std::vector<PairExample> batch;
};

SmoothBatch make_smooth_batch(int layers, std::uint64_t seed) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    const NetConfig cfg = tiny_config(layers, seed + attempt * 1000003);
    Network net = init_network(cfg);
    Rng rng(substream_seed(seed + attempt, "gradcheck.batch"));
    std::vector<PairExample> batch;
    for (int i = 0; i < 4; ++i) {
      PairExample ex;
      ex.x1.resize(cfg.input_dim);
      ex.x2.resize(cfg.input_dim);
      for (Index d = 0; d < cfg.input_dim; ++d) {
        ex.x1[d] = rng.uniform(-1.0, 1.0);
        ex.x2[d] = rng.uniform(-1.0, 1.0);
      }
      ex.label = i % 2;
      batch.push_back(std::move(ex));
    }

    bool smooth = true;
    for (const PairExample& ex : batch) {
      for (const Vector* x : {&ex.x1, &ex.x2}) {
        Matrix a = x->transpose();
        for (int l = 0; l < net.num_layers(); ++l) {
          Matrix z = a * net.weights[l].transpose();
          z.rowwise() += net.biases[l].transpose();
          if (l + 1 < net.num_layers() && z.cwiseAbs().minCoeff() < 1e-3)
            smooth = false;
          a = l + 1 < net.num_layers() ? z.cwiseMax(0.0) : z;
        }
      }
      const Vector e1 = net.forward(ex.x1);
      const Vector e2 = net.forward(ex.x2);
      const int width = cfg.block_dim;
      for (int b = 0; b < cfg.embedding_blocks; ++b) {
        const Vector u = e1.segment(b * width, width);
        const Vector v = e2.segment(b * width, width);
        if (u.norm() < 1e-3 || v.norm() < 1e-3) smooth = false;
        const double cos = u.dot(v) / (u.norm() * v.norm());
        if (ex.label == 0 && std::abs(cos - cfg.margin) < 1e-3) smooth = false;
      }
    }
    if (smooth) return {std::move(net), std::move(batch)};
  }
}

double batch_loss(const Network& net, const std::vector<PairExample>& batch) {
  double total = 0.0;
  for (const PairExample& ex : batch)
    total += margin_cosine_loss(net.forward(ex.x1), net.forward(ex.x2),
                                ex.label, net.config.margin,
                                net.config.embedding_blocks);
  return total / static_cast<double>(batch.size());
}

}  // namespace

TEST_CASE("init_network is deterministic and fan-shaped") {
  NetConfig cfg;
  cfg.input_dim = 560;
  cfg.seed = 9;
  const Network a = init_network(cfg);
  const Network b = init_network(cfg);
  REQUIRE(a.num_layers() == 6);  // 5 hidden + output
  const std::vector<std::pair<int, int>> shapes = {
      {1000, 560},  {1000, 1000}, {1000, 1000},
      {1000, 1000}, {1000, 1000}, {78, 1000}};
  for (int l = 0; l < 6; ++l) {
    CHECK(a.weights[l].rows() == shapes[l].first);
    CHECK(a.weights[l].cols() == shapes[l].second);
    CHECK(a.weights[l] == b.weights[l]);  // bit-identical across runs
    CHECK(a.biases[l].cwiseAbs().maxCoeff() == 0.0);
    const double bound =
        std::sqrt(6.0 / (shapes[l].first + shapes[l].second));
    CHECK(a.weights[l].cwiseAbs().maxCoeff() <= bound);
  }
}

TEST_CASE("forward of a zero network is zero") {
  NetConfig cfg = tiny_config(2, 1);
  Network net = init_network(cfg);
  for (Matrix& w : net.weights) w.setZero();
  Vector x = Vector::Ones(cfg.input_dim);
  CHECK(net.forward(x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("batch forward rows equal single-input forwards") {
  const NetConfig cfg = tiny_config(3, 2);
  const Network net = init_network(cfg);
  Rng rng(4);
  Matrix inputs(5, cfg.input_dim);
  for (Index r = 0; r < 5; ++r)
    for (Index c = 0; c < cfg.input_dim; ++c) inputs(r, c) = rng.normal();
  const Matrix batch = net.forward(inputs);
  for (Index r = 0; r < 5; ++r) {
    const Vector single = net.forward(Vector(inputs.row(r).transpose()));
    CHECK((batch.row(r).transpose() - single).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("forward matches a hand computation on a 2-1-2 net") {
  NetConfig cfg;
  cfg.input_dim = 2;
  cfg.hidden_layers = 1;
  cfg.hidden_units = 1;
  cfg.embedding_blocks = 1;
  cfg.block_dim = 2;
  Network net = init_network(cfg);
  net.weights[0] << 1.0, -2.0;
  net.biases[0] << 0.5;
  net.weights[1] << 3.0, -1.0;
  net.biases[1] << 0.25, -0.5;
  Vector x(2);
  x << 1.0, -1.0;
  // z = 1*1 + (-2)(-1) + 0.5 = 3.5; relu -> 3.5; e = (3*3.5+0.25, -3.5-0.5)
  const Vector e = net.forward(x);
  CHECK(e[0] == doctest::Approx(10.75));
  CHECK(e[1] == doctest::Approx(-4.0));

  x << -1.0, 1.0;  // z = -3.5 + 0.5 = -3 -> relu 0 -> e = biases
  const Vector e2 = net.forward(x);
  CHECK(e2[0] == doctest::Approx(0.25));
  CHECK(e2[1] == doctest::Approx(-0.5));
}

TEST_CASE("margin cosine loss anchors") {
  Vector e(3);
  e << 1.0, 2.0, -0.5;
  CHECK(margin_cosine_loss(e, e, 1, 0.5, 1) == -1.0);  // identical, y=1

  Vector u(2), v(2);
  u << 1.0, 0.0;
  v << 0.0, 1.0;
  CHECK(margin_cosine_loss(u, v, 0, 0.5, 1) == 0.0);  // orthogonal, y=0
  CHECK(margin_cosine_loss(u, u, 0, 0.5, 1) == 0.5);  // identical, y=0
}

TEST_CASE("margin cosine loss handles zero embeddings and blocks") {
  Vector z = Vector::Zero(4);
  Vector e = Vector::Ones(4);
  CHECK(margin_cosine_loss(z, e, 1, 0.5, 2) == 0.0);  // cosine pinned to 0
  CHECK(margin_cosine_loss(z, e, 0, 0.5, 2) == 0.0);

  // blockwise: first blocks identical, second blocks orthogonal
  Vector a(4), b(4);
  a << 1, 0, 1, 0;
  b << 1, 0, 0, 1;
  CHECK(margin_cosine_loss(a, b, 1, 0.5, 2) == doctest::Approx(-1.0));
  CHECK(margin_cosine_loss(a, b, 0, 0.5, 2) == doctest::Approx(0.5));
}

TEST_CASE("margin cosine loss is symmetric and scale free") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    Vector u(6), v(6);
    for (Index d = 0; d < 6; ++d) {
      u[d] = rng.normal();
      v[d] = rng.normal();
    }
    const int y = trial % 2;
    const double base = margin_cosine_loss(u, v, y, 0.5, 2);
    CHECK(margin_cosine_loss(v, u, y, 0.5, 2) ==
          doctest::Approx(base).epsilon(1e-12));
    CHECK(margin_cosine_loss(Vector(3.0 * u), Vector(7.0 * v), y, 0.5, 2) ==
          doctest::Approx(base).epsilon(1e-9));
    // bounds per two blocks
    CHECK(base <= (y == 1 ? 2.0 : 1.0) + 1e-12);
    CHECK(base >= (y == 1 ? -2.0 : 0.0) - 1e-12);
  }
}

TEST_CASE("loss gradient vanishes for identical unit embeddings") {
  Vector e(2);
  e << 0.6, 0.8;  // unit norm
  const LossGrad g = margin_cosine_loss_grad(e, e, 1, 0.5, 1);
  CHECK(g.loss == -1.0);
  CHECK(g.d_e1.cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.d_e2.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("inactive hinge has zero gradient") {
  Vector u(2), v(2);
  u << 1.0, 0.1;
  v << -0.2, 1.0;  // cosine well below 0.5
  const LossGrad g = margin_cosine_loss_grad(u, v, 0, 0.5, 1);
  CHECK(g.loss == 0.0);
  CHECK(g.d_e1.cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.d_e2.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("analytic gradients match central finite differences") {
  for (int layers = 1; layers <= 5; ++layers) {
    for (int rep = 0; rep < 3; ++rep) {
      SmoothBatch fixture =
          make_smooth_batch(layers, 1000 * layers + rep);
      Network& net = fixture.net;
      const BackwardResult res = backward(net, fixture.batch);
      REQUIRE(std::isfinite(res.mean_loss));
      const double h = 1e-5;
      for (int l = 0; l < net.num_layers(); ++l) {
        for (Index r = 0; r < net.weights[l].rows(); ++r) {
          for (Index c = 0; c < net.weights[l].cols(); ++c) {
            const double saved = net.weights[l](r, c);
            net.weights[l](r, c) = saved + h;
            const double up = batch_loss(net, fixture.batch);
            net.weights[l](r, c) = saved - h;
            const double down = batch_loss(net, fixture.batch);
            net.weights[l](r, c) = saved;
            const double fd = (up - down) / (2.0 * h);
            const double an = res.grads.weights[l](r, c);
            const double rel = std::abs(an - fd) /
                               std::max({std::abs(an), std::abs(fd), 1e-6});
            CHECK(rel < 1e-4);
          }
        }
        for (Index r = 0; r < net.biases[l].size(); ++r) {
          const double saved = net.biases[l][r];
          net.biases[l][r] = saved + h;
          const double up = batch_loss(net, fixture.batch);
          net.biases[l][r] = saved - h;
          const double down = batch_loss(net, fixture.batch);
          net.biases[l][r] = saved;
          const double fd = (up - down) / (2.0 * h);
          const double an = res.grads.biases[l][r];
          const double rel = std::abs(an - fd) /
                             std::max({std::abs(an), std::abs(fd), 1e-6});
          CHECK(rel < 1e-4);
        }
      }
    }
  }
}

namespace {

// Corpus whose words have constant per-word signatures plus a bit of noise:
// the sameness signal is trivially learnable.
Corpus learnable_corpus() {
  std::vector<testing::UttSpec> specs;
  for (int i = 0; i < 18; ++i) {
    const std::string label = "w" + std::to_string(i % 3);
    specs.push_back({"u" + std::to_string(i),
                     i % 2 == 0 ? "spk1" : "spk2",
                     {{label, 0, 8}},
                     {}});
  }
  Corpus corpus = testing::small_av_corpus(specs, 5);
  Rng rng(17);
  std::map<std::string, Matrix> protos;
  for (int w = 0; w < 3; ++w) {
    Matrix proto(1, 5);
    for (Index d = 0; d < 5; ++d) proto(0, d) = rng.normal() * 2.0;
    protos["w" + std::to_string(w)] = proto;
  }
  for (UtteranceRecord& utt : corpus.utterances) {
    const Matrix& proto = protos[utt.words[0].label];
    for (Index t = 0; t < 8; ++t) {
      for (Index d = 0; d < 3; ++d)
        utt.features["audio"].data(t, d) = proto(0, d) + rng.normal() * 0.1;
      for (Index d = 0; d < 2; ++d)
        utt.features["visual"].data(t, d) = proto(0, 3 + d) + rng.normal() * 0.1;
    }
  }
  return corpus;
}

}  // namespace

TEST_CASE("train: zero epochs returns the initial network unchanged") {
  const Corpus corpus = learnable_corpus();
  const Preprocessor prep = Preprocessor::fit(corpus, PrepConfig{});
  PairStreamConfig scfg;
  scfg.pairs_per_epoch = 4;
  scfg.heldout_pairs = 2;
  scfg.seed = 3;
  const PairStream stream(corpus, prep, scfg);
  NetConfig ncfg = tiny_config(1, 7);
  ncfg.input_dim = prep.layout().total_dim() * prep.stack_window();
  const Network before = init_network(ncfg);
  TrainConfig tcfg;
  tcfg.epochs = 0;
  auto [after, log] = train(before, tcfg, stream);
  CHECK(log.epochs.empty());
  for (int l = 0; l < before.num_layers(); ++l)
    CHECK(after.weights[l] == before.weights[l]);
}

TEST_CASE("train is deterministic given seeds") {
  const Corpus corpus = learnable_corpus();
  const Preprocessor prep = Preprocessor::fit(corpus, PrepConfig{});
  PairStreamConfig scfg;
  scfg.pairs_per_epoch = 8;
  scfg.heldout_pairs = 4;
  scfg.seed = 21;
  NetConfig ncfg = tiny_config(2, 5);
  ncfg.input_dim = prep.layout().total_dim() * prep.stack_window();
  TrainConfig tcfg;
  tcfg.epochs = 3;
  tcfg.batch_size = 32;

  const PairStream s1(corpus, prep, scfg);
  const PairStream s2(corpus, prep, scfg);
  auto [n1, l1] = train(init_network(ncfg), tcfg, s1);
  auto [n2, l2] = train(init_network(ncfg), tcfg, s2);
  REQUIRE(l1.epochs.size() == l2.epochs.size());
  for (std::size_t e = 0; e < l1.epochs.size(); ++e) {
    CHECK(l1.epochs[e].train_loss == l2.epochs[e].train_loss);
    CHECK(l1.epochs[e].heldout_loss == l2.epochs[e].heldout_loss);
  }
  for (int l = 0; l < n1.num_layers(); ++l)
    CHECK(n1.weights[l] == n2.weights[l]);
}

TEST_CASE("train reduces the loss on a learnable corpus") {
  const Corpus corpus = learnable_corpus();
  const Preprocessor prep = Preprocessor::fit(corpus, PrepConfig{});
  PairStreamConfig scfg;
  scfg.pairs_per_epoch = 16;
  scfg.heldout_pairs = 6;
  scfg.seed = 11;
  NetConfig ncfg;
  ncfg.input_dim = prep.layout().total_dim() * prep.stack_window();
  ncfg.hidden_layers = 2;
  ncfg.hidden_units = 16;
  ncfg.embedding_blocks = 2;
  ncfg.block_dim = 4;
  ncfg.seed = 13;
  TrainConfig tcfg;
  tcfg.epochs = 8;
  tcfg.batch_size = 64;
  const PairStream stream(corpus, prep, scfg);
  auto [net, log] = train(init_network(ncfg), tcfg, stream);
  REQUIRE(log.epochs.size() >= 2);
  CHECK(log.epochs.back().train_loss < log.epochs.front().train_loss);
}

TEST_CASE("train throws DivergedLoss on numeric blowup") {
  const Corpus corpus = learnable_corpus();
  const Preprocessor prep = Preprocessor::fit(corpus, PrepConfig{});
  PairStreamConfig scfg;
  scfg.pairs_per_epoch = 8;
  scfg.heldout_pairs = 0;
  scfg.seed = 2;
  NetConfig ncfg = tiny_config(1, 3);
  ncfg.input_dim = prep.layout().total_dim() * prep.stack_window();
  TrainConfig tcfg;
  tcfg.epochs = 4;
  tcfg.learning_rate = 1e200;
  const PairStream stream(corpus, prep, scfg);
  try {
    train(init_network(ncfg), tcfg, stream);
    FAIL("expected DivergedLoss");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DivergedLoss);
    CHECK(is_numeric_failure(e.code()));
  }
}

TEST_CASE("embed_corpus embeds every frame of every utterance") {
  const Corpus corpus = learnable_corpus();
  const Preprocessor prep = Preprocessor::fit(corpus, PrepConfig{});
  NetConfig ncfg = tiny_config(1, 4);
  ncfg.input_dim = prep.layout().total_dim() * prep.stack_window();
  const Network net = init_network(ncfg);
  const ModalityMask mask = ModalityMask::keeping({"audio", "visual"});
  const EmbeddingArchive archive = embed_corpus(net, corpus, mask, prep);
  CHECK(archive.dim == ncfg.embedding_dim());
  for (const UtteranceRecord& utt : corpus.utterances)
    CHECK(archive.require(utt.id).rows() ==
          utt.features.at("audio").frames());
}

TEST_CASE("embed_corpus with zero weights gives an all-zero archive") {
  const Corpus corpus = learnable_corpus();
  const Preprocessor prep = Preprocessor::fit(corpus, PrepConfig{});
  NetConfig ncfg = tiny_config(2, 4);
  ncfg.input_dim = prep.layout().total_dim() * prep.stack_window();
  Network net = init_network(ncfg);
  for (Matrix& w : net.weights) w.setZero();
  const EmbeddingArchive archive = embed_corpus(
      net, corpus, ModalityMask::keeping({"audio"}), prep);
  for (const auto& [id, seq] : archive.sequences)
    CHECK(seq.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("embedding archives round-trip through disk") {
  const Corpus corpus = learnable_corpus();
  const Preprocessor prep = Preprocessor::fit(corpus, PrepConfig{});
  const EmbeddingArchive archive =
      raw_archive(corpus, ModalityMask::keeping({"audio"}), prep);
  const auto dir = std::filesystem::temp_directory_path() / "wsm_arch_rt";
  std::filesystem::remove_all(dir);
  archive.save(dir);
  const EmbeddingArchive loaded = EmbeddingArchive::load(dir);
  CHECK(loaded.dim == archive.dim);
  REQUIRE(loaded.sequences.size() == archive.sequences.size());
  for (const auto& [id, seq] : archive.sequences) {
    CHECK((loaded.require(id) - seq).cwiseAbs().maxCoeff() < 1e-6);
  }
  CHECK_THROWS_AS(loaded.require("nonexistent"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("network serialization round-trips at float precision") {
  NetConfig cfg = tiny_config(3, 31);
  const Network net = init_network(cfg);
  const auto dir = std::filesystem::temp_directory_path() / "wsm_net_rt";
  std::filesystem::remove_all(dir);
  save_network(dir, net, Json{{"mode", "multi"}});
  const Network loaded = load_network(dir);
  CHECK(loaded.config.hidden_layers == cfg.hidden_layers);
  CHECK(loaded.config.block_dim == cfg.block_dim);
  REQUIRE(loaded.num_layers() == net.num_layers());
  for (int l = 0; l < net.num_layers(); ++l)
    CHECK((loaded.weights[l] - net.weights[l]).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(load_network_metadata(dir).at("mode") == "multi");
  std::filesystem::remove_all(dir);
}
