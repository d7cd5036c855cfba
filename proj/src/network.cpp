// wsm/network.cpp

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

#include "wsm/network.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "wsm/distance.hpp"
#include "wsm/error.hpp"
#include "wsm/rng.hpp"

namespace wsm {

void NetConfig::check_valid() const {
  if (input_dim < 1 || hidden_layers < 1 || hidden_units < 1 ||
      embedding_blocks < 1 || block_dim < 1)
    fail(ErrorCode::InvalidArgument, "network sizes must be >= 1");
  if (!(margin > 0.0 && margin < 1.0))
    fail(ErrorCode::InvalidArgument, "margin must be in (0, 1)");
}

Json NetConfig::to_json() const {
  Json doc;
  doc["input_dim"] = input_dim;
  doc["hidden_layers"] = hidden_layers;
  doc["hidden_units"] = hidden_units;
  doc["embedding_blocks"] = embedding_blocks;
  doc["block_dim"] = block_dim;
  doc["margin"] = margin;
  doc["seed"] = seed;
  return doc;
}

NetConfig NetConfig::from_json(const Json& doc) {
  NetConfig cfg;
  cfg.input_dim = doc.value("input_dim", cfg.input_dim);
  cfg.hidden_layers = doc.value("hidden_layers", cfg.hidden_layers);
  cfg.hidden_units = doc.value("hidden_units", cfg.hidden_units);
  cfg.embedding_blocks = doc.value("embedding_blocks", cfg.embedding_blocks);
  cfg.block_dim = doc.value("block_dim", cfg.block_dim);
  cfg.margin = doc.value("margin", cfg.margin);
  cfg.seed = doc.value("seed", cfg.seed);
  return cfg;
}

void TrainConfig::check_valid() const {
  if (epochs < 0 || batch_size < 1 || pairs_per_epoch < 1 || patience < 1)
    fail(ErrorCode::InvalidArgument, "training counts must be positive");
  if (learning_rate <= 0.0)
    fail(ErrorCode::InvalidArgument, "learning rate must be positive");
}

Json TrainConfig::to_json() const {
  Json doc;
  doc["epochs"] = epochs;
  doc["batch_size"] = batch_size;
  doc["learning_rate"] = learning_rate;
  doc["beta1"] = beta1;
  doc["beta2"] = beta2;
  doc["adam_epsilon"] = adam_epsilon;
  doc["pairs_per_epoch"] = pairs_per_epoch;
  doc["patience"] = patience;
  doc["seed"] = seed;
  return doc;
}

TrainConfig TrainConfig::from_json(const Json& doc) {
  TrainConfig cfg;
  cfg.epochs = doc.value("epochs", cfg.epochs);
  cfg.batch_size = doc.value("batch_size", cfg.batch_size);
  cfg.learning_rate = doc.value("learning_rate", cfg.learning_rate);
  cfg.beta1 = doc.value("beta1", cfg.beta1);
  cfg.beta2 = doc.value("beta2", cfg.beta2);
  cfg.adam_epsilon = doc.value("adam_epsilon", cfg.adam_epsilon);
  cfg.pairs_per_epoch = doc.value("pairs_per_epoch", cfg.pairs_per_epoch);
  cfg.patience = doc.value("patience", cfg.patience);
  cfg.seed = doc.value("seed", cfg.seed);
  return cfg;
}

Network init_network(const NetConfig& config) {
  config.check_valid();
  Network net;
  net.config = config;
  Rng rng = substream(config.seed, "init");

  std::vector<int> widths;
  widths.push_back(config.input_dim);
  for (int l = 0; l < config.hidden_layers; ++l)
    widths.push_back(config.hidden_units);
  widths.push_back(config.embedding_dim());

  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const int fan_in = widths[l];
    const int fan_out = widths[l + 1];
    const double s = std::sqrt(6.0 / (fan_in + fan_out));
    Matrix w(fan_out, fan_in);
    for (Index r = 0; r < w.rows(); ++r)
      for (Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-s, s);
    net.weights.push_back(std::move(w));
    net.biases.push_back(Vector::Zero(fan_out));
  }
  return net;
}

namespace {

// Pre-activations and activations per layer, for backprop.
struct ForwardTrace {
  std::vector<Matrix> pre;  // Z_l, one per weight layer
  std::vector<Matrix> act;  // A_0 = input .. A_L = embedding
};

ForwardTrace forward_trace(const Network& net, const Matrix& inputs) {
  if (inputs.cols() != net.config.input_dim)
    fail(ErrorCode::DimensionMismatch,
         "input has dimension " + std::to_string(inputs.cols()) +
             ", network expects " + std::to_string(net.config.input_dim));
  ForwardTrace trace;
  trace.act.push_back(inputs);
  const int layers = net.num_layers();
  for (int l = 0; l < layers; ++l) {
    Matrix z = trace.act.back() * net.weights[l].transpose();
    z.rowwise() += net.biases[l].transpose();
    if (l + 1 < layers)
      trace.act.push_back(z.cwiseMax(0.0));
    else
      trace.act.push_back(z);
    trace.pre.push_back(std::move(z));
  }
  return trace;
}

}  // namespace

Matrix Network::forward(const Matrix& inputs) const {
  if (inputs.cols() != config.input_dim)
    fail(ErrorCode::DimensionMismatch,
         "input has dimension " + std::to_string(inputs.cols()) +
             ", network expects " + std::to_string(config.input_dim));
  Matrix a = inputs;
  const int layers = num_layers();
  for (int l = 0; l < layers; ++l) {
    Matrix z = a * weights[l].transpose();
    z.rowwise() += biases[l].transpose();
    a = (l + 1 < layers) ? z.cwiseMax(0.0) : std::move(z);
  }
  return a;
}

Vector Network::forward(const Vector& input) const {
  return forward(Matrix(input.transpose())).row(0).transpose();
}

double margin_cosine_loss(const Vector& e1, const Vector& e2, int label,
                          double margin, int blocks) {
  if (e1.size() != e2.size())
    fail(ErrorCode::DimensionMismatch, "embedding sizes differ");
  if (blocks < 1 || e1.size() % blocks != 0)
    fail(ErrorCode::InvalidArgument, "embedding does not split into blocks");
  const Index width = e1.size() / blocks;
  double loss = 0.0;
  for (int b = 0; b < blocks; ++b) {
    const double cos =
        cosine_similarity(e1.segment(b * width, width).eval(),
                          e2.segment(b * width, width).eval());
    loss += label == 1 ? -cos : std::max(0.0, cos - margin);
  }
  return loss;
}

LossGrad margin_cosine_loss_grad(const Vector& e1, const Vector& e2, int label,
                                 double margin, int blocks) {
  if (e1.size() != e2.size())
    fail(ErrorCode::DimensionMismatch, "embedding sizes differ");
  if (blocks < 1 || e1.size() % blocks != 0)
    fail(ErrorCode::InvalidArgument, "embedding does not split into blocks");
  const Index width = e1.size() / blocks;
  LossGrad out;
  out.d_e1 = Vector::Zero(e1.size());
  out.d_e2 = Vector::Zero(e2.size());
  for (int b = 0; b < blocks; ++b) {
    const Vector u = e1.segment(b * width, width);
    const Vector v = e2.segment(b * width, width);
    const double nu = u.norm();
    const double nv = v.norm();
    if (nu == 0.0 || nv == 0.0) {
      // cosine pinned to 0; treat the block as flat for the gradient too
      out.loss += label == 1 ? -0.0 : std::max(0.0, 0.0 - margin);
      continue;
    }
    const double cos = cosine_similarity(u, v);
    const double block_loss =
        label == 1 ? -cos : std::max(0.0, cos - margin);
    out.loss += block_loss;
    double scale;
    if (label == 1)
      scale = -1.0;
    else if (cos > margin)
      scale = 1.0;
    else
      continue;  // inactive hinge: zero gradient
    // d cos / d u = (v/|v| - cos * u/|u|) / |u|
    out.d_e1.segment(b * width, width) =
        scale * (v / nv - cos * (u / nu)) / nu;
    out.d_e2.segment(b * width, width) =
        scale * (u / nu - cos * (v / nv)) / nv;
  }
  return out;
}

BackwardResult backward(const Network& net,
                        const std::vector<PairExample>& batch) {
  if (batch.empty()) fail(ErrorCode::InvalidArgument, "empty batch");
  const Index n = static_cast<Index>(batch.size());
  const int in_dim = net.config.input_dim;
  Matrix x1(n, in_dim), x2(n, in_dim);
  for (Index i = 0; i < n; ++i) {
    x1.row(i) = batch[i].x1.transpose();
    x2.row(i) = batch[i].x2.transpose();
  }

  const ForwardTrace t1 = forward_trace(net, x1);
  const ForwardTrace t2 = forward_trace(net, x2);
  const Matrix& emb1 = t1.act.back();
  const Matrix& emb2 = t2.act.back();

  const double inv_n = 1.0 / static_cast<double>(n);
  Matrix d1(n, emb1.cols()), d2(n, emb2.cols());
  double loss_sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    const LossGrad g = margin_cosine_loss_grad(
        emb1.row(i).transpose(), emb2.row(i).transpose(), batch[i].label,
        net.config.margin, net.config.embedding_blocks);
    loss_sum += g.loss;
    d1.row(i) = g.d_e1.transpose() * inv_n;
    d2.row(i) = g.d_e2.transpose() * inv_n;
  }

  BackwardResult result;
  result.mean_loss = loss_sum * inv_n;
  const int layers = net.num_layers();
  result.grads.weights.resize(layers);
  result.grads.biases.resize(layers);
  for (int l = 0; l < layers; ++l) {
    result.grads.weights[l] = Matrix::Zero(net.weights[l].rows(),
                                           net.weights[l].cols());
    result.grads.biases[l] = Vector::Zero(net.biases[l].size());
  }

  const auto backprop_branch = [&](const ForwardTrace& trace, Matrix dz) {
    for (int l = layers - 1; l >= 0; --l) {
      result.grads.weights[l].noalias() += dz.transpose() * trace.act[l];
      result.grads.biases[l] += dz.colwise().sum().transpose();
      if (l > 0) {
        Matrix da = dz * net.weights[l];
        // ReLU derivative, 0 at the kink
        dz = (trace.pre[l - 1].array() > 0.0).cast<double>() * da.array();
      }
    }
  };
  backprop_branch(t1, d1);
  backprop_branch(t2, d2);
  return result;
}

namespace {

double mean_loss_on(const Network& net, const std::vector<PairExample>& examples,
                    int batch_size) {
  if (examples.empty()) return std::numeric_limits<double>::quiet_NaN();
  double total = 0.0;
  const int in_dim = net.config.input_dim;
  for (std::size_t begin = 0; begin < examples.size();
       begin += static_cast<std::size_t>(batch_size)) {
    const std::size_t count =
        std::min<std::size_t>(batch_size, examples.size() - begin);
    Matrix x1(count, in_dim), x2(count, in_dim);
    for (std::size_t i = 0; i < count; ++i) {
      x1.row(i) = examples[begin + i].x1.transpose();
      x2.row(i) = examples[begin + i].x2.transpose();
    }
    const Matrix e1 = net.forward(x1);
    const Matrix e2 = net.forward(x2);
    for (std::size_t i = 0; i < count; ++i)
      total += margin_cosine_loss(e1.row(i).transpose(), e2.row(i).transpose(),
                                  examples[begin + i].label, net.config.margin,
                                  net.config.embedding_blocks);
  }
  return total / static_cast<double>(examples.size());
}

struct AdamState {
  std::vector<Matrix> mw, vw;
  std::vector<Vector> mb, vb;
  std::int64_t step = 0;

  explicit AdamState(const Network& net) {
    for (int l = 0; l < net.num_layers(); ++l) {
      mw.push_back(Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
      vw.push_back(Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
      mb.push_back(Vector::Zero(net.biases[l].size()));
      vb.push_back(Vector::Zero(net.biases[l].size()));
    }
  }

  void update(Network& net, const Gradients& grads, const TrainConfig& cfg) {
    ++step;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
    for (int l = 0; l < net.num_layers(); ++l) {
      mw[l] = cfg.beta1 * mw[l] + (1.0 - cfg.beta1) * grads.weights[l];
      vw[l] = cfg.beta2 * vw[l].array() +
              (1.0 - cfg.beta2) * grads.weights[l].array().square();
      net.weights[l].array() -=
          cfg.learning_rate * (mw[l].array() / bc1) /
          ((vw[l].array() / bc2).sqrt() + cfg.adam_epsilon);
      mb[l] = cfg.beta1 * mb[l] + (1.0 - cfg.beta1) * grads.biases[l];
      vb[l] = cfg.beta2 * vb[l].array() +
              (1.0 - cfg.beta2) * grads.biases[l].array().square();
      net.biases[l].array() -=
          cfg.learning_rate * (mb[l].array() / bc1) /
          ((vb[l].array() / bc2).sqrt() + cfg.adam_epsilon);
    }
  }
};

}  // namespace

std::pair<Network, TrainLog> train(Network net, const TrainConfig& config,
                                   const PairStream& stream) {
  config.check_valid();
  TrainLog log;
  AdamState adam(net);

  Network best = net;
  bool stopped_early = false;
  double best_heldout = std::numeric_limits<double>::infinity();
  int stall = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<PairExample> examples =
        stream.epoch_examples(static_cast<std::size_t>(epoch));
    if (examples.empty())
      fail(ErrorCode::InvalidArgument, "pair stream produced no examples");

    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t begin = 0; begin < examples.size();
         begin += static_cast<std::size_t>(config.batch_size), ++batch_index) {
      const std::size_t count =
          std::min<std::size_t>(config.batch_size, examples.size() - begin);
      const std::vector<PairExample> batch(examples.begin() + begin,
                                           examples.begin() + begin + count);
      const BackwardResult res = backward(net, batch);
      if (!std::isfinite(res.mean_loss))
        fail(ErrorCode::DivergedLoss,
             "non-finite loss in epoch " + std::to_string(epoch) + ", batch " +
                 std::to_string(batch_index));
      loss_sum += res.mean_loss * static_cast<double>(count);
      adam.update(net, res.grads, config);
    }

    EpochStats stats;
    stats.train_loss = loss_sum / static_cast<double>(examples.size());
    stats.heldout_loss =
        mean_loss_on(net, stream.heldout_examples(), config.batch_size);
    stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    log.epochs.push_back(stats);

    if (std::isfinite(stats.heldout_loss)) {
      if (stats.heldout_loss < best_heldout) {
        best_heldout = stats.heldout_loss;
        best = net;
        log.best_epoch = epoch;
        stall = 0;
      } else if (++stall >= config.patience) {
        stopped_early = true;
        break;
      }
    }
  }

  return {stopped_early ? std::move(best) : std::move(net), std::move(log)};
}

std::string TrainLog::to_csv() const {
  std::string out = "epoch,train_loss,heldout_loss,seconds\n";
  char buf[160];
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.3f\n", i,
                  epochs[i].train_loss, epochs[i].heldout_loss,
                  epochs[i].seconds);
    out += buf;
  }
  return out;
}

EmbeddingArchive embed_corpus(const Network& net, const Corpus& corpus,
                              const ModalityMask& mask,
                              const Preprocessor& prep) {
  EmbeddingArchive archive;
  archive.dim = net.config.embedding_dim();
  const ModalityLayout stacked_layout = prep.stacked_layout();
  for (const UtteranceRecord& utt : corpus.utterances) {
    const Matrix stacked = prep.stacked(utt).data;
    archive.sequences[utt.id] =
        net.forward(knockout(stacked, mask, stacked_layout));
  }
  return archive;
}

EmbeddingArchive raw_archive(const Corpus& corpus, const ModalityMask& mask,
                             const Preprocessor& prep) {
  EmbeddingArchive archive;
  archive.dim = prep.layout().total_dim();
  for (const UtteranceRecord& utt : corpus.utterances) {
    const Matrix concat = prep.concat_preprocessed(utt).data;
    archive.sequences[utt.id] = knockout(concat, mask, prep.layout());
  }
  return archive;
}

void save_network(const std::filesystem::path& dir, const Network& net,
                  const Json& extra_metadata) {
  std::filesystem::create_directories(dir);
  Json doc;
  doc["format_version"] = 1;
  doc["config"] = net.config.to_json();
  Json layers = Json::array();
  for (int l = 0; l < net.num_layers(); ++l) {
    const std::string w_file = "w" + std::to_string(l) + ".wsmf";
    const std::string b_file = "b" + std::to_string(l) + ".wsmf";
    write_wsmf(dir / w_file, net.weights[l]);
    write_wsmf(dir / b_file, Matrix(net.biases[l].transpose()));
    Json entry;
    entry["weights"] = w_file;
    entry["bias"] = b_file;
    entry["in"] = static_cast<int>(net.weights[l].cols());
    entry["out"] = static_cast<int>(net.weights[l].rows());
    layers.push_back(std::move(entry));
  }
  doc["layers"] = std::move(layers);
  doc["metadata"] = extra_metadata;
  write_json_file(dir / "model.json", doc);
}

Network load_network(const std::filesystem::path& dir) {
  const Json doc = read_json_file(dir / "model.json");
  Network net;
  net.config = NetConfig::from_json(doc.at("config"));
  for (const auto& entry : doc.at("layers")) {
    net.weights.push_back(read_wsmf(dir / entry.at("weights").get<std::string>()));
    const Matrix b = read_wsmf(dir / entry.at("bias").get<std::string>());
    net.biases.push_back(b.row(0).transpose());
  }
  return net;
}

Json load_network_metadata(const std::filesystem::path& dir) {
  const Json doc = read_json_file(dir / "model.json");
  return doc.value("metadata", Json::object());
}

}  // namespace wsm
