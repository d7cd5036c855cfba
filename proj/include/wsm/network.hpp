// wsm/network.hpp

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

#ifndef WSM_NETWORK_HPP
#define WSM_NETWORK_HPP

#include <filesystem>
#include <utility>
#include <vector>

#include "wsm/embedding.hpp"
#include "wsm/io.hpp"
#include "wsm/pairing.hpp"
#include "wsm/prep.hpp"
#include "wsm/types.hpp"

namespace wsm {

struct NetConfig {
  int input_dim = 0;
  int hidden_layers = 5;
  int hidden_units = 1000;
  int embedding_blocks = 2;
  int block_dim = 39;
  double margin = 0.5;
  std::uint64_t seed = 0;

  int embedding_dim() const { return embedding_blocks * block_dim; }
  void check_valid() const;

  Json to_json() const;
  static NetConfig from_json(const Json& doc);
};

/// Feedforward ReLU stack with a linear output layer; both Siamese branches
/// share these parameters. Weight layer l maps activations of width in(l)
/// to width out(l), stored out x in.
struct Network {
  NetConfig config;
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  int num_layers() const { return static_cast<int>(weights.size()); }

  /// Batch forward: row i of the input becomes row i of the embedding. The
  /// output has no nonlinearity and is read as `embedding_blocks` contiguous
  /// blocks of `block_dim`.
  Matrix forward(const Matrix& inputs) const;
  Vector forward(const Vector& input) const;
};

/// Fan-balanced uniform init, biases zero, deterministic in config.seed.
Network init_network(const NetConfig& config);

/// Margin cosine loss summed over embedding blocks. Per block:
/// y=1 -> -cos(e1,e2); y=0 -> max(0, cos(e1,e2) - margin). A zero-norm block
/// has cosine 0.
double margin_cosine_loss(const Vector& e1, const Vector& e2, int label,
                          double margin, int blocks);

struct LossGrad {
  double loss = 0.0;
  Vector d_e1;
  Vector d_e2;
};

/// Loss plus its gradient with respect to both embeddings. The hinge branch
/// has zero gradient when cos(e1,e2) <= margin; zero-norm blocks get zero
/// gradient.
LossGrad margin_cosine_loss_grad(const Vector& e1, const Vector& e2, int label,
                                 double margin, int blocks);

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
};

struct BackwardResult {
  double mean_loss = 0.0;
  Gradients grads;
};

/// Mean loss over the batch and its gradients; both branches accumulate into
/// the shared parameters.
BackwardResult backward(const Network& net,
                        const std::vector<PairExample>& batch);

struct TrainConfig {
  int epochs = 5;
  int batch_size = 256;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t pairs_per_epoch = 144;
  int patience = 3;  // epochs without held-out improvement before stopping
  std::uint64_t seed = 0;

  void check_valid() const;
  Json to_json() const;
  static TrainConfig from_json(const Json& doc);
};

struct EpochStats {
  double train_loss = 0.0;
  double heldout_loss = 0.0;  // NaN when no held-out split exists
  double seconds = 0.0;
};

struct TrainLog {
  std::vector<EpochStats> epochs;
  int best_epoch = -1;

  std::string to_csv() const;
};

/// Mini-batch adaptive-moment training over the pair stream. Deterministic
/// given seeds (single-threaded execution is the reference behaviour).
/// Returns the best-held-out-loss parameters when early stopping triggers,
/// the final parameters otherwise. Throws DivergedLoss on a non-finite batch
/// loss.
std::pair<Network, TrainLog> train(Network net, const TrainConfig& config,
                                   const PairStream& stream);

/// Per utterance: preprocess, stack, mask, forward each frame.
EmbeddingArchive embed_corpus(const Network& net, const Corpus& corpus,
                              const ModalityMask& mask,
                              const Preprocessor& prep);

/// Preprocessed features under a mask with no stacking and no network;
/// the evaluation path for raw-feature baselines.
EmbeddingArchive raw_archive(const Corpus& corpus, const ModalityMask& mask,
                             const Preprocessor& prep);

void save_network(const std::filesystem::path& dir, const Network& net,
                  const Json& extra_metadata = Json::object());
Network load_network(const std::filesystem::path& dir);
Json load_network_metadata(const std::filesystem::path& dir);

}  // namespace wsm

#endif  // WSM_NETWORK_HPP
