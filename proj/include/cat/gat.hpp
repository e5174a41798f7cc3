// Copyright 2026 The CAT Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Graph attention models: GAT, GATv2 and a GCN-keyed GATv3 variant.
//
// Every layer has `heads` heads; head h owns a feature transform W
// (in x head_dim) and an attention vector a = [a1; a2] (2 * head_dim x 1).
// Edge j -> i is scored as
//   gat:    LeakyReLU(a1 . W z_i + a2 . W z_j)
//   gatv2:  a1 . LeakyReLU(W z_i) + a2 . LeakyReLU(W z_j)
//   gatv3:  a1 . q_i + a2 . q_j,  q = A_hat (H Wqk)
// and normalized over the in-edges of i, self-loop included. Hidden layers
// concatenate heads and apply ELU; the output layer has one head of width
// num_classes followed by log-softmax.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cat/autodiff.hpp"
#include "cat/graph.hpp"
#include "cat/random.hpp"

namespace cat {

enum class Variant { kGat, kGatV2, kGatV3 };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

struct TrainConfig {
  double lr = 1e-3;
  double weight_decay = 1e-4;
  int max_epochs = 600;
  int patience = 50;
  int hidden_dim = 16;
  int heads = 8;
  int layers = 2;
  double dropout = 0.6;
  std::uint64_t seed = 0;
  /// Layer whose head-averaged attention feeds ClusterAttention.
  int attention_layer = 0;
  /// gatv3 refuses graphs with more edges than this.
  std::size_t gatv3_edge_budget = 200000;
};

enum class ParamGroup { kFeature, kAttention };

struct HeadParams {
  Matrix weight;     // in x head_dim
  Matrix attention;  // 2 * head_dim x 1
  Matrix query_key;  // in x head_dim, gatv3 only

  friend bool operator==(const HeadParams&, const HeadParams&) = default;
};

struct LayerParams {
  std::vector<HeadParams> heads;
  bool concat = true;  // false on the output layer

  friend bool operator==(const LayerParams&, const LayerParams&) = default;
};

struct ModelParams {
  Variant variant = Variant::kGat;
  std::vector<LayerParams> layers;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
  std::size_t num_layers() const { return layers.size(); }
};

/// Attention coefficients aligned with Graph::edges(), before dropout.
struct AttentionSnapshot {
  /// [layer][head] -> one coefficient per edge.
  std::vector<std::vector<Vector>> per_head;
  /// [layer] -> head-averaged coefficients.
  std::vector<Vector> head_mean;
};

struct ClusterAttention {
  Matrix alpha_sc;   // num_nodes x num_clusters
  Vector alpha_self;
};

/// Edge indices and GCN weights of one graph, built once per training run.
struct GraphContext {
  explicit GraphContext(const Graph& g);

  const Graph* graph;
  ad::SharedIndex src;
  ad::SharedIndex dst;
  Matrix gcn_weight;  // E x 1, 1 / sqrt(deg(src) deg(dst)) with self-loops counted
  ad::SharedSparse sparse_features;  // set when the features are mostly zeros
};

struct ForwardOptions {
  bool training = false;
  double dropout = 0.0;
  Rng* rng = nullptr;
  bool record_attention = true;
};

struct TapeForward {
  ad::Var log_probs;
  /// Output of the last hidden layer (the logits when there is none).
  ad::Var embedding;
  AttentionSnapshot snapshot;
};

struct ForwardResult {
  Matrix log_probs;
  Matrix embedding;
  AttentionSnapshot snapshot;
};

struct TrainResult {
  ModelParams params;
  int best_epoch = 0;  // 1-based; 0 when no epoch ran
  int epochs_run = 0;
  double best_val_accuracy = 0.0;
};

ModelParams build_model(Variant variant, const Graph& g, const TrainConfig& cfg,
                        std::uint64_t seed);

/// Parameters in canonical order: layer, head, then weight, attention, query_key.
std::vector<const Matrix*> parameters(const ModelParams& p);
std::vector<Matrix*> parameters(ModelParams& p);
std::vector<ParamGroup> parameter_groups(const ModelParams& p);
std::vector<std::string> parameter_names(const ModelParams& p);

/// Redraws the attention group (attention vectors and gatv3 query/key
/// transforms) from `seed`. Feature transforms are untouched.
ModelParams reinitialize_attention(const ModelParams& p, std::uint64_t seed);

/// Forward pass on a tape. `flat` holds one Var per parameter in canonical order.
TapeForward forward_on_tape(ad::Tape& tape, const ModelParams& layout,
                            std::span<const ad::Var> flat, const GraphContext& ctx,
                            const ForwardOptions& options);

/// Evaluation-mode forward pass (no dropout). g must hold a self-loop on every node.
ForwardResult forward(const ModelParams& p, const Graph& g);

/// Trains the groups not listed in `frozen` with Adam and early stopping on
/// validation accuracy; returns the parameters of the best validation epoch.
TrainResult train(const ModelParams& init, const Graph& g, const Split& split,
                  const TrainConfig& cfg, std::span<const ParamGroup> frozen = {});

/// Argmax accuracy over rows; ties go to the lowest class index.
double accuracy(const Matrix& scores, std::span<const Label> labels, std::span<const NodeId> rows);
double evaluate(const ModelParams& p, const Graph& g, std::span<const NodeId> rows);

struct ParamGradCheck {
  std::string name;
  double max_rel_error = 0.0;
};

/// Central-difference check of every parameter's gradient of the mean NLL
/// over `rows`, in evaluation mode.
std::vector<ParamGradCheck> check_model_gradients(const ModelParams& p, const Graph& g,
                                                  std::span<const NodeId> rows,
                                                  double step = 1e-4);

/// Sums one layer's head-averaged coefficients per source cluster.
ClusterAttention cluster_attention(const Graph& g, const Vector& alpha,
                                   std::span<const Label> assignment, Label num_clusters);
ClusterAttention extract_attention(const ModelParams& p, const Graph& g,
                                   std::span<const Label> assignment, Label num_clusters,
                                   int layer = 0);

/// Text checkpoint: "cat-params v1", variant, layer and head counts, then
/// "tensor <name> <rows> <cols>" followed by row-major values per parameter.
void save_params(const ModelParams& p, const std::filesystem::path& path);
ModelParams load_params(const std::filesystem::path& path);

}  // namespace cat
