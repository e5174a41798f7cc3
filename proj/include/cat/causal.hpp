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

// Total-effect estimation and graph trimming.
//
// For every cluster c the graph is intervened on by removing the edges that
// leave c's members, the pretrained model's attention parameters are
// re-learned with its feature transforms frozen, and the change in each
// node's self-attention is its total effect. Every node then keeps the
// in-edges of a single present cluster: the one with the lowest effect, or
// the highest in the high-distraction ablation.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cat/clustering.hpp"
#include "cat/gat.hpp"
#include "cat/graph.hpp"

namespace cat {

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

enum class TrimMode { kLowDistraction, kHighDistraction };

std::string_view to_string(TrimMode m);
TrimMode parse_trim_mode(std::string_view name);

inline constexpr Label kNoCluster = -1;

struct TotalEffectTable {
  Matrix te_self;          // num_nodes x num_clusters
  BoolMatrix present_mask;  // cluster has a non-self in-neighbor of the node
};

struct TrimmedGraph {
  Graph graph;  // directed
  std::vector<Label> retained_cluster;  // kNoCluster when nothing was eligible
};

/// Removes every non-self edge whose source lies in cluster c. The result is
/// stored as a directed graph.
Graph intervene_cluster(const Graph& g, const SemanticClustering& sc, Label c);

/// Re-initializes the attention group from `reinit_seed` and trains only it
/// on g. Feature transforms come back bit-identical.
ModelParams finetune_attention(const ModelParams& pretrained, const Graph& g, const Split& split,
                               const TrainConfig& cfg, std::uint64_t reinit_seed);

/// intervened.alpha_self - base.alpha_self.
Vector total_effect(const ClusterAttention& base, const ClusterAttention& intervened);

BoolMatrix present_mask(const Graph& g, const SemanticClustering& sc);

TrimmedGraph trim_graph(const Graph& g, const SemanticClustering& sc, const TotalEffectTable& te,
                        TrimMode mode);

struct CatOptions {
  Variant variant = Variant::kGat;
  ClusterMode cluster = ClusterMode::kSup;
  TrimMode trim = TrimMode::kLowDistraction;
  TrainConfig train;
  /// Fine-tuning epochs per intervention; negative means train.max_epochs.
  int finetune_epochs = -1;
  KMeansOptions kmeans;
  std::uint64_t seed = 0;
};

struct CatTimings {
  double cluster_s = 0.0;
  double pretrain_s = 0.0;
  double effect_s = 0.0;
  double trim_s = 0.0;
};

struct CatResult {
  SemanticClustering clustering;
  ModelParams pretrained;
  ClusterAttention base;
  std::vector<ClusterAttention> intervened;
  TotalEffectTable te;
  TrimmedGraph trimmed;
  CatTimings timings;
};

/// Seeds for one CAT run, all derived from CatOptions::seed.
std::uint64_t cat_init_seed(const CatOptions& o);
std::uint64_t cat_reinit_seed(const CatOptions& o);
std::uint64_t cat_cluster_seed(const CatOptions& o);
TrainConfig cat_finetune_config(const CatOptions& o);

SemanticClustering make_clustering(const Graph& g, const Split& split, const CatOptions& o);

/// The full pipeline on g (self-loops required). A clustering or pretrained
/// model supplied by the caller replaces the corresponding stage.
CatResult run_cat(const Graph& g, const Split& split, const CatOptions& options,
                  const SemanticClustering* clustering = nullptr,
                  const ModelParams* pretrained = nullptr);

/// node_id then one column per cluster; absent clusters print "NA".
void save_effect_table(const TotalEffectTable& te, const std::filesystem::path& path);
/// node_id TAB cluster, or "none".
void save_retained_clusters(const TrimmedGraph& t, const std::filesystem::path& path);

}  // namespace cat
