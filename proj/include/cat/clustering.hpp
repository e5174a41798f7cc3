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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "cat/gat.hpp"
#include "cat/graph.hpp"

namespace cat {

enum class ClusterMode { kUnsup, kSemi, kSup, kRandom };

std::string_view to_string(ClusterMode m);
ClusterMode parse_cluster_mode(std::string_view name);

enum class KMeansDistance { kRaw, kRowNormalized };

struct SemanticClustering {
  std::vector<Label> assignment;
  Label num_clusters = 0;
  /// Mean feature row per cluster. Empty when not computed (sup and random
  /// modes) or when some cluster has no member.
  Matrix centers;
  ClusterMode mode = ClusterMode::kSup;

  std::vector<std::int64_t> sizes() const;
};

struct KMeansTrace {
  /// Sum of squared distances after each Lloyd iteration.
  std::vector<double> objective;
  int iterations = 0;
  bool converged = false;
  int reseeds = 0;
};

struct KMeansOptions {
  int max_iters = 300;
  KMeansDistance distance = KMeansDistance::kRaw;
};

/// k-means++ seeding followed by Lloyd iterations until the assignment stops
/// changing. Ties go to the lowest center index. Centers are reported on the
/// raw features in either distance mode.
SemanticClustering kmeans_pp(const Matrix& features, Label k, std::uint64_t seed,
                             const KMeansOptions& options = {}, KMeansTrace* trace = nullptr);

/// Two-layer perceptron (ReLU hidden layer of cfg.hidden_dim units) trained on
/// split.train with early stopping on split.val. Training nodes keep their
/// own labels.
SemanticClustering mlp_pseudolabels(const Graph& g, const Split& split, const TrainConfig& cfg);

SemanticClustering supervised_clusters(std::span<const Label> labels, Label num_classes);

SemanticClustering random_clusters(NodeId num_nodes, Label k, std::uint64_t seed);

Matrix cluster_centers(const Matrix& features, std::span<const Label> assignment, Label k);

double adjusted_rand_index(std::span<const Label> a, std::span<const Label> b);

/// clusters.tsv: node_id TAB cluster_id.
void save_clusters(const SemanticClustering& sc, const std::filesystem::path& path);
std::vector<Label> load_clusters(const std::filesystem::path& path, NodeId num_nodes);

}  // namespace cat
