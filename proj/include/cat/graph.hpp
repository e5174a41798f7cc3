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

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cat {

using NodeId = std::int64_t;
using Label = std::int32_t;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr Label kUnknownLabel = -1;

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;

  bool is_self_loop() const { return src == dst; }
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge& a, const Edge& b) {
    // Grouped by destination: the central node aggregates its in-edges.
    if (auto c = a.dst <=> b.dst; c != 0) return c;
    return a.src <=> b.src;
  }
};

/// Immutable attributed graph. Edges are directed (src -> dst) and kept
/// sorted by (dst, src); an undirected graph stores both directions.
///
/// The constructor validates every invariant and throws cat::Error.
class Graph {
 public:
  Graph() = default;
  Graph(NodeId num_nodes, Label num_classes, std::vector<Edge> edges, Matrix features,
        std::vector<Label> labels, bool undirected);
  Graph(NodeId num_nodes, Label num_classes, std::vector<Edge> edges,
        std::shared_ptr<const Matrix> features, std::vector<Label> labels, bool undirected);

  NodeId num_nodes() const { return num_nodes_; }
  Label num_classes() const { return num_classes_; }
  Eigen::Index feature_dim() const { return features_->cols(); }
  bool undirected() const { return undirected_; }

  const std::vector<Edge>& edges() const { return edges_; }
  const Matrix& features() const { return *features_; }
  const std::vector<Label>& labels() const { return labels_; }
  Label label(NodeId v) const { return labels_[static_cast<std::size_t>(v)]; }
  bool all_labels_known() const;

  /// Number of edges excluding self-loops, each undirected pair counted once.
  std::size_t num_graph_edges() const;
  std::size_t num_self_loops() const;
  bool has_edge(NodeId src, NodeId dst) const;

  /// In-neighbors of v (sources of edges into v), self-loop excluded.
  std::span<const NodeId> in_neighbors(NodeId v) const;

  Graph with_edges(std::vector<Edge> edges, bool undirected) const;
  Graph with_labels(std::vector<Label> labels) const;

  friend bool operator==(const Graph& a, const Graph& b);

 private:
  void build_adjacency();

  NodeId num_nodes_ = 0;
  Label num_classes_ = 0;
  std::vector<Edge> edges_;
  // Shared between graphs derived from one another; never mutated.
  std::shared_ptr<const Matrix> features_ = std::make_shared<const Matrix>();
  std::vector<Label> labels_;
  bool undirected_ = false;

  // CSR over in-neighbors, self-loops excluded.
  std::vector<std::size_t> in_offsets_;
  std::vector<NodeId> in_sources_;
};

/// Local neighbor distribution of one node: class-wise counts (W) and degree (D).
struct LndProfile {
  NodeId node = 0;
  std::vector<std::int64_t> classwise;
  std::int64_t degree = 0;

  friend bool operator==(const LndProfile&, const LndProfile&) = default;
};

struct Split {
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;
  std::uint64_t seed = 0;

  friend bool operator==(const Split&, const Split&) = default;
};

/// Fraction of non-self edges joining same-label nodes.
double edge_homophily(const Graph& g);

/// Adds one (i, i) edge to every node that lacks it.
Graph add_self_loops(const Graph& g);
Graph remove_self_loops(const Graph& g);

LndProfile lnd_profile(const Graph& g, NodeId v);

/// Mean neighbor count over all nodes (self-loops excluded).
double average_degree(const Graph& g);

/// Copy of g where labels outside `keep` are replaced by kUnknownLabel.
Graph mask_labels(const Graph& g, std::span<const NodeId> keep);

/// Uniform random partition into train/val/test. Sizes are round(n * ratio)
/// for train and val; test takes the remainder.
Split make_split(const Graph& g, std::array<double, 3> ratios, std::uint64_t seed);
Split make_split(NodeId num_nodes, std::array<double, 3> ratios, std::uint64_t seed);

}  // namespace cat
