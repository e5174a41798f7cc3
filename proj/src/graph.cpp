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

#include "cat/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cat/error.hpp"
#include "cat/random.hpp"

namespace cat {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kMissingFile: return "missing-file";
    case ErrorKind::kMalformedLine: return "malformed-line";
    case ErrorKind::kIndexOutOfRange: return "index-out-of-range";
    case ErrorKind::kDuplicateEdge: return "duplicate-edge";
    case ErrorKind::kShapeMismatch: return "shape-mismatch";
    case ErrorKind::kEmptySegment: return "empty-segment";
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kUndefined: return "undefined";
    case ErrorKind::kNumerical: return "numerical";
    case ErrorKind::kUnsupported: return "unsupported";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

Graph::Graph(NodeId num_nodes, Label num_classes, std::vector<Edge> edges, Matrix features,
             std::vector<Label> labels, bool undirected)
    : Graph(num_nodes, num_classes, std::move(edges),
            std::make_shared<const Matrix>(std::move(features)), std::move(labels), undirected) {}

Graph::Graph(NodeId num_nodes, Label num_classes, std::vector<Edge> edges,
             std::shared_ptr<const Matrix> features, std::vector<Label> labels, bool undirected)
    : num_nodes_(num_nodes),
      num_classes_(num_classes),
      edges_(std::move(edges)),
      features_(std::move(features)),
      labels_(std::move(labels)),
      undirected_(undirected) {
  if (num_nodes_ < 0) fail(ErrorKind::kInvalidArgument, "negative node count");
  if (num_classes_ < 1) fail(ErrorKind::kInvalidArgument, "num_classes must be at least 1");
  if (!features_) fail(ErrorKind::kInvalidArgument, "missing feature matrix");
  if (features_->rows() != num_nodes_) {
    fail(ErrorKind::kShapeMismatch, "feature matrix has " + std::to_string(features_->rows()) +
                                        " rows, expected " + std::to_string(num_nodes_));
  }
  if (!features_->allFinite()) fail(ErrorKind::kNumerical, "feature matrix has non-finite entries");
  if (static_cast<NodeId>(labels_.size()) != num_nodes_) {
    fail(ErrorKind::kShapeMismatch, "label vector has " + std::to_string(labels_.size()) +
                                        " entries, expected " + std::to_string(num_nodes_));
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const Label y = labels_[i];
    if (y != kUnknownLabel && (y < 0 || y >= num_classes_)) {
      fail(ErrorKind::kIndexOutOfRange, "node " + std::to_string(i) + " has label " +
                                            std::to_string(y) + " outside [0, " +
                                            std::to_string(num_classes_) + ")");
    }
  }
  for (const Edge& e : edges_) {
    if (e.src < 0 || e.src >= num_nodes_ || e.dst < 0 || e.dst >= num_nodes_) {
      fail(ErrorKind::kIndexOutOfRange, "edge (" + std::to_string(e.src) + ", " +
                                            std::to_string(e.dst) + ") references a node >= " +
                                            std::to_string(num_nodes_));
    }
  }
  std::sort(edges_.begin(), edges_.end());
  if (auto it = std::adjacent_find(edges_.begin(), edges_.end()); it != edges_.end()) {
    fail(ErrorKind::kDuplicateEdge, "duplicate edge (" + std::to_string(it->src) + ", " +
                                        std::to_string(it->dst) + ")");
  }
  if (undirected_) {
    for (const Edge& e : edges_) {
      if (!std::binary_search(edges_.begin(), edges_.end(), Edge{e.dst, e.src})) {
        fail(ErrorKind::kInvalidArgument, "undirected graph lacks reverse of edge (" +
                                              std::to_string(e.src) + ", " +
                                              std::to_string(e.dst) + ")");
      }
    }
  }
  build_adjacency();
}

void Graph::build_adjacency() {
  in_offsets_.assign(static_cast<std::size_t>(num_nodes_) + 1, 0);
  in_sources_.clear();
  in_sources_.reserve(edges_.size());
  for (const Edge& e : edges_) {
    if (e.is_self_loop()) continue;
    ++in_offsets_[static_cast<std::size_t>(e.dst) + 1];
    in_sources_.push_back(e.src);
  }
  std::partial_sum(in_offsets_.begin(), in_offsets_.end(), in_offsets_.begin());
}

bool Graph::all_labels_known() const {
  return std::none_of(labels_.begin(), labels_.end(),
                      [](Label y) { return y == kUnknownLabel; });
}

std::size_t Graph::num_self_loops() const {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return e.is_self_loop(); }));
}

std::size_t Graph::num_graph_edges() const {
  std::size_t n = edges_.size() - num_self_loops();
  return undirected_ ? n / 2 : n;
}

bool Graph::has_edge(NodeId src, NodeId dst) const {
  return std::binary_search(edges_.begin(), edges_.end(), Edge{src, dst});
}

std::span<const NodeId> Graph::in_neighbors(NodeId v) const {
  const auto i = static_cast<std::size_t>(v);
  return {in_sources_.data() + in_offsets_[i], in_offsets_[i + 1] - in_offsets_[i]};
}

Graph Graph::with_edges(std::vector<Edge> edges, bool undirected) const {
  return Graph(num_nodes_, num_classes_, std::move(edges), features_, labels_, undirected);
}

Graph Graph::with_labels(std::vector<Label> labels) const {
  return Graph(num_nodes_, num_classes_, edges_, features_, std::move(labels), undirected_);
}

bool operator==(const Graph& a, const Graph& b) {
  return a.num_nodes_ == b.num_nodes_ && a.num_classes_ == b.num_classes_ &&
         a.undirected_ == b.undirected_ && a.edges_ == b.edges_ && a.labels_ == b.labels_ &&
         a.features().rows() == b.features().rows() &&
         a.features().cols() == b.features().cols() &&
         (a.features_ == b.features_ || a.features() == b.features());
}

double edge_homophily(const Graph& g) {
  if (!g.all_labels_known()) fail(ErrorKind::kInvalidArgument, "edge homophily needs every label");
  std::size_t total = 0;
  std::size_t same = 0;
  for (const Edge& e : g.edges()) {
    if (e.is_self_loop()) continue;
    if (g.undirected() && e.src > e.dst) continue;
    ++total;
    if (g.label(e.src) == g.label(e.dst)) ++same;
  }
  if (total == 0) fail(ErrorKind::kUndefined, "edge homophily is undefined on a graph without edges");
  return static_cast<double>(same) / static_cast<double>(total);
}

Graph add_self_loops(const Graph& g) {
  std::vector<Edge> edges = g.edges();
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (!g.has_edge(v, v)) edges.push_back({v, v});
  }
  return g.with_edges(std::move(edges), g.undirected());
}

Graph remove_self_loops(const Graph& g) {
  std::vector<Edge> edges;
  edges.reserve(g.edges().size());
  std::copy_if(g.edges().begin(), g.edges().end(), std::back_inserter(edges),
               [](const Edge& e) { return !e.is_self_loop(); });
  return g.with_edges(std::move(edges), g.undirected());
}

LndProfile lnd_profile(const Graph& g, NodeId v) {
  if (v < 0 || v >= g.num_nodes()) {
    fail(ErrorKind::kIndexOutOfRange, "node " + std::to_string(v) + " out of range");
  }
  LndProfile p;
  p.node = v;
  p.classwise.assign(static_cast<std::size_t>(g.num_classes()), 0);
  for (NodeId u : g.in_neighbors(v)) {
    const Label y = g.label(u);
    if (y == kUnknownLabel) {
      fail(ErrorKind::kInvalidArgument,
           "neighbor " + std::to_string(u) + " of node " + std::to_string(v) + " has no label");
    }
    ++p.classwise[static_cast<std::size_t>(y)];
    ++p.degree;
  }
  return p;
}

double average_degree(const Graph& g) {
  if (g.num_nodes() == 0) return 0.0;
  std::size_t total = 0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) total += g.in_neighbors(v).size();
  return static_cast<double>(total) / static_cast<double>(g.num_nodes());
}

Graph mask_labels(const Graph& g, std::span<const NodeId> keep) {
  std::vector<Label> labels(g.labels().size(), kUnknownLabel);
  for (NodeId v : keep) labels[static_cast<std::size_t>(v)] = g.label(v);
  return g.with_labels(std::move(labels));
}

Split make_split(NodeId num_nodes, std::array<double, 3> ratios, std::uint64_t seed) {
  for (double r : ratios) {
    if (r < 0.0) fail(ErrorKind::kInvalidArgument, "split ratios must be non-negative");
  }
  if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) {
    fail(ErrorKind::kInvalidArgument, "split ratios must sum to 1");
  }
  std::vector<NodeId> order(static_cast<std::size_t>(num_nodes));
  std::iota(order.begin(), order.end(), NodeId{0});
  Rng rng = make_rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const auto n = static_cast<double>(num_nodes);
  auto n_train = static_cast<std::size_t>(std::llround(n * ratios[0]));
  auto n_val = static_cast<std::size_t>(std::llround(n * ratios[1]));
  n_train = std::min(n_train, order.size());
  n_val = std::min(n_val, order.size() - n_train);

  Split s;
  s.seed = seed;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.val.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
               order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.val.begin(), s.val.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

Split make_split(const Graph& g, std::array<double, 3> ratios, std::uint64_t seed) {
  return make_split(g.num_nodes(), ratios, seed);
}

}  // namespace cat
