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

#include "cat/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "cat/error.hpp"
#include "cat/random.hpp"

namespace cat {

Vector synthetic_class_center(const SyntheticSpec& spec, Label c) {
  Vector center = Vector::Zero(spec.feature_dim);
  center(c) = spec.class_separation / std::sqrt(2.0);
  return center;
}

Graph generate_synthetic(const SyntheticSpec& spec) {
  if (spec.num_nodes < 1 || spec.num_classes < 1) {
    fail(ErrorKind::kInvalidArgument, "synthetic graph needs at least one node and one class");
  }
  if (spec.target_homophily < 0.0 || spec.target_homophily > 1.0) {
    fail(ErrorKind::kInvalidArgument, "target_homophily must lie in [0, 1]");
  }
  if (spec.avg_degree < 1.0) fail(ErrorKind::kInvalidArgument, "avg_degree must be at least 1");
  if (spec.avg_degree > static_cast<double>(spec.num_nodes - 1)) {
    fail(ErrorKind::kInvalidArgument, "avg_degree " + std::to_string(spec.avg_degree) +
                                          " exceeds num_nodes - 1");
  }
  if (spec.feature_dim < spec.num_classes) {
    fail(ErrorKind::kInvalidArgument, "feature_dim must be at least num_classes");
  }

  Rng rng = make_rng(spec.seed);
  const auto n = static_cast<std::size_t>(spec.num_nodes);
  const auto k = static_cast<std::size_t>(spec.num_classes);

  std::vector<Label> labels(n);
  for (std::size_t v = 0; v < n; ++v) labels[v] = static_cast<Label>(v % k);
  std::shuffle(labels.begin(), labels.end(), rng);

  std::normal_distribution<double> noise(0.0, 1.0);
  Matrix features(spec.num_nodes, spec.feature_dim);
  for (std::size_t v = 0; v < n; ++v) {
    const Vector center = synthetic_class_center(spec, labels[v]);
    for (Eigen::Index j = 0; j < spec.feature_dim; ++j) {
      features(static_cast<Eigen::Index>(v), j) = center(j) + noise(rng);
    }
  }

  std::vector<std::vector<NodeId>> members(k);
  for (std::size_t v = 0; v < n; ++v) members[static_cast<std::size_t>(labels[v])].push_back(static_cast<NodeId>(v));

  const auto total = static_cast<std::size_t>(
      std::llround(static_cast<double>(spec.num_nodes) * spec.avg_degree / 2.0));
  const auto intra = static_cast<std::size_t>(
      std::llround(spec.target_homophily * static_cast<double>(total)));
  const std::size_t inter = total - intra;

  std::set<std::pair<NodeId, NodeId>> pairs;
  std::uniform_int_distribution<std::size_t> any_node(0, n - 1);
  auto draw = [&](std::size_t wanted, bool same_class) {
    const std::size_t budget = 100 * wanted + 1000;
    std::size_t added = 0;
    for (std::size_t attempt = 0; added < wanted; ++attempt) {
      if (attempt >= budget) {
        fail(ErrorKind::kInvalidArgument,
             std::string("cannot place the requested ") + (same_class ? "intra" : "inter") +
                 "-class edges; degree or homophily is infeasible for these class sizes");
      }
      const auto u = static_cast<NodeId>(any_node(rng));
      NodeId v;
      if (same_class) {
        const auto& pool = members[static_cast<std::size_t>(labels[static_cast<std::size_t>(u)])];
        v = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
      } else {
        v = static_cast<NodeId>(any_node(rng));
        if (labels[static_cast<std::size_t>(u)] == labels[static_cast<std::size_t>(v)]) continue;
      }
      if (u == v) continue;
      if (pairs.emplace(std::min(u, v), std::max(u, v)).second) ++added;
    }
  };
  draw(intra, true);
  draw(inter, false);

  std::vector<Edge> edges;
  edges.reserve(2 * pairs.size());
  for (const auto& [u, v] : pairs) {
    edges.push_back({u, v});
    edges.push_back({v, u});
  }
  return Graph(spec.num_nodes, spec.num_classes, std::move(edges), std::move(features),
               std::move(labels), /*undirected=*/true);
}

}  // namespace cat
