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

#include "cat/graph.hpp"

namespace cat {

struct SyntheticSpec {
  NodeId num_nodes = 300;
  Label num_classes = 3;
  Eigen::Index feature_dim = 16;
  double target_homophily = 0.5;
  double avg_degree = 6.0;
  /// Distance between any two class centers. Noise is unit-variance.
  double class_separation = 5.0;
  std::uint64_t seed = 0;
};

/// Undirected graph with class-balanced labels, Gaussian class-conditional
/// features and round(num_nodes * avg_degree / 2) edges, of which
/// round(target_homophily * edges) join same-class nodes.
///
/// Class c is centered at (separation / sqrt 2) * e_c, so feature_dim must be
/// at least num_classes.
Graph generate_synthetic(const SyntheticSpec& spec);

/// Center of class c as used by generate_synthetic.
Vector synthetic_class_center(const SyntheticSpec& spec, Label c);

}  // namespace cat
