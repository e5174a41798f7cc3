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

#include <filesystem>

#include "cat/graph.hpp"

namespace cat {

/// Reads a dataset directory:
///
///   meta       key=value lines: num_nodes, num_classes, feature_dim, undirected (0|1)
///   nodes.tsv  node_id TAB label TAB comma-separated features ("-" = unknown label)
///   edges.tsv  src TAB dst
///
/// Undirected graphs are symmetrized on load. Listing both (i, j) and (j, i)
/// for an undirected graph is allowed; listing the same ordered pair twice is
/// a duplicate-edge error.
Graph load_graph(const std::filesystem::path& dir);

/// Writes g in the format read by load_graph. Undirected edges are written
/// once (src <= dst). Creates the directory if needed.
void save_graph(const Graph& g, const std::filesystem::path& dir);

}  // namespace cat
