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
#include <string_view>

#include "cat/graph.hpp"

namespace cat {

/// Controlled edits of the local neighbor distribution (LND).
///
///  t0  control, the graph itself
///  t1  degree reduced, class-wise proportions kept: each node keeps
///      ceil(keep_fraction * D_c) neighbors of every class c
///  t2  degree reduced by the same per-node budget as t1, neighbors chosen
///      without regard to class
///  t3  every neighbor replaced by a random non-neighbor of the same class;
///      class-wise counts and degree are unchanged
///
/// Self-loops are left untouched. On undirected graphs the result stays
/// symmetric: t1/t2 keep an edge only while both endpoints have budget left,
/// and t3 uses label-preserving double-edge swaps, which keep every node's
/// profile exact.
enum class Treatment { kT0, kT1, kT2, kT3 };

std::string_view to_string(Treatment t);
Treatment parse_treatment(std::string_view name);

struct TreatmentResult {
  Graph graph;
  /// Neighbors kept because no same-class replacement existed (t3 only).
  std::size_t warnings = 0;
};

TreatmentResult apply_treatment(const Graph& g, Treatment t, double keep_fraction,
                                std::uint64_t seed);

}  // namespace cat
