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

#include <gtest/gtest.h>

#include <cmath>

#include "cat/synthetic.hpp"
#include "cat/treatment.hpp"
#include "support.hpp"

namespace cat {
namespace {

using testing::expect_error;

Graph heterophilic(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.num_nodes = 240;
  spec.target_homophily = 0.15;
  spec.avg_degree = 10.0;
  spec.seed = seed;
  return generate_synthetic(spec);
}

// Keeps one direction of every pair, so each node's in-edges are independent.
Graph directed_view(const Graph& g) {
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) {
    if ((e.src + e.dst) % 2 == 0 ? e.src < e.dst : e.src > e.dst) edges.push_back(e);
  }
  return g.with_edges(std::move(edges), false);
}

bool is_subgraph(const Graph& sub, const Graph& g) {
  for (const Edge& e : sub.edges()) {
    if (!g.has_edge(e.src, e.dst)) return false;
  }
  return true;
}

TEST(Treatment, ControlIsIdentity) {
  const Graph g = heterophilic(1);
  EXPECT_EQ(apply_treatment(g, Treatment::kT0, 0.5, 3).graph, g);
}

TEST(Treatment, DegreeReductionKeepsClassProportionsOnDirectedGraphs) {
  const Graph g = directed_view(heterophilic(2));
  const Graph t1 = apply_treatment(g, Treatment::kT1, 0.5, 4).graph;
  ASSERT_TRUE(is_subgraph(t1, g));
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const LndProfile before = lnd_profile(g, v);
    const LndProfile after = lnd_profile(t1, v);
    for (std::size_t c = 0; c < before.classwise.size(); ++c) {
      EXPECT_EQ(after.classwise[c], static_cast<std::int64_t>(std::ceil(0.5 * static_cast<double>(before.classwise[c]))))
          << "node " << v << " class " << c;
    }
  }
}

TEST(Treatment, UndirectedReductionStaysSymmetricWithinBudget) {
  const Graph g = heterophilic(3);
  for (Treatment t : {Treatment::kT1, Treatment::kT2}) {
    const Graph out = apply_treatment(g, t, 0.5, 5).graph;
    EXPECT_TRUE(out.undirected());
    EXPECT_TRUE(is_subgraph(out, g));
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      const LndProfile before = lnd_profile(g, v);
      EXPECT_LE(lnd_profile(out, v).degree, static_cast<std::int64_t>(std::ceil(0.5 * static_cast<double>(before.degree))) + 2);
    }
    EXPECT_LT(average_degree(out), 0.6 * average_degree(g));
  }
}

TEST(Treatment, ClassAgnosticReductionUsesTheSameBudget) {
  const Graph g = directed_view(heterophilic(4));
  const Graph t1 = apply_treatment(g, Treatment::kT1, 0.5, 6).graph;
  const Graph t2 = apply_treatment(g, Treatment::kT2, 0.5, 6).graph;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    EXPECT_EQ(lnd_profile(t1, v).degree, lnd_profile(t2, v).degree);
  }
}

TEST(Treatment, ReplacementPreservesEveryProfile) {
  for (const Graph& g : {heterophilic(5), directed_view(heterophilic(6))}) {
    const TreatmentResult r = apply_treatment(g, Treatment::kT3, 0.5, 7);
    EXPECT_EQ(r.graph.undirected(), g.undirected());
    std::size_t changed = 0;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      EXPECT_EQ(lnd_profile(r.graph, v), lnd_profile(g, v));
      const auto a = g.in_neighbors(v);
      const auto b = r.graph.in_neighbors(v);
      if (!std::equal(a.begin(), a.end(), b.begin(), b.end())) ++changed;
    }
    EXPECT_GT(changed, static_cast<std::size_t>(g.num_nodes()) / 2);
    EXPECT_DOUBLE_EQ(edge_homophily(r.graph), edge_homophily(g));
  }
}

TEST(Treatment, ReplacementWarnsWhenNoCandidateExists) {
  // Node 2's neighbors 0 and 1 are the only members of their class.
  const Graph g(3, 2, {{0, 2}, {1, 2}}, Matrix::Zero(3, 1), {0, 0, 1}, false);
  const TreatmentResult r = apply_treatment(g, Treatment::kT3, 0.5, 1);
  EXPECT_EQ(r.warnings, 2u);
  EXPECT_EQ(r.graph, g);
}

TEST(Treatment, SelfLoopsSurvive) {
  const Graph g = add_self_loops(heterophilic(7));
  for (Treatment t : {Treatment::kT1, Treatment::kT2, Treatment::kT3}) {
    EXPECT_EQ(apply_treatment(g, t, 0.5, 2).graph.num_self_loops(), g.num_self_loops());
  }
}

TEST(Treatment, DeterministicPerSeed) {
  const Graph g = heterophilic(8);
  for (Treatment t : {Treatment::kT1, Treatment::kT2, Treatment::kT3}) {
    EXPECT_EQ(apply_treatment(g, t, 0.5, 9).graph, apply_treatment(g, t, 0.5, 9).graph);
  }
}

TEST(Treatment, RejectsBadArguments) {
  const Graph g = heterophilic(9);
  expect_error(ErrorKind::kInvalidArgument, [&] { apply_treatment(g, Treatment::kT1, 0.0, 1); });
  expect_error(ErrorKind::kInvalidArgument, [&] { apply_treatment(g, Treatment::kT2, 1.5, 1); });
  std::vector<Label> labels = g.labels();
  labels[0] = kUnknownLabel;
  expect_error(ErrorKind::kInvalidArgument,
               [&] { apply_treatment(g.with_labels(labels), Treatment::kT3, 0.5, 1); });
  expect_error(ErrorKind::kInvalidArgument, [] { parse_treatment("t4"); });
}

}  // namespace
}  // namespace cat
