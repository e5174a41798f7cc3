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

#include <algorithm>
#include <fstream>
#include <set>

#include "cat/dataset.hpp"
#include "cat/graph.hpp"
#include "cat/synthetic.hpp"
#include "support.hpp"

namespace cat {
namespace {

using testing::expect_error;
using testing::make_graph;
using testing::TempDir;

// Path 0-1-2-3 labeled 0,0,1,1: two of its three edges join same-label nodes.
Graph path4() { return make_graph(4, 2, {{0, 1}, {1, 2}, {2, 3}}, {0, 0, 1, 1}); }

TEST(Graph, EdgesSortedByDestinationThenSource) {
  Graph g(3, 1, {{2, 0}, {1, 0}, {0, 2}, {0, 1}}, Matrix::Zero(3, 1), {0, 0, 0}, false);
  const std::vector<Edge> want = {{1, 0}, {2, 0}, {0, 1}, {0, 2}};
  EXPECT_EQ(g.edges(), want);
}

TEST(Graph, RejectsDuplicateEdge) {
  expect_error(ErrorKind::kDuplicateEdge, [] {
    Graph(2, 1, {{0, 1}, {0, 1}}, Matrix::Zero(2, 1), {0, 0}, false);
  });
}

TEST(Graph, RejectsOutOfRangeEndpointAndLabel) {
  expect_error(ErrorKind::kIndexOutOfRange,
               [] { Graph(2, 1, {{0, 2}}, Matrix::Zero(2, 1), {0, 0}, false); });
  expect_error(ErrorKind::kIndexOutOfRange,
               [] { Graph(2, 2, {}, Matrix::Zero(2, 1), {0, 2}, false); });
}

TEST(Graph, RejectsShapeMismatchAndAsymmetricUndirected) {
  expect_error(ErrorKind::kShapeMismatch,
               [] { Graph(3, 1, {}, Matrix::Zero(2, 1), {0, 0, 0}, false); });
  expect_error(ErrorKind::kInvalidArgument,
               [] { Graph(2, 1, {{0, 1}}, Matrix::Zero(2, 1), {0, 0}, true); });
}

TEST(Graph, InNeighborsSkipSelfLoops) {
  const Graph g = add_self_loops(path4());
  const auto nb = g.in_neighbors(1);
  EXPECT_EQ(std::vector<NodeId>(nb.begin(), nb.end()), (std::vector<NodeId>{0, 2}));
  EXPECT_EQ(g.num_self_loops(), 4u);
  EXPECT_EQ(g.num_graph_edges(), 3u);
}

TEST(Graph, SelfLoopHelpersAreIdempotent) {
  const Graph g = add_self_loops(path4());
  EXPECT_EQ(add_self_loops(g), g);
  EXPECT_EQ(remove_self_loops(g), path4());
}

TEST(Graph, EdgeHomophilyCountsUndirectedPairsOnce) {
  EXPECT_DOUBLE_EQ(edge_homophily(path4()), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(edge_homophily(add_self_loops(path4())), 2.0 / 3.0);
}

TEST(Graph, EdgeHomophilyUndefinedWithoutEdges) {
  const Graph g(2, 1, {}, Matrix::Zero(2, 1), {0, 0}, true);
  expect_error(ErrorKind::kUndefined, [&] { edge_homophily(g); });
}

TEST(Graph, LndProfileCountsNeighborsByClass) {
  const Graph g = make_graph(4, 2, {{0, 1}, {0, 2}, {0, 3}}, {0, 0, 1, 1});
  const LndProfile p = lnd_profile(add_self_loops(g), 0);
  EXPECT_EQ(p.classwise, (std::vector<std::int64_t>{1, 2}));
  EXPECT_EQ(p.degree, 3);
  EXPECT_DOUBLE_EQ(average_degree(g), 6.0 / 4.0);
}

TEST(Graph, MaskLabelsHidesEverythingElse) {
  const std::vector<NodeId> keep = {1, 3};
  const Graph m = mask_labels(path4(), keep);
  EXPECT_EQ(m.labels(), (std::vector<Label>{kUnknownLabel, 0, kUnknownLabel, 1}));
  EXPECT_FALSE(m.all_labels_known());
  expect_error(ErrorKind::kInvalidArgument, [&] { edge_homophily(m); });
}

TEST(Split, PartitionsNodesWithRoundedSizes) {
  const Split s = make_split(183, {0.6, 0.2, 0.2}, 42);
  EXPECT_EQ(s.train.size(), 110u);
  EXPECT_EQ(s.val.size(), 37u);
  EXPECT_EQ(s.test.size(), 36u);
  std::set<NodeId> all(s.train.begin(), s.train.end());
  all.insert(s.val.begin(), s.val.end());
  all.insert(s.test.begin(), s.test.end());
  EXPECT_EQ(all.size(), 183u);
  EXPECT_EQ(*all.rbegin(), 182);
}

TEST(Split, DeterministicPerSeed) {
  EXPECT_EQ(make_split(50, {0.6, 0.2, 0.2}, 7), make_split(50, {0.6, 0.2, 0.2}, 7));
  EXPECT_NE(make_split(50, {0.6, 0.2, 0.2}, 7).train, make_split(50, {0.6, 0.2, 0.2}, 8).train);
}

TEST(Split, RejectsBadRatios) {
  expect_error(ErrorKind::kInvalidArgument, [] { make_split(10, {0.5, 0.2, 0.2}, 0); });
  expect_error(ErrorKind::kInvalidArgument, [] { make_split(10, {1.2, -0.2, 0.0}, 0); });
}

TEST(Dataset, RoundTripsThroughDisk) {
  TempDir dir("dataset");
  SyntheticSpec spec;
  spec.num_nodes = 40;
  spec.seed = 5;
  const Graph g = generate_synthetic(spec);
  save_graph(g, dir.path() / "g");
  EXPECT_EQ(load_graph(dir.path() / "g"), g);
}

TEST(Dataset, ReadsHandWrittenDirectedFile) {
  TempDir dir("hand");
  std::ofstream(dir.path() / "meta") << "num_nodes=3\nnum_classes=2\nfeature_dim=2\nundirected=0\n";
  std::ofstream(dir.path() / "nodes.tsv") << "0\t0\t1,0\n1\t1\t0,1\n2\t-\t0.5,0.5\n";
  std::ofstream(dir.path() / "edges.tsv") << "0\t1\n2\t1\n";
  const Graph g = load_graph(dir.path());
  EXPECT_FALSE(g.undirected());
  EXPECT_EQ(g.label(2), kUnknownLabel);
  EXPECT_TRUE(g.has_edge(2, 1));
  EXPECT_FALSE(g.has_edge(1, 2));
  EXPECT_DOUBLE_EQ(g.features()(2, 1), 0.5);
}

TEST(Dataset, ReportsCategorizedErrors) {
  TempDir dir("bad");
  expect_error(ErrorKind::kMissingFile, [&] { load_graph(dir.path() / "absent"); });
  std::ofstream(dir.path() / "meta") << "num_nodes=2\nnum_classes=1\nfeature_dim=1\nundirected=0\n";
  std::ofstream(dir.path() / "nodes.tsv") << "0\t0\t1\n1\t0\tabc\n";
  std::ofstream(dir.path() / "edges.tsv") << "0\t1\n";
  expect_error(ErrorKind::kMalformedLine, [&] { load_graph(dir.path()); });
  std::ofstream(dir.path() / "nodes.tsv") << "0\t0\t1\n1\t0\t2\n";
  std::ofstream(dir.path() / "edges.tsv") << "0\t1\n0\t1\n";
  expect_error(ErrorKind::kDuplicateEdge, [&] { load_graph(dir.path()); });
  std::ofstream(dir.path() / "edges.tsv") << "0\t5\n";
  expect_error(ErrorKind::kIndexOutOfRange, [&] { load_graph(dir.path()); });
}

TEST(Synthetic, HitsRequestedHomophilyAndDegree) {
  SyntheticSpec spec;
  spec.num_nodes = 600;
  spec.target_homophily = 0.15;
  spec.avg_degree = 6.0;
  const Graph g = generate_synthetic(spec);
  EXPECT_EQ(g.num_graph_edges(), 1800u);
  EXPECT_DOUBLE_EQ(edge_homophily(g), 270.0 / 1800.0);
  EXPECT_DOUBLE_EQ(average_degree(g), 6.0);
  EXPECT_EQ(g.num_self_loops(), 0u);
}

TEST(Synthetic, IsDeterministicAndBalanced) {
  SyntheticSpec spec;
  spec.seed = 11;
  EXPECT_EQ(generate_synthetic(spec), generate_synthetic(spec));
  const Graph g = generate_synthetic(spec);
  for (Label c = 0; c < spec.num_classes; ++c) {
    EXPECT_EQ(std::count(g.labels().begin(), g.labels().end(), c), 100);
  }
}

TEST(Synthetic, RejectsInfeasibleSpecs) {
  SyntheticSpec spec;
  spec.feature_dim = 2;
  expect_error(ErrorKind::kInvalidArgument, [&] { generate_synthetic(spec); });
  spec = {};
  spec.avg_degree = 400;
  expect_error(ErrorKind::kInvalidArgument, [&] { generate_synthetic(spec); });
}

}  // namespace
}  // namespace cat
