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

// Fixtures shared by the unit suites.

#pragma once

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cat/error.hpp"
#include "cat/graph.hpp"

namespace cat::testing {

// Runs `body` and checks it throws cat::Error of the given kind.
template <typename Body>
void expect_error(ErrorKind kind, Body&& body) {
  try {
    body();
    ADD_FAILURE() << "expected cat::Error";
  } catch (const Error& e) {
    EXPECT_EQ(static_cast<int>(e.kind()), static_cast<int>(kind)) << e.what();
  }
}

inline std::vector<Edge> undirected_edges(const std::vector<std::pair<NodeId, NodeId>>& pairs) {
  std::vector<Edge> out;
  for (auto [u, v] : pairs) {
    out.push_back({u, v});
    out.push_back({v, u});
  }
  return out;
}

// Undirected graph with labels and small random features.
inline Graph make_graph(NodeId n, Label k, const std::vector<std::pair<NodeId, NodeId>>& pairs,
                        std::vector<Label> labels, Eigen::Index dim = 3, unsigned seed = 1) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  Matrix x(n, dim);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  return Graph(n, k, undirected_edges(pairs), std::move(x), std::move(labels), true);
}

// Random undirected graph with roughly `degree` neighbors per node.
inline Graph random_graph(NodeId n, Label k, double degree, Eigen::Index dim, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<NodeId> node(0, n - 1);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  std::vector<std::vector<bool>> used(static_cast<std::size_t>(n),
                                      std::vector<bool>(static_cast<std::size_t>(n), false));
  const auto wanted = static_cast<std::size_t>(degree * static_cast<double>(n) / 2.0);
  while (pairs.size() < wanted) {
    NodeId u = node(rng);
    NodeId v = node(rng);
    if (u == v || used[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)]) continue;
    used[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = true;
    used[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] = true;
    pairs.emplace_back(u, v);
  }
  std::vector<Label> labels(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<Label>(i % static_cast<std::size_t>(k));
  return make_graph(n, k, pairs, std::move(labels), dim, seed + 17);
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("cat_test_" + tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace cat::testing
