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

#include "cat/dataset.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "cat/error.hpp"
#include "cat/text_io.hpp"

namespace fs = std::filesystem;

namespace cat {
namespace {

struct Meta {
  NodeId num_nodes = -1;
  long long num_classes = -1;
  long long feature_dim = -1;
  int undirected = -1;
};

Meta read_meta(const fs::path& path) {
  std::ifstream in = text::open_input(path);
  Meta meta;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const std::string where = text::location(path, line_number);
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::kMalformedLine, where + ": expected key=value");
    const std::string_view key = std::string_view(line).substr(0, eq);
    const std::string_view value = std::string_view(line).substr(eq + 1);
    if (key == "num_nodes") {
      meta.num_nodes = text::parse_int(value, where);
    } else if (key == "num_classes") {
      meta.num_classes = text::parse_int(value, where);
    } else if (key == "feature_dim") {
      meta.feature_dim = text::parse_int(value, where);
    } else if (key == "undirected") {
      const long long u = text::parse_int(value, where);
      if (u != 0 && u != 1) fail(ErrorKind::kMalformedLine, where + ": undirected must be 0 or 1");
      meta.undirected = static_cast<int>(u);
    }
  }
  auto require = [&](long long v, const char* key) {
    if (v < 0) fail(ErrorKind::kMalformedLine, path.filename().string() + ": missing " + key);
  };
  require(meta.num_nodes, "num_nodes");
  require(meta.num_classes, "num_classes");
  require(meta.feature_dim, "feature_dim");
  require(meta.undirected, "undirected");
  return meta;
}

}  // namespace

Graph load_graph(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    fail(ErrorKind::kMissingFile, "dataset directory '" + dir.string() + "' does not exist");
  }
  const Meta meta = read_meta(dir / "meta");
  const auto n = static_cast<std::size_t>(meta.num_nodes);
  const auto dim = static_cast<Eigen::Index>(meta.feature_dim);

  Matrix features = Matrix::Zero(meta.num_nodes, dim);
  std::vector<Label> labels(n, kUnknownLabel);
  std::vector<bool> seen(n, false);
  {
    const fs::path path = dir / "nodes.tsv";
    std::ifstream in = text::open_input(path);
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
      ++line_number;
      if (line.empty()) continue;
      const std::string where = text::location(path, line_number);
      const auto fields = text::split(line, '\t');
      if (fields.size() != 3) {
        fail(ErrorKind::kMalformedLine, where + ": expected 3 tab-separated fields, got " +
                                            std::to_string(fields.size()));
      }
      const long long id = text::parse_int(fields[0], where);
      if (id < 0 || id >= meta.num_nodes) {
        fail(ErrorKind::kIndexOutOfRange, where + ": node id " + std::to_string(id) +
                                              " outside [0, " + std::to_string(meta.num_nodes) + ")");
      }
      const auto v = static_cast<std::size_t>(id);
      if (seen[v]) fail(ErrorKind::kMalformedLine, where + ": node id " + std::to_string(id) + " repeated");
      seen[v] = true;
      if (fields[1] != "-") {
        const long long y = text::parse_int(fields[1], where);
        if (y < 0 || y >= meta.num_classes) {
          fail(ErrorKind::kIndexOutOfRange, where + ": label " + std::to_string(y) +
                                                " outside [0, " + std::to_string(meta.num_classes) + ")");
        }
        labels[v] = static_cast<Label>(y);
      }
      if (dim == 0) {
        if (!fields[2].empty()) fail(ErrorKind::kMalformedLine, where + ": features given but feature_dim=0");
        continue;
      }
      const auto values = text::split(fields[2], ',');
      if (static_cast<Eigen::Index>(values.size()) != dim) {
        fail(ErrorKind::kMalformedLine, where + ": expected " + std::to_string(dim) +
                                            " features, got " + std::to_string(values.size()));
      }
      for (Eigen::Index k = 0; k < dim; ++k) {
        features(id, k) = text::parse_double(values[static_cast<std::size_t>(k)], where);
      }
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (!seen[v]) {
        fail(ErrorKind::kMalformedLine, path.filename().string() + ": node id " + std::to_string(v) +
                                            " missing (ids must be 0..num_nodes-1)");
      }
    }
  }

  std::vector<Edge> edges;
  {
    const fs::path path = dir / "edges.tsv";
    std::ifstream in = text::open_input(path);
    std::set<std::pair<NodeId, NodeId>> listed;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
      ++line_number;
      if (line.empty()) continue;
      const std::string where = text::location(path, line_number);
      const auto fields = text::split(line, '\t');
      if (fields.size() != 2) {
        fail(ErrorKind::kMalformedLine, where + ": expected 2 tab-separated fields, got " +
                                            std::to_string(fields.size()));
      }
      const NodeId src = text::parse_int(fields[0], where);
      const NodeId dst = text::parse_int(fields[1], where);
      if (src < 0 || src >= meta.num_nodes || dst < 0 || dst >= meta.num_nodes) {
        fail(ErrorKind::kIndexOutOfRange, where + ": edge (" + std::to_string(src) + ", " +
                                              std::to_string(dst) + ") references a missing node");
      }
      if (!listed.emplace(src, dst).second) {
        fail(ErrorKind::kDuplicateEdge, where + ": duplicate edge (" + std::to_string(src) + ", " +
                                            std::to_string(dst) + ")");
      }
    }
    std::set<std::pair<NodeId, NodeId>> all = listed;
    if (meta.undirected == 1) {
      for (const auto& [s, d] : listed) all.emplace(d, s);
    }
    edges.reserve(all.size());
    for (const auto& [s, d] : all) edges.push_back({s, d});
  }

  return Graph(meta.num_nodes, static_cast<Label>(meta.num_classes), std::move(edges),
               std::move(features), std::move(labels), meta.undirected == 1);
}

void save_graph(const Graph& g, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create '" + dir.string() + "': " + ec.message());
  {
    std::ofstream out = text::open_output(dir / "meta");
    out << "num_nodes=" << g.num_nodes() << '\n'
        << "num_classes=" << g.num_classes() << '\n'
        << "feature_dim=" << g.feature_dim() << '\n'
        << "undirected=" << (g.undirected() ? 1 : 0) << '\n';
  }
  {
    std::ofstream out = text::open_output(dir / "nodes.tsv");
    const Matrix& x = g.features();
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      out << v << '\t';
      if (g.label(v) == kUnknownLabel) {
        out << '-';
      } else {
        out << g.label(v);
      }
      out << '\t';
      for (Eigen::Index k = 0; k < x.cols(); ++k) {
        if (k > 0) out << ',';
        out << text::format_double(x(v, k));
      }
      out << '\n';
    }
  }
  {
    std::ofstream out = text::open_output(dir / "edges.tsv");
    for (const Edge& e : g.edges()) {
      if (g.undirected() && e.src > e.dst) continue;
      out << e.src << '\t' << e.dst << '\n';
    }
    if (!out) fail(ErrorKind::kIo, "write failed for '" + (dir / "edges.tsv").string() + "'");
  }
}

}  // namespace cat
