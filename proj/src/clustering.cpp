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

#include "cat/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "cat/error.hpp"
#include "cat/random.hpp"
#include "cat/text_io.hpp"

namespace cat {
namespace {

using ad::Var;

std::size_t idx(std::int64_t v) { return static_cast<std::size_t>(v); }

void check_assignment(std::span<const Label> assignment, Label k) {
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] < 0 || assignment[i] >= k) {
      fail(ErrorKind::kIndexOutOfRange, "node " + std::to_string(i) + " has cluster " +
                                            std::to_string(assignment[i]) + " outside [0, " +
                                            std::to_string(k) + ")");
    }
  }
}

Matrix centers_if_complete(const Matrix& features, std::span<const Label> assignment, Label k) {
  std::vector<bool> seen(idx(k), false);
  for (Label c : assignment) seen[idx(c)] = true;
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) return Matrix();
  return cluster_centers(features, assignment, k);
}

// Nearest center by squared distance, ties to the lowest index.
std::pair<Label, double> nearest(const Matrix& x, Eigen::Index row, const Matrix& centers) {
  Label best = 0;
  double best_d = (x.row(row) - centers.row(0)).squaredNorm();
  for (Eigen::Index c = 1; c < centers.rows(); ++c) {
    const double d = (x.row(row) - centers.row(c)).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<Label>(c);
    }
  }
  return {best, best_d};
}

double choose2(double n) { return n * (n - 1.0) / 2.0; }

struct Mlp {
  Matrix w1, b1, w2, b2;
  std::vector<Matrix*> all() { return {&w1, &b1, &w2, &b2}; }
};

Var mlp_forward(ad::Tape& tape, std::span<const Var> p, const ad::SharedSparse& sparse,
                const Matrix& dense, double dropout, Rng* rng) {
  Var h;
  if (sparse) {
    ad::SharedSparse x = rng ? ad::dropout(sparse, dropout, *rng) : sparse;
    h = ad::spmm(x, p[0]);
  } else {
    Var x = tape.constant(dense);
    if (rng) x = ad::dropout(x, dropout, *rng);
    h = ad::matmul(x, p[0]);
  }
  h = ad::relu(ad::add_row(h, p[1]));
  if (rng) h = ad::dropout(h, dropout, *rng);
  return ad::log_softmax_rows(ad::add_row(ad::matmul(h, p[2]), p[3]));
}

}  // namespace

std::string_view to_string(ClusterMode m) {
  switch (m) {
    case ClusterMode::kUnsup: return "unsup";
    case ClusterMode::kSemi: return "semi";
    case ClusterMode::kSup: return "sup";
    case ClusterMode::kRandom: return "random";
  }
  return "?";
}

ClusterMode parse_cluster_mode(std::string_view name) {
  if (name == "unsup") return ClusterMode::kUnsup;
  if (name == "semi") return ClusterMode::kSemi;
  if (name == "sup") return ClusterMode::kSup;
  if (name == "random") return ClusterMode::kRandom;
  fail(ErrorKind::kInvalidArgument, "unknown cluster mode '" + std::string(name) + "'");
}

std::vector<std::int64_t> SemanticClustering::sizes() const {
  std::vector<std::int64_t> out(idx(num_clusters), 0);
  for (Label c : assignment) ++out[idx(c)];
  return out;
}

Matrix cluster_centers(const Matrix& features, std::span<const Label> assignment, Label k) {
  if (static_cast<Eigen::Index>(assignment.size()) != features.rows()) {
    fail(ErrorKind::kShapeMismatch, "assignment length " + std::to_string(assignment.size()) +
                                        " differs from " + std::to_string(features.rows()) +
                                        " feature rows");
  }
  check_assignment(assignment, k);
  Matrix centers = Matrix::Zero(k, features.cols());
  std::vector<std::int64_t> count(idx(k), 0);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    centers.row(assignment[i]) += features.row(static_cast<Eigen::Index>(i));
    ++count[idx(assignment[i])];
  }
  for (Label c = 0; c < k; ++c) {
    if (count[idx(c)] == 0) fail(ErrorKind::kInvalidArgument, "cluster " + std::to_string(c) + " is empty");
    centers.row(c) /= static_cast<double>(count[idx(c)]);
  }
  return centers;
}

SemanticClustering kmeans_pp(const Matrix& features, Label k, std::uint64_t seed,
                             const KMeansOptions& options, KMeansTrace* trace) {
  const Eigen::Index n = features.rows();
  if (k < 1) fail(ErrorKind::kInvalidArgument, "k must be at least 1");
  if (k > n) {
    fail(ErrorKind::kInvalidArgument, "k = " + std::to_string(k) + " exceeds " +
                                          std::to_string(n) + " points");
  }
  if (options.max_iters < 1) fail(ErrorKind::kInvalidArgument, "max_iters must be at least 1");
  Matrix x = features;
  if (options.distance == KMeansDistance::kRowNormalized) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double norm = x.row(i).norm();
      if (norm > 0.0) x.row(i) /= norm;
    }
  }

  Rng rng = make_rng(seed);
  Matrix centers(k, x.cols());
  centers.row(0) = x.row(std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng));
  std::vector<double> d2(idx(n));
  for (Eigen::Index i = 0; i < n; ++i) d2[idx(i)] = (x.row(i) - centers.row(0)).squaredNorm();
  for (Label c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    Eigen::Index pick = n - 1;
    if (total > 0.0) {
      double r = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (Eigen::Index i = 0; i < n; ++i) {
        r -= d2[idx(i)];
        if (r < 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng);
    }
    centers.row(c) = x.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      d2[idx(i)] = std::min(d2[idx(i)], (x.row(i) - centers.row(c)).squaredNorm());
    }
  }

  KMeansTrace local;
  KMeansTrace& tr = trace ? *trace : local;
  tr = KMeansTrace{};
  std::vector<Label> assign(idx(n), -1);
  std::vector<double> dist(idx(n));
  for (int it = 0; it < options.max_iters; ++it) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto [c, d] = nearest(x, i, centers);
      changed = changed || c != assign[idx(i)];
      assign[idx(i)] = c;
      dist[idx(i)] = d;
    }
    std::vector<std::int64_t> size(idx(k), 0);
    for (Label c : assign) ++size[idx(c)];
    for (Label c = 0; c < k; ++c) {
      if (size[idx(c)] > 0) continue;
      // Farthest point from its own center, taken from a cluster that can spare it.
      Eigen::Index far = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (size[idx(assign[idx(i)])] < 2) continue;
        if (far < 0 || dist[idx(i)] > dist[idx(far)]) far = i;
      }
      --size[idx(assign[idx(far)])];
      assign[idx(far)] = c;
      size[idx(c)] = 1;
      dist[idx(far)] = 0.0;
      changed = true;
      ++tr.reseeds;
    }
    centers = cluster_centers(x, assign, k);
    double objective = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) objective += (x.row(i) - centers.row(assign[idx(i)])).squaredNorm();
    tr.objective.push_back(objective);
    tr.iterations = it + 1;
    if (!changed) {
      tr.converged = true;
      break;
    }
  }

  SemanticClustering sc;
  sc.assignment = std::move(assign);
  sc.num_clusters = k;
  sc.centers = cluster_centers(features, sc.assignment, k);
  sc.mode = ClusterMode::kUnsup;
  return sc;
}

SemanticClustering mlp_pseudolabels(const Graph& g, const Split& split, const TrainConfig& cfg) {
  if (split.train.empty()) fail(ErrorKind::kInvalidArgument, "training set is empty");
  if (cfg.hidden_dim < 1) fail(ErrorKind::kInvalidArgument, "hidden_dim must be positive");
  const Matrix& features = g.features();
  const Label classes = g.num_classes();
  const ad::SharedSparse sparse = ad::prefer_sparse(features) ? ad::to_sparse(features) : nullptr;

  Rng init = make_rng(derive_seed(cfg.seed, Stream::kInit, 1));
  Mlp model{ad::glorot_uniform(features.cols(), cfg.hidden_dim, init), Matrix::Zero(1, cfg.hidden_dim),
            ad::glorot_uniform(cfg.hidden_dim, classes, init), Matrix::Zero(1, classes)};
  Mlp best_model = model;
  std::vector<Matrix*> params = model.all();
  ad::Adam adam({.lr = cfg.lr, .weight_decay = cfg.weight_decay});
  Rng rng = make_rng(derive_seed(cfg.seed, Stream::kDropout, 1));
  const std::vector<ad::Index> rows(split.train.begin(), split.train.end());

  auto predict = [&](Mlp& m) {
    ad::Tape tape;
    std::vector<Var> flat;
    for (Matrix* p : m.all()) flat.push_back(tape.constant(*p));
    return Matrix(mlp_forward(tape, flat, sparse, features, 0.0, nullptr).value());
  };

  double best = -1.0;
  int stale = 0;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    {
      ad::Tape tape;
      std::vector<Var> flat;
      for (Matrix* p : params) flat.push_back(tape.parameter(*p));
      tape.backward(ad::nll_loss(mlp_forward(tape, flat, sparse, features, cfg.dropout, &rng),
                                 g.labels(), rows));
      std::vector<Matrix> grads;
      for (Var v : flat) grads.push_back(tape.grad(v));
      adam.step(params, grads);
    }
    if (split.val.empty()) {
      best_model = model;
      continue;
    }
    const double val = accuracy(predict(model), g.labels(), split.val);
    if (val > best) {
      best = val;
      stale = 0;
      best_model = model;
    } else if (++stale > cfg.patience) {
      break;
    }
  }

  const Matrix scores = predict(best_model);
  SemanticClustering sc;
  sc.num_clusters = classes;
  sc.mode = ClusterMode::kSemi;
  sc.assignment.resize(idx(g.num_nodes()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index arg = 0;
    for (Eigen::Index c = 1; c < scores.cols(); ++c) {
      if (scores(i, c) > scores(i, arg)) arg = c;
    }
    sc.assignment[idx(i)] = static_cast<Label>(arg);
  }
  for (NodeId v : split.train) sc.assignment[idx(v)] = g.label(v);
  sc.centers = centers_if_complete(features, sc.assignment, classes);
  return sc;
}

SemanticClustering supervised_clusters(std::span<const Label> labels, Label num_classes) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == kUnknownLabel) {
      fail(ErrorKind::kInvalidArgument, "node " + std::to_string(i) + " has no label");
    }
  }
  check_assignment(labels, num_classes);
  SemanticClustering sc;
  sc.assignment.assign(labels.begin(), labels.end());
  sc.num_clusters = num_classes;
  sc.mode = ClusterMode::kSup;
  return sc;
}

SemanticClustering random_clusters(NodeId num_nodes, Label k, std::uint64_t seed) {
  if (k < 1) fail(ErrorKind::kInvalidArgument, "k must be at least 1");
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<Label> pick(0, k - 1);
  SemanticClustering sc;
  sc.assignment.resize(idx(num_nodes));
  for (Label& c : sc.assignment) c = pick(rng);
  sc.num_clusters = k;
  sc.mode = ClusterMode::kRandom;
  return sc;
}

double adjusted_rand_index(std::span<const Label> a, std::span<const Label> b) {
  if (a.size() != b.size()) {
    fail(ErrorKind::kShapeMismatch, "partitions of " + std::to_string(a.size()) + " and " +
                                        std::to_string(b.size()) + " points");
  }
  std::map<std::pair<Label, Label>, double> joint;
  std::map<Label, double> rows;
  std::map<Label, double> cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  const auto n = static_cast<double>(a.size());
  // Partitions with no informative pair structure agree trivially.
  if ((rows.size() == 1 && cols.size() == 1) ||
      (rows.size() == a.size() && cols.size() == a.size()) || a.size() < 2) {
    return 1.0;
  }
  double index = 0.0;
  for (const auto& [_, count] : joint) index += choose2(count);
  double sum_a = 0.0;
  for (const auto& [_, count] : rows) sum_a += choose2(count);
  double sum_b = 0.0;
  for (const auto& [_, count] : cols) sum_b += choose2(count);
  const double expected = sum_a * sum_b / choose2(n);
  const double maximum = 0.5 * (sum_a + sum_b);
  if (maximum == expected) return 0.0;
  return (index - expected) / (maximum - expected);
}

void save_clusters(const SemanticClustering& sc, const std::filesystem::path& path) {
  std::ofstream out = text::open_output(path);
  for (std::size_t i = 0; i < sc.assignment.size(); ++i) out << i << '\t' << sc.assignment[i] << '\n';
  if (!out) fail(ErrorKind::kIo, "failed writing '" + path.string() + "'");
}

std::vector<Label> load_clusters(const std::filesystem::path& path, NodeId num_nodes) {
  std::ifstream in = text::open_input(path);
  std::vector<Label> out(idx(num_nodes), kUnknownLabel);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const std::string where = text::location(path, line_number);
    const auto fields = text::split(line, '\t');
    if (fields.size() != 2) fail(ErrorKind::kMalformedLine, where + ": expected node_id TAB cluster_id");
    const long long node = text::parse_int(fields[0], where);
    if (node < 0 || node >= num_nodes) {
      fail(ErrorKind::kIndexOutOfRange, where + ": node " + std::to_string(node) + " out of range");
    }
    out[idx(node)] = static_cast<Label>(text::parse_int(fields[1], where));
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 0) fail(ErrorKind::kMalformedLine, path.string() + ": node " + std::to_string(i) + " has no cluster");
  }
  return out;
}

}  // namespace cat
