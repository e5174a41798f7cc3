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

#include "cat/causal.hpp"

#include <chrono>
#include <string>

#include "cat/error.hpp"
#include "cat/random.hpp"
#include "cat/text_io.hpp"

namespace cat {
namespace {

std::size_t idx(std::int64_t v) { return static_cast<std::size_t>(v); }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void check_clustering(const Graph& g, const SemanticClustering& sc) {
  if (sc.assignment.size() != idx(g.num_nodes())) {
    fail(ErrorKind::kShapeMismatch, "clustering covers " + std::to_string(sc.assignment.size()) +
                                        " nodes, graph has " + std::to_string(g.num_nodes()));
  }
}

}  // namespace

std::string_view to_string(TrimMode m) {
  return m == TrimMode::kLowDistraction ? "low" : "high";
}

TrimMode parse_trim_mode(std::string_view name) {
  if (name == "low" || name == "low_distraction") return TrimMode::kLowDistraction;
  if (name == "high" || name == "high_distraction") return TrimMode::kHighDistraction;
  fail(ErrorKind::kInvalidArgument, "unknown trim mode '" + std::string(name) + "'");
}

Graph intervene_cluster(const Graph& g, const SemanticClustering& sc, Label c) {
  check_clustering(g, sc);
  if (c < 0 || c >= sc.num_clusters) {
    fail(ErrorKind::kIndexOutOfRange, "cluster " + std::to_string(c) + " outside [0, " +
                                          std::to_string(sc.num_clusters) + ")");
  }
  std::vector<Edge> kept;
  kept.reserve(g.edges().size());
  for (const Edge& e : g.edges()) {
    if (e.is_self_loop() || sc.assignment[idx(e.src)] != c) kept.push_back(e);
  }
  return g.with_edges(std::move(kept), /*undirected=*/false);
}

ModelParams finetune_attention(const ModelParams& pretrained, const Graph& g, const Split& split,
                               const TrainConfig& cfg, std::uint64_t reinit_seed) {
  ModelParams start = reinitialize_attention(pretrained, reinit_seed);
  const ParamGroup frozen[] = {ParamGroup::kFeature};
  return train(start, g, split, cfg, frozen).params;
}

Vector total_effect(const ClusterAttention& base, const ClusterAttention& intervened) {
  if (base.alpha_self.size() != intervened.alpha_self.size()) {
    fail(ErrorKind::kShapeMismatch, "total effect over " + std::to_string(base.alpha_self.size()) +
                                        " and " + std::to_string(intervened.alpha_self.size()) +
                                        " nodes");
  }
  return intervened.alpha_self - base.alpha_self;
}

BoolMatrix present_mask(const Graph& g, const SemanticClustering& sc) {
  check_clustering(g, sc);
  BoolMatrix mask = BoolMatrix::Constant(g.num_nodes(), sc.num_clusters, false);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    for (NodeId u : g.in_neighbors(v)) mask(v, sc.assignment[idx(u)]) = true;
  }
  return mask;
}

TrimmedGraph trim_graph(const Graph& g, const SemanticClustering& sc, const TotalEffectTable& te,
                        TrimMode mode) {
  check_clustering(g, sc);
  if (te.te_self.rows() != g.num_nodes() || te.te_self.cols() != sc.num_clusters ||
      te.present_mask.rows() != te.te_self.rows() || te.present_mask.cols() != te.te_self.cols()) {
    fail(ErrorKind::kShapeMismatch, "effect table is " + std::to_string(te.te_self.rows()) + " x " +
                                        std::to_string(te.te_self.cols()) + ", expected " +
                                        std::to_string(g.num_nodes()) + " x " +
                                        std::to_string(sc.num_clusters));
  }
  TrimmedGraph out;
  out.retained_cluster.assign(idx(g.num_nodes()), kNoCluster);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    Label pick = kNoCluster;
    for (Label c = 0; c < sc.num_clusters; ++c) {
      if (!te.present_mask(v, c)) continue;
      if (pick == kNoCluster) {
        pick = c;
        continue;
      }
      const double cand = te.te_self(v, c);
      const double cur = te.te_self(v, pick);
      if (mode == TrimMode::kLowDistraction ? cand < cur : cand > cur) pick = c;
    }
    out.retained_cluster[idx(v)] = pick;
  }
  std::vector<Edge> kept;
  for (const Edge& e : g.edges()) {
    if (e.is_self_loop() || sc.assignment[idx(e.src)] == out.retained_cluster[idx(e.dst)]) {
      kept.push_back(e);
    }
  }
  out.graph = g.with_edges(std::move(kept), /*undirected=*/false);
  return out;
}

std::uint64_t cat_init_seed(const CatOptions& o) { return derive_seed(o.seed, Stream::kInit); }
std::uint64_t cat_reinit_seed(const CatOptions& o) { return derive_seed(o.seed, Stream::kFinetune); }
std::uint64_t cat_cluster_seed(const CatOptions& o) { return derive_seed(o.seed, Stream::kCluster); }

TrainConfig cat_finetune_config(const CatOptions& o) {
  TrainConfig cfg = o.train;
  if (o.finetune_epochs >= 0) cfg.max_epochs = o.finetune_epochs;
  cfg.seed = derive_seed(o.seed, Stream::kFinetune, 1);
  return cfg;
}

SemanticClustering make_clustering(const Graph& g, const Split& split, const CatOptions& o) {
  switch (o.cluster) {
    case ClusterMode::kUnsup:
      return kmeans_pp(g.features(), g.num_classes(), cat_cluster_seed(o), o.kmeans);
    case ClusterMode::kSemi: {
      TrainConfig cfg = o.train;
      cfg.seed = cat_cluster_seed(o);
      return mlp_pseudolabels(g, split, cfg);
    }
    case ClusterMode::kSup:
      return supervised_clusters(g.labels(), g.num_classes());
    case ClusterMode::kRandom:
      return random_clusters(g.num_nodes(), g.num_classes(), cat_cluster_seed(o));
  }
  fail(ErrorKind::kInvalidArgument, "unknown cluster mode");
}

CatResult run_cat(const Graph& g, const Split& split, const CatOptions& options,
                  const SemanticClustering* clustering, const ModelParams* pretrained) {
  CatResult r;
  auto start = std::chrono::steady_clock::now();
  r.clustering = clustering ? *clustering : make_clustering(g, split, options);
  check_clustering(g, r.clustering);
  r.timings.cluster_s = seconds_since(start);

  start = std::chrono::steady_clock::now();
  if (pretrained) {
    r.pretrained = *pretrained;
  } else {
    const ModelParams init = build_model(options.variant, g, options.train, cat_init_seed(options));
    r.pretrained = train(init, g, split, options.train).params;
  }
  r.timings.pretrain_s = seconds_since(start);

  start = std::chrono::steady_clock::now();
  const TrainConfig ft = cat_finetune_config(options);
  const std::uint64_t reinit = cat_reinit_seed(options);
  const Label k = r.clustering.num_clusters;
  const int layer = options.train.attention_layer;
  // The observed world goes through the same re-initialization and
  // fine-tuning as every intervened one, so only the graph differs.
  const ModelParams base_params = finetune_attention(r.pretrained, g, split, ft, reinit);
  r.base = extract_attention(base_params, g, r.clustering.assignment, k, layer);
  r.te.te_self = Matrix::Zero(g.num_nodes(), k);
  r.te.present_mask = present_mask(g, r.clustering);
  const std::vector<std::int64_t> sizes = r.clustering.sizes();
  for (Label c = 0; c < k; ++c) {
    if (sizes[idx(c)] == 0) {
      // Nothing to remove: the intervened world is the observed one.
      r.intervened.push_back(r.base);
      continue;
    }
    const Graph gc = intervene_cluster(g, r.clustering, c);
    const ModelParams pc = finetune_attention(r.pretrained, gc, split, ft, reinit);
    r.intervened.push_back(extract_attention(pc, gc, r.clustering.assignment, k, layer));
    r.te.te_self.col(c) = total_effect(r.base, r.intervened.back());
  }
  r.timings.effect_s = seconds_since(start);

  start = std::chrono::steady_clock::now();
  r.trimmed = trim_graph(g, r.clustering, r.te, options.trim);
  r.timings.trim_s = seconds_since(start);
  return r;
}

void save_effect_table(const TotalEffectTable& te, const std::filesystem::path& path) {
  std::ofstream out = text::open_output(path);
  out << "node_id";
  for (Eigen::Index c = 0; c < te.te_self.cols(); ++c) out << "\tcluster_" << c;
  out << '\n';
  for (Eigen::Index v = 0; v < te.te_self.rows(); ++v) {
    out << v;
    for (Eigen::Index c = 0; c < te.te_self.cols(); ++c) {
      out << '\t' << (te.present_mask(v, c) ? text::format_double(te.te_self(v, c)) : "NA");
    }
    out << '\n';
  }
  if (!out) fail(ErrorKind::kIo, "failed writing '" + path.string() + "'");
}

void save_retained_clusters(const TrimmedGraph& t, const std::filesystem::path& path) {
  std::ofstream out = text::open_output(path);
  for (std::size_t v = 0; v < t.retained_cluster.size(); ++v) {
    out << v << '\t';
    if (t.retained_cluster[v] == kNoCluster) {
      out << "none";
    } else {
      out << t.retained_cluster[v];
    }
    out << '\n';
  }
  if (!out) fail(ErrorKind::kIo, "failed writing '" + path.string() + "'");
}

}  // namespace cat
