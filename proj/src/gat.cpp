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

#include "cat/gat.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cat/error.hpp"
#include "cat/text_io.hpp"

namespace cat {
namespace {

constexpr double kAttentionSlope = 0.2;

using ad::Var;

std::size_t tensors_per_head(Variant v) { return v == Variant::kGatV3 ? 3 : 2; }

void draw_attention(HeadParams& head, Variant variant, Eigen::Index in_dim, Rng& rng) {
  const Eigen::Index hd = head.weight.cols();
  head.attention = ad::glorot_uniform(2 * hd, 1, rng);
  if (variant == Variant::kGatV3) head.query_key = ad::glorot_uniform(in_dim, hd, rng);
}

void require_self_loops(const Graph& g) {
  std::vector<bool> seen(static_cast<std::size_t>(g.num_nodes()), false);
  for (const Edge& e : g.edges()) {
    if (e.is_self_loop()) seen[static_cast<std::size_t>(e.dst)] = true;
  }
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (!seen[static_cast<std::size_t>(v)]) {
      fail(ErrorKind::kInvalidArgument, "node " + std::to_string(v) + " has no self-loop");
    }
  }
}

std::vector<ad::Index> to_index(std::span<const NodeId> rows) {
  return {rows.begin(), rows.end()};
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kGat: return "gat";
    case Variant::kGatV2: return "gatv2";
    case Variant::kGatV3: return "gatv3";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  if (name == "gat") return Variant::kGat;
  if (name == "gatv2") return Variant::kGatV2;
  if (name == "gatv3") return Variant::kGatV3;
  fail(ErrorKind::kInvalidArgument, "unknown model variant '" + std::string(name) + "'");
}

GraphContext::GraphContext(const Graph& g) : graph(&g) {
  require_self_loops(g);
  const auto& edges = g.edges();
  ad::IndexList s(edges.size());
  ad::IndexList d(edges.size());
  std::vector<double> degree(static_cast<std::size_t>(g.num_nodes()), 0.0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    s[e] = edges[e].src;
    d[e] = edges[e].dst;
    degree[static_cast<std::size_t>(edges[e].dst)] += 1.0;
  }
  gcn_weight.resize(static_cast<Eigen::Index>(edges.size()), 1);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    gcn_weight(static_cast<Eigen::Index>(e), 0) =
        1.0 / std::sqrt(degree[static_cast<std::size_t>(s[e])] * degree[static_cast<std::size_t>(d[e])]);
  }
  src = ad::share(std::move(s));
  dst = ad::share(std::move(d));
  if (ad::prefer_sparse(g.features())) sparse_features = ad::to_sparse(g.features());
}

ModelParams build_model(Variant variant, const Graph& g, const TrainConfig& cfg,
                        std::uint64_t seed) {
  if (cfg.layers < 1) fail(ErrorKind::kInvalidArgument, "a model needs at least one layer");
  if (cfg.heads < 1 || cfg.hidden_dim < 1) {
    fail(ErrorKind::kInvalidArgument, "heads and hidden_dim must be positive");
  }
  if (g.num_classes() < 1) fail(ErrorKind::kInvalidArgument, "graph has no classes");
  if (variant == Variant::kGatV3 && g.edges().size() > cfg.gatv3_edge_budget) {
    fail(ErrorKind::kUnsupported, "gatv3 on " + std::to_string(g.edges().size()) +
                                      " edges exceeds the edge budget of " +
                                      std::to_string(cfg.gatv3_edge_budget));
  }
  Rng rng = make_rng(seed);
  ModelParams p;
  p.variant = variant;
  Eigen::Index in_dim = g.feature_dim();
  for (int k = 0; k < cfg.layers; ++k) {
    const bool output = k + 1 == cfg.layers;
    const int heads = output ? 1 : cfg.heads;
    const Eigen::Index hd = output ? g.num_classes() : cfg.hidden_dim;
    LayerParams layer;
    layer.concat = !output;
    for (int h = 0; h < heads; ++h) {
      HeadParams head;
      head.weight = ad::glorot_uniform(in_dim, hd, rng);
      draw_attention(head, variant, in_dim, rng);
      layer.heads.push_back(std::move(head));
    }
    p.layers.push_back(std::move(layer));
    in_dim = hd * heads;
  }
  return p;
}

std::vector<const Matrix*> parameters(const ModelParams& p) {
  std::vector<const Matrix*> out;
  for (const LayerParams& layer : p.layers) {
    for (const HeadParams& head : layer.heads) {
      out.push_back(&head.weight);
      out.push_back(&head.attention);
      if (p.variant == Variant::kGatV3) out.push_back(&head.query_key);
    }
  }
  return out;
}

std::vector<Matrix*> parameters(ModelParams& p) {
  std::vector<Matrix*> out;
  for (LayerParams& layer : p.layers) {
    for (HeadParams& head : layer.heads) {
      out.push_back(&head.weight);
      out.push_back(&head.attention);
      if (p.variant == Variant::kGatV3) out.push_back(&head.query_key);
    }
  }
  return out;
}

std::vector<ParamGroup> parameter_groups(const ModelParams& p) {
  std::vector<ParamGroup> out;
  for (const LayerParams& layer : p.layers) {
    for (std::size_t h = 0; h < layer.heads.size(); ++h) {
      out.push_back(ParamGroup::kFeature);
      out.push_back(ParamGroup::kAttention);
      if (p.variant == Variant::kGatV3) out.push_back(ParamGroup::kAttention);
    }
  }
  return out;
}

std::vector<std::string> parameter_names(const ModelParams& p) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < p.layers.size(); ++k) {
    for (std::size_t h = 0; h < p.layers[k].heads.size(); ++h) {
      const std::string prefix = "layer" + std::to_string(k) + ".head" + std::to_string(h) + ".";
      out.push_back(prefix + "weight");
      out.push_back(prefix + "attention");
      if (p.variant == Variant::kGatV3) out.push_back(prefix + "query_key");
    }
  }
  return out;
}

ModelParams reinitialize_attention(const ModelParams& p, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  ModelParams out = p;
  for (LayerParams& layer : out.layers) {
    for (HeadParams& head : layer.heads) draw_attention(head, out.variant, head.weight.rows(), rng);
  }
  return out;
}

TapeForward forward_on_tape(ad::Tape& tape, const ModelParams& layout,
                            std::span<const Var> flat, const GraphContext& ctx,
                            const ForwardOptions& options) {
  const Graph& g = *ctx.graph;
  const std::size_t per_head = tensors_per_head(layout.variant);
  const auto n = static_cast<ad::Index>(g.num_nodes());
  const bool drop = options.training && options.dropout > 0.0;
  if (drop && options.rng == nullptr) fail(ErrorKind::kInvalidArgument, "dropout needs an rng");

  TapeForward out;
  // Layer input: the sparse features on layer 0 when available, h otherwise.
  ad::SharedSparse x = ctx.sparse_features;
  Var h = x ? Var() : tape.constant(g.features());
  auto times = [&](Var w) { return x ? ad::spmm(x, w) : ad::matmul(h, w); };
  Var gcn = layout.variant == Variant::kGatV3 ? tape.constant(ctx.gcn_weight) : Var();
  std::size_t at = 0;
  for (std::size_t k = 0; k < layout.layers.size(); ++k) {
    const LayerParams& layer = layout.layers[k];
    const std::size_t heads = layer.heads.size();
    const ad::Index hd = layer.heads[0].weight.cols();
    if (flat.size() < at + heads * per_head) {
      fail(ErrorKind::kShapeMismatch, "too few parameter tensors for the model layout");
    }
    if (drop) {
      if (x) {
        x = ad::dropout(x, options.dropout, *options.rng);
      } else {
        h = ad::dropout(h, options.dropout, *options.rng);
      }
    }

    std::vector<Var> weights;
    for (std::size_t t = 0; t < heads; ++t) weights.push_back(flat[at + t * per_head]);
    Var z = times(heads > 1 ? ad::concat_cols(weights) : weights[0]);

    std::vector<Var> outputs;
    if (options.record_attention) out.snapshot.per_head.emplace_back();
    for (std::size_t t = 0; t < heads; ++t) {
      const Var a = flat[at + t * per_head + 1];
      Var zt = heads > 1 ? ad::slice_cols(z, static_cast<ad::Index>(t) * hd, hd) : z;
      Var a1 = ad::slice_rows(a, 0, hd);
      Var a2 = ad::slice_rows(a, hd, hd);
      Var keyed = zt;
      if (layout.variant == Variant::kGatV2) {
        keyed = ad::leaky_relu(zt, kAttentionSlope);
      } else if (layout.variant == Variant::kGatV3) {
        Var m = times(flat[at + t * per_head + 2]);
        keyed = ad::segment_weighted_sum(ad::gather_rows(m, ctx.src), gcn, ctx.dst, n);
      }
      Var score = ad::add(ad::gather_rows(ad::matmul(keyed, a1), ctx.dst),
                          ad::gather_rows(ad::matmul(keyed, a2), ctx.src));
      if (layout.variant == Variant::kGat) score = ad::leaky_relu(score, kAttentionSlope);
      Var alpha = ad::segment_softmax(score, ctx.dst, n);
      if (options.record_attention) out.snapshot.per_head.back().push_back(alpha.value());
      if (drop) alpha = ad::dropout(alpha, options.dropout, *options.rng);
      outputs.push_back(ad::segment_weighted_sum(ad::gather_rows(zt, ctx.src), alpha, ctx.dst, n));
    }
    at += heads * per_head;
    x.reset();

    if (layer.concat) {
      h = ad::elu(heads > 1 ? ad::concat_cols(outputs) : outputs[0]);
    } else {
      h = ad::mean_of(outputs);
    }
    if (!h.value().allFinite()) {
      fail(ErrorKind::kNumerical, "non-finite activation in layer " + std::to_string(k));
    }
    if (k + 2 == layout.layers.size()) out.embedding = h;
  }
  if (layout.layers.size() == 1) out.embedding = h;
  out.log_probs = ad::log_softmax_rows(h);

  if (options.record_attention) {
    for (const auto& layer : out.snapshot.per_head) {
      Vector mean = Vector::Zero(static_cast<Eigen::Index>(g.edges().size()));
      for (const Vector& alpha : layer) mean += alpha;
      out.snapshot.head_mean.push_back(mean / static_cast<double>(layer.size()));
    }
  }
  return out;
}

ForwardResult forward(const ModelParams& p, const Graph& g) {
  GraphContext ctx(g);
  ad::Tape tape;
  std::vector<Var> flat;
  for (const Matrix* m : parameters(p)) flat.push_back(tape.constant(*m));
  TapeForward f = forward_on_tape(tape, p, flat, ctx, ForwardOptions{});
  return {f.log_probs.value(), f.embedding.value(), std::move(f.snapshot)};
}

double accuracy(const Matrix& scores, std::span<const Label> labels, std::span<const NodeId> rows) {
  if (rows.empty()) fail(ErrorKind::kInvalidArgument, "accuracy over an empty index set");
  std::size_t correct = 0;
  for (NodeId r : rows) {
    const Label y = labels[static_cast<std::size_t>(r)];
    if (y == kUnknownLabel) {
      fail(ErrorKind::kInvalidArgument, "node " + std::to_string(r) + " has no label to score");
    }
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < scores.cols(); ++c) {
      if (scores(r, c) > scores(r, best)) best = c;
    }
    if (best == y) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

double evaluate(const ModelParams& p, const Graph& g, std::span<const NodeId> rows) {
  if (rows.empty()) fail(ErrorKind::kInvalidArgument, "evaluate over an empty index set");
  return accuracy(forward(p, g).log_probs, g.labels(), rows);
}

std::vector<ParamGradCheck> check_model_gradients(const ModelParams& p, const Graph& g,
                                                  std::span<const NodeId> rows, double step) {
  const GraphContext ctx(g);
  const std::vector<ad::Index> loss_rows = to_index(rows);
  const std::vector<const Matrix*> params = parameters(p);
  const std::vector<std::string> names = parameter_names(p);
  std::vector<ParamGradCheck> out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto loss = [&](ad::Tape& tape, Var x) {
      std::vector<Var> flat;
      for (std::size_t j = 0; j < params.size(); ++j) {
        flat.push_back(j == i ? x : tape.constant(*params[j]));
      }
      ForwardOptions eval;
      eval.record_attention = false;
      return ad::nll_loss(forward_on_tape(tape, p, flat, ctx, eval).log_probs, g.labels(),
                          loss_rows);
    };
    out.push_back({names[i], ad::grad_check(loss, *params[i], step).max_rel_error});
  }
  return out;
}

TrainResult train(const ModelParams& init, const Graph& g, const Split& split,
                  const TrainConfig& cfg, std::span<const ParamGroup> frozen) {
  if (split.train.empty()) fail(ErrorKind::kInvalidArgument, "training set is empty");
  if (cfg.max_epochs < 0 || cfg.patience < 0) {
    fail(ErrorKind::kInvalidArgument, "max_epochs and patience must be non-negative");
  }
  if (!(cfg.lr > 0.0)) fail(ErrorKind::kInvalidArgument, "learning rate must be positive");

  GraphContext ctx(g);
  TrainResult result;
  result.params = init;
  ModelParams current = init;
  std::vector<Matrix*> all = parameters(current);
  const std::vector<ParamGroup> groups = parameter_groups(current);
  std::vector<bool> trainable(all.size());
  std::vector<Matrix*> active;
  for (std::size_t i = 0; i < all.size(); ++i) {
    trainable[i] = std::find(frozen.begin(), frozen.end(), groups[i]) == frozen.end();
    if (trainable[i]) active.push_back(all[i]);
  }
  if (active.empty() || cfg.max_epochs == 0) return result;

  ad::Adam adam({.lr = cfg.lr, .weight_decay = cfg.weight_decay});
  Rng rng = make_rng(derive_seed(cfg.seed, Stream::kDropout));
  const std::vector<ad::Index> train_rows = to_index(split.train);
  const ForwardOptions train_mode{.training = true, .dropout = cfg.dropout, .rng = &rng,
                                  .record_attention = false};
  const ForwardOptions eval_mode{.record_attention = false};

  double best = -1.0;
  int stale = 0;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    {
      ad::Tape tape;
      std::vector<Var> flat;
      std::vector<Var> tracked;
      for (std::size_t i = 0; i < all.size(); ++i) {
        flat.push_back(trainable[i] ? tape.parameter(*all[i]) : tape.constant(*all[i]));
        if (trainable[i]) tracked.push_back(flat.back());
      }
      TapeForward f = forward_on_tape(tape, current, flat, ctx, train_mode);
      tape.backward(ad::nll_loss(f.log_probs, g.labels(), train_rows));
      std::vector<Matrix> grads;
      grads.reserve(tracked.size());
      for (Var v : tracked) grads.push_back(tape.grad(v));
      adam.step(active, grads);
    }
    result.epochs_run = epoch;
    if (split.val.empty()) {
      result.params = current;
      result.best_epoch = epoch;
      continue;
    }
    ad::Tape tape;
    std::vector<Var> flat;
    for (Matrix* m : all) flat.push_back(tape.constant(*m));
    const Matrix scores = forward_on_tape(tape, current, flat, ctx, eval_mode).log_probs.value();
    const double val = accuracy(scores, g.labels(), split.val);
    if (val > best) {
      best = val;
      stale = 0;
      result.params = current;
      result.best_epoch = epoch;
      result.best_val_accuracy = val;
    } else if (++stale > cfg.patience) {
      break;
    }
  }
  return result;
}

ClusterAttention cluster_attention(const Graph& g, const Vector& alpha,
                                   std::span<const Label> assignment, Label num_clusters) {
  const auto& edges = g.edges();
  if (alpha.size() != static_cast<Eigen::Index>(edges.size())) {
    fail(ErrorKind::kShapeMismatch, "attention has " + std::to_string(alpha.size()) +
                                        " entries for " + std::to_string(edges.size()) + " edges");
  }
  if (assignment.size() != static_cast<std::size_t>(g.num_nodes())) {
    fail(ErrorKind::kShapeMismatch, "cluster assignment length differs from the node count");
  }
  ClusterAttention out;
  out.alpha_sc = Matrix::Zero(g.num_nodes(), num_clusters);
  out.alpha_self = Vector::Constant(g.num_nodes(), -1.0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Edge& edge = edges[e];
    const double a = alpha(static_cast<Eigen::Index>(e));
    if (edge.is_self_loop()) {
      out.alpha_self(edge.dst) = a;
      continue;
    }
    const Label c = assignment[static_cast<std::size_t>(edge.src)];
    if (c < 0 || c >= num_clusters) {
      fail(ErrorKind::kIndexOutOfRange, "node " + std::to_string(edge.src) + " has cluster " +
                                            std::to_string(c) + " outside [0, " +
                                            std::to_string(num_clusters) + ")");
    }
    out.alpha_sc(edge.dst, c) += a;
  }
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (out.alpha_self(v) < 0.0) {
      fail(ErrorKind::kInvalidArgument, "node " + std::to_string(v) + " has no self-loop");
    }
  }
  return out;
}

ClusterAttention extract_attention(const ModelParams& p, const Graph& g,
                                   std::span<const Label> assignment, Label num_clusters,
                                   int layer) {
  if (layer < 0 || static_cast<std::size_t>(layer) >= p.layers.size()) {
    fail(ErrorKind::kInvalidArgument, "attention layer " + std::to_string(layer) +
                                          " outside a " + std::to_string(p.layers.size()) +
                                          "-layer model");
  }
  const ForwardResult f = forward(p, g);
  return cluster_attention(g, f.snapshot.head_mean[static_cast<std::size_t>(layer)], assignment,
                           num_clusters);
}

void save_params(const ModelParams& p, const std::filesystem::path& path) {
  std::ofstream out = text::open_output(path);
  out << "cat-params v1\n";
  out << "variant " << to_string(p.variant) << "\n";
  out << "layers " << p.layers.size() << "\n";
  for (const LayerParams& layer : p.layers) {
    out << "layer heads " << layer.heads.size() << " concat " << (layer.concat ? 1 : 0) << "\n";
  }
  const auto names = parameter_names(p);
  const auto tensors = parameters(p);
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const Matrix& m = *tensors[i];
    out << "tensor " << names[i] << " " << m.rows() << " " << m.cols() << "\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        out << (c ? " " : "") << text::format_double(m(r, c));
      }
      out << "\n";
    }
  }
  if (!out) fail(ErrorKind::kIo, "failed writing checkpoint '" + path.string() + "'");
}

ModelParams load_params(const std::filesystem::path& path) {
  std::ifstream in = text::open_input(path);
  std::string line;
  std::size_t line_number = 0;
  auto next = [&]() -> std::vector<std::string_view> {
    if (!std::getline(in, line)) {
      fail(ErrorKind::kMalformedLine, text::location(path, line_number + 1) + ": unexpected end of file");
    }
    ++line_number;
    return text::split(line, ' ');
  };
  auto where = [&] { return text::location(path, line_number); };
  auto expect = [&](bool ok, const char* what) {
    if (!ok) fail(ErrorKind::kMalformedLine, where() + ": expected " + what);
  };

  auto f = next();
  expect(f.size() == 2 && f[0] == "cat-params" && f[1] == "v1", "'cat-params v1'");
  f = next();
  expect(f.size() == 2 && f[0] == "variant", "'variant <name>'");
  ModelParams p;
  p.variant = parse_variant(f[1]);
  f = next();
  expect(f.size() == 2 && f[0] == "layers", "'layers <count>'");
  const long long layers = text::parse_int(f[1], where());
  for (long long k = 0; k < layers; ++k) {
    f = next();
    expect(f.size() == 5 && f[0] == "layer" && f[1] == "heads" && f[3] == "concat",
           "'layer heads <count> concat <0|1>'");
    LayerParams layer;
    layer.heads.resize(static_cast<std::size_t>(text::parse_int(f[2], where())));
    layer.concat = text::parse_int(f[4], where()) != 0;
    p.layers.push_back(std::move(layer));
  }
  const auto names = parameter_names(p);
  const auto tensors = parameters(p);
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    f = next();
    expect(f.size() == 4 && f[0] == "tensor" && f[1] == names[i], ("'tensor " + names[i] + " <rows> <cols>'").c_str());
    const long long rows = text::parse_int(f[2], where());
    const long long cols = text::parse_int(f[3], where());
    Matrix& m = *tensors[i];
    m.resize(rows, cols);
    for (long long r = 0; r < rows; ++r) {
      f = next();
      expect(static_cast<long long>(f.size()) == cols, "one value per column");
      for (long long c = 0; c < cols; ++c) m(r, c) = text::parse_double(f[static_cast<std::size_t>(c)], where());
    }
  }
  return p;
}

}  // namespace cat
