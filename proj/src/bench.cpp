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

#include "cat/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "cat/dataset.hpp"
#include "cat/error.hpp"
#include "cat/random.hpp"
#include "cat/text_io.hpp"
#include "cat/treatment.hpp"

namespace cat {
namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs body(i) for i in [0, count) on up to `threads` workers. The first
// exception, by index, is rethrown after all workers finish.
template <class Body>
void parallel_for(int count, int threads, Body&& body) {
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max(count, 1));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto loop = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    loop();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(loop);
    for (std::thread& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<NodeId> known_rows(const Split& split) {
  std::vector<NodeId> rows = split.train;
  rows.insert(rows.end(), split.val.begin(), split.val.end());
  return rows;
}

// Labels outside train and val are hidden from every stage that could use
// them; sup clustering reads all labels by definition.
Graph cat_view(const Graph& g, const Split& split, ClusterMode mode) {
  if (mode == ClusterMode::kSup) return g;
  const std::vector<NodeId> keep = known_rows(split);
  return mask_labels(g, keep);
}

std::map<std::string, std::string> echo(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> m;
  m["dataset"] = cfg.dataset.string();
  m["model"] = std::string(to_string(cfg.variant));
  m["cluster"] = std::string(to_string(cfg.cluster));
  m["trim"] = std::string(to_string(cfg.trim));
  m["reps"] = std::to_string(cfg.repetitions);
  std::string hidden;
  for (int h : cfg.hidden) hidden += (hidden.empty() ? "" : ",") + std::to_string(h);
  m["hidden"] = hidden;
  m["lr"] = text::format_double(cfg.train.lr);
  m["weight_decay"] = text::format_double(cfg.train.weight_decay);
  m["max_epochs"] = std::to_string(cfg.train.max_epochs);
  m["patience"] = std::to_string(cfg.train.patience);
  m["heads"] = std::to_string(cfg.train.heads);
  m["layers"] = std::to_string(cfg.train.layers);
  m["dropout"] = text::format_double(cfg.train.dropout);
  m["attention_layer"] = std::to_string(cfg.train.attention_layer);
  m["finetune_epochs"] = std::to_string(cfg.finetune_epochs);
  m["kmeans_distance"] = cfg.kmeans.distance == KMeansDistance::kRaw ? "raw" : "normalized";
  m["ratios"] = text::format_double(cfg.ratios[0]) + "," + text::format_double(cfg.ratios[1]) + "," +
                text::format_double(cfg.ratios[2]);
  m["seed"] = std::to_string(cfg.seed);
  return m;
}

struct Trained {
  double val = -1.0;
  double test = 0.0;
  int hidden = 0;
  ModelParams params;
  Graph graph;
};

// Keeps the run with the strictly best validation accuracy; earlier hidden
// sizes win ties.
void keep_best(Trained& best, Trained candidate) {
  if (candidate.val > best.val) best = std::move(candidate);
}

struct RepSeeds {
  std::uint64_t split;
  std::uint64_t rep;

  RepSeeds(std::uint64_t master, int r)
      : split(derive_seed(master, Stream::kSplit, static_cast<std::uint64_t>(r))),
        rep(derive_seed(master, Stream::kInit, static_cast<std::uint64_t>(r))) {}

  TrainConfig config(const TrainConfig& base, int hidden, std::size_t hi) const {
    TrainConfig tc = base;
    tc.hidden_dim = hidden;
    tc.seed = derive_seed(rep, Stream::kDropout, hi);
    return tc;
  }
  std::uint64_t init(std::size_t hi) const { return derive_seed(rep, Stream::kInit, hi); }
  std::uint64_t retrain(std::size_t hi) const { return derive_seed(rep, Stream::kRetrain, hi); }
  std::uint64_t cat() const { return derive_seed(rep, Stream::kCluster); }
};

CatOptions cat_options(const ExperimentConfig& cfg, const TrainConfig& tc, std::uint64_t seed,
                       TrimMode trim) {
  CatOptions o;
  o.variant = cfg.variant;
  o.cluster = cfg.cluster;
  o.trim = trim;
  o.train = tc;
  o.finetune_epochs = cfg.finetune_epochs;
  o.kmeans = cfg.kmeans;
  o.seed = seed;
  return o;
}

Trained train_base(const Graph& g, const Split& split, const ExperimentConfig& cfg,
                   const TrainConfig& tc, std::uint64_t init_seed) {
  TrainResult r = train(build_model(cfg.variant, g, tc, init_seed), g, split, tc);
  Trained t;
  t.val = r.best_val_accuracy;
  t.test = evaluate(r.params, g, split.test);
  t.hidden = tc.hidden_dim;
  t.params = std::move(r.params);
  t.graph = g;
  return t;
}

// Retrains a fresh model on the trimmed graph, scored with the true labels.
Trained retrain_trimmed(const Graph& g, const TrimmedGraph& trimmed, const Split& split,
                        const ExperimentConfig& cfg, const TrainConfig& tc, std::uint64_t seed) {
  return train_base(trimmed.graph.with_labels(g.labels()), split, cfg, tc, seed);
}

Vector self_attention(const Graph& g, const ModelParams& p, int layer) {
  const std::vector<Label> one(static_cast<std::size_t>(g.num_nodes()), 0);
  return extract_attention(p, g, one, 1, layer).alpha_self;
}

std::size_t distinct_labels(std::span<const Label> labels) {
  std::vector<Label> sorted(labels.begin(), labels.end());
  std::sort(sorted.begin(), sorted.end());
  return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

void add_diagnostics(RepetitionRecord& rec, std::vector<double>* delta_out, const Graph& g,
                     const Trained& base, const Trained& cat, int layer) {
  ClusterAttention before;
  before.alpha_self = self_attention(base.graph, base.params, layer);
  ClusterAttention after;
  after.alpha_self = self_attention(cat.graph, cat.params, layer);
  const SelfAttentionDelta d = self_attention_delta(before, after);
  rec.metrics["improved_fraction"] = d.improved_fraction;
  if (delta_out) delta_out->assign(d.delta.data(), d.delta.data() + d.delta.size());
  if (distinct_labels(g.labels()) >= 2) {
    rec.metrics["silhouette_base"] = silhouette(forward(base.params, base.graph).embedding, g.labels());
    rec.metrics["silhouette_cat"] = silhouette(forward(cat.params, cat.graph).embedding, g.labels());
  }
}

Graph prepared(const Graph& g) { return add_self_loops(g); }

}  // namespace

void ExperimentConfig::apply_full_protocol() {
  repetitions = 100;
  hidden = {16, 32, 64, 128};
}

void ExperimentConfig::validate() const {
  if (repetitions < 1) fail(ErrorKind::kInvalidArgument, "repetitions must be at least 1");
  if (hidden.empty()) fail(ErrorKind::kInvalidArgument, "hidden-size sweep is empty");
  for (int h : hidden) {
    if (h < 1) fail(ErrorKind::kInvalidArgument, "hidden sizes must be positive");
  }
  const double total = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(total - 1.0) > 1e-9) fail(ErrorKind::kInvalidArgument, "split ratios must sum to 1");
}

Aggregate aggregate(std::span<const double> values) {
  Aggregate a;
  if (values.empty()) return a;
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - a.mean) * (v - a.mean);
  a.std = std::sqrt(sq / static_cast<double>(values.size()));
  return a;
}

void RunReport::finalize() {
  aggregates.clear();
  for (const std::string& arm : arms) {
    std::vector<double> v;
    for (const RepetitionRecord& r : repetitions) {
      if (auto it = r.accuracy.find(arm); it != r.accuracy.end()) v.push_back(it->second);
    }
    aggregates[arm] = aggregate(v);
  }
  std::map<std::string, std::vector<double>> metrics;
  for (const RepetitionRecord& r : repetitions) {
    for (const auto& [k, v] : r.metrics) metrics[k].push_back(v);
  }
  for (const auto& [k, v] : metrics) aggregates["metric." + k] = aggregate(v);
}

bool RunReport::same_results(const RunReport& o) const {
  return command == o.command && config == o.config && arms == o.arms &&
         repetitions == o.repetitions && aggregates == o.aggregates &&
         self_attention_delta == o.self_attention_delta;
}

std::string report_to_json(const RunReport& r) {
  json doc;
  doc["command"] = r.command;
  doc["config"] = r.config;
  doc["arms"] = r.arms;
  json reps = json::array();
  for (const RepetitionRecord& rec : r.repetitions) {
    reps.push_back({{"index", rec.index},
                    {"split_seed", rec.split_seed},
                    {"accuracy", rec.accuracy},
                    {"hidden_dim", rec.hidden_dim},
                    {"metrics", rec.metrics}});
  }
  doc["repetitions"] = reps;
  json agg = json::object();
  for (const auto& [k, a] : r.aggregates) agg[k] = {{"mean", a.mean}, {"std", a.std}};
  doc["aggregates"] = agg;
  doc["self_attention_delta"] = r.self_attention_delta;
  doc["timings"] = r.timings;
  return doc.dump(2) + "\n";
}

RunReport report_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    RunReport r;
    r.command = doc.at("command").get<std::string>();
    r.config = doc.at("config").get<std::map<std::string, std::string>>();
    r.arms = doc.at("arms").get<std::vector<std::string>>();
    for (const json& rec : doc.at("repetitions")) {
      RepetitionRecord x;
      x.index = rec.at("index").get<int>();
      x.split_seed = rec.at("split_seed").get<std::uint64_t>();
      x.accuracy = rec.at("accuracy").get<std::map<std::string, double>>();
      x.hidden_dim = rec.at("hidden_dim").get<std::map<std::string, int>>();
      x.metrics = rec.at("metrics").get<std::map<std::string, double>>();
      r.repetitions.push_back(std::move(x));
    }
    for (const auto& [k, a] : doc.at("aggregates").items()) {
      r.aggregates[k] = {a.at("mean").get<double>(), a.at("std").get<double>()};
    }
    r.self_attention_delta = doc.at("self_attention_delta").get<std::vector<double>>();
    r.timings = doc.at("timings").get<std::map<std::string, double>>();
    return r;
  } catch (const json::exception& e) {
    fail(ErrorKind::kMalformedLine, std::string("report: ") + e.what());
  }
}

void write_report(const RunReport& r, const std::filesystem::path& path) {
  std::ofstream out = text::open_output(path);
  out << report_to_json(r);
  if (!out) fail(ErrorKind::kIo, "failed writing '" + path.string() + "'");
}

RunReport read_report(const std::filesystem::path& path) {
  std::ifstream in = text::open_input(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return report_from_json(buffer.str());
}

SelfAttentionDelta self_attention_delta(const ClusterAttention& before, const ClusterAttention& after) {
  if (before.alpha_self.size() != after.alpha_self.size()) {
    fail(ErrorKind::kShapeMismatch, "self-attention over " + std::to_string(before.alpha_self.size()) +
                                        " and " + std::to_string(after.alpha_self.size()) + " nodes");
  }
  SelfAttentionDelta d;
  d.delta = after.alpha_self - before.alpha_self;
  if (d.delta.size() > 0) {
    d.improved_fraction = static_cast<double>((d.delta.array() > 0.0).count()) /
                          static_cast<double>(d.delta.size());
  }
  return d;
}

double silhouette(const Matrix& x, std::span<const Label> labels) {
  const Eigen::Index n = x.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    fail(ErrorKind::kShapeMismatch, std::to_string(labels.size()) + " labels for " +
                                        std::to_string(n) + " points");
  }
  for (Label y : labels) {
    if (y < 0) fail(ErrorKind::kInvalidArgument, "silhouette needs every label");
  }
  const Label k = n == 0 ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::int64_t> size(static_cast<std::size_t>(k), 0);
  for (Label y : labels) ++size[static_cast<std::size_t>(y)];
  if (std::count_if(size.begin(), size.end(), [](std::int64_t s) { return s > 0; }) < 2) {
    fail(ErrorKind::kInvalidArgument, "silhouette needs at least two classes");
  }
  const Vector sq = x.rowwise().squaredNorm();
  const Matrix gram = x * x.transpose();
  double total = 0.0;
  std::vector<double> sums(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto yi = static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]);
    if (size[yi] < 2) continue;
    std::fill(sums.begin(), sums.end(), 0.0);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d2 = std::max(0.0, sq(i) + sq(j) - 2.0 * gram(i, j));
      sums[static_cast<std::size_t>(labels[static_cast<std::size_t>(j)])] += std::sqrt(d2);
    }
    const double a = sums[yi] / static_cast<double>(size[yi] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < sums.size(); ++c) {
      if (c == yi || size[c] == 0) continue;
      b = std::min(b, sums[c] / static_cast<double>(size[c]));
    }
    const double m = std::max(a, b);
    if (m > 0.0) total += (b - a) / m;
  }
  return total / static_cast<double>(n);
}

RunReport cmd_compare(const Graph& input, const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  const Graph g = prepared(input);
  RunReport report;
  report.command = "compare";
  report.config = echo(cfg);
  report.arms = {"base", "cat"};
  report.repetitions.resize(static_cast<std::size_t>(cfg.repetitions));
  std::vector<std::vector<double>> deltas(static_cast<std::size_t>(cfg.repetitions));

  parallel_for(cfg.repetitions, cfg.threads, [&](int r) {
    const RepSeeds seeds(cfg.seed, r);
    const Split split = make_split(g, cfg.ratios, seeds.split);
    const Graph view = cat_view(g, split, cfg.cluster);
    const TrainConfig first = seeds.config(cfg.train, cfg.hidden[0], 0);
    const SemanticClustering sc =
        make_clustering(view, split, cat_options(cfg, first, seeds.cat(), cfg.trim));

    Trained best_base;
    Trained best_cat;
    for (std::size_t hi = 0; hi < cfg.hidden.size(); ++hi) {
      const TrainConfig tc = seeds.config(cfg.train, cfg.hidden[hi], hi);
      Trained base = train_base(g, split, cfg, tc, seeds.init(hi));
      const CatResult cat =
          run_cat(view, split, cat_options(cfg, tc, seeds.cat(), cfg.trim), &sc, &base.params);
      keep_best(best_cat, retrain_trimmed(g, cat.trimmed, split, cfg, tc, seeds.retrain(hi)));
      keep_best(best_base, std::move(base));
    }
    RepetitionRecord& rec = report.repetitions[static_cast<std::size_t>(r)];
    rec.index = r;
    rec.split_seed = seeds.split;
    rec.accuracy = {{"base", best_base.test}, {"cat", best_cat.test}};
    rec.hidden_dim = {{"base", best_base.hidden}, {"cat", best_cat.hidden}};
    add_diagnostics(rec, &deltas[static_cast<std::size_t>(r)], g, best_base, best_cat,
                    cfg.train.attention_layer);
  });
  report.self_attention_delta = deltas[0];
  report.finalize();
  report.timings["total_s"] = seconds_since(start);
  return report;
}

RunReport cmd_preexperiment(const Graph& input, const ExperimentConfig& cfg, double keep_fraction,
                            std::span<const std::uint64_t> seeds) {
  cfg.validate();
  if (seeds.empty()) fail(ErrorKind::kInvalidArgument, "pre-experiment needs at least one seed");
  const auto start = Clock::now();
  const Graph plain = remove_self_loops(input);
  RunReport report;
  report.command = "preexp";
  report.config = echo(cfg);
  report.config["keep_fraction"] = text::format_double(keep_fraction);
  report.arms = {"t0", "t1", "t2", "t3"};
  const auto count = static_cast<int>(seeds.size());
  report.repetitions.resize(seeds.size());

  parallel_for(count, cfg.threads, [&](int r) {
    const std::uint64_t s = seeds[static_cast<std::size_t>(r)];
    const Split split = make_split(plain, cfg.ratios, s);
    RepetitionRecord& rec = report.repetitions[static_cast<std::size_t>(r)];
    rec.index = r;
    rec.split_seed = s;
    for (Treatment t : {Treatment::kT0, Treatment::kT1, Treatment::kT2, Treatment::kT3}) {
      const TreatmentResult treated =
          apply_treatment(plain, t, keep_fraction, derive_seed(s, Stream::kTreatment));
      const Graph gt = add_self_loops(treated.graph);
      Trained best;
      for (std::size_t hi = 0; hi < cfg.hidden.size(); ++hi) {
        TrainConfig tc = cfg.train;
        tc.hidden_dim = cfg.hidden[hi];
        tc.seed = derive_seed(s, Stream::kDropout, hi);
        keep_best(best, train_base(gt, split, cfg, tc, derive_seed(s, Stream::kInit, hi)));
      }
      const std::string name(to_string(t));
      rec.accuracy[name] = best.test;
      rec.hidden_dim[name] = best.hidden;
      rec.metrics[name + "_homophily"] = edge_homophily(treated.graph);
      rec.metrics[name + "_average_degree"] = average_degree(treated.graph);
      if (t == Treatment::kT3) rec.metrics["t3_warnings"] = static_cast<double>(treated.warnings);
    }
  });
  report.finalize();
  report.timings["total_s"] = seconds_since(start);
  return report;
}

RunReport cmd_ablation(const Graph& input, const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  const Graph g = prepared(input);
  constexpr std::array<std::uint64_t, 3> kRandomSeeds = {0, 10, 100};
  RunReport report;
  report.command = "ablate";
  report.config = echo(cfg);
  report.arms = {"base", "cat", "cat_high_distraction", "cat_random_cluster", "cat_random_0",
                 "cat_random_10", "cat_random_100"};
  report.repetitions.resize(static_cast<std::size_t>(cfg.repetitions));

  parallel_for(cfg.repetitions, cfg.threads, [&](int r) {
    const RepSeeds seeds(cfg.seed, r);
    const Split split = make_split(g, cfg.ratios, seeds.split);
    const Graph view = cat_view(g, split, cfg.cluster);
    const TrainConfig first = seeds.config(cfg.train, cfg.hidden[0], 0);
    const SemanticClustering sc =
        make_clustering(view, split, cat_options(cfg, first, seeds.cat(), cfg.trim));

    struct Arm {
      std::string name;
      SemanticClustering clustering;
      TrimMode trim;
      Trained best;
    };
    std::vector<Arm> arms;
    arms.push_back({"cat", sc, TrimMode::kLowDistraction, {}});
    arms.push_back({"cat_high_distraction", sc, TrimMode::kHighDistraction, {}});
    for (std::uint64_t s : kRandomSeeds) {
      arms.push_back({"cat_random_" + std::to_string(s),
                      random_clusters(g.num_nodes(), g.num_classes(),
                                      derive_seed(s, Stream::kCluster, static_cast<std::uint64_t>(r))),
                      TrimMode::kLowDistraction, {}});
    }

    Trained best_base;
    for (std::size_t hi = 0; hi < cfg.hidden.size(); ++hi) {
      const TrainConfig tc = seeds.config(cfg.train, cfg.hidden[hi], hi);
      Trained base = train_base(g, split, cfg, tc, seeds.init(hi));
      for (Arm& arm : arms) {
        const CatResult cat =
            run_cat(view, split, cat_options(cfg, tc, seeds.cat(), arm.trim), &arm.clustering, &base.params);
        keep_best(arm.best, retrain_trimmed(g, cat.trimmed, split, cfg, tc, seeds.retrain(hi)));
      }
      keep_best(best_base, std::move(base));
    }
    RepetitionRecord& rec = report.repetitions[static_cast<std::size_t>(r)];
    rec.index = r;
    rec.split_seed = seeds.split;
    rec.accuracy["base"] = best_base.test;
    rec.hidden_dim["base"] = best_base.hidden;
    double random_sum = 0.0;
    for (const Arm& arm : arms) {
      rec.accuracy[arm.name] = arm.best.test;
      rec.hidden_dim[arm.name] = arm.best.hidden;
      if (arm.name.starts_with("cat_random_")) random_sum += arm.best.test;
    }
    rec.accuracy["cat_random_cluster"] = random_sum / static_cast<double>(kRandomSeeds.size());
  });
  report.finalize();
  report.timings["total_s"] = seconds_since(start);
  return report;
}

TrimArtifacts run_trim(const Graph& input, const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  TrimArtifacts a;
  a.original = prepared(input);
  const Graph& g = a.original;
  const RepSeeds seeds(cfg.seed, 0);
  a.split = make_split(g, cfg.ratios, seeds.split);
  const Graph view = cat_view(g, a.split, cfg.cluster);
  const TrainConfig tc = seeds.config(cfg.train, cfg.hidden[0], 0);
  const Trained base = train_base(g, a.split, cfg, tc, seeds.init(0));
  a.cat = run_cat(view, a.split, cat_options(cfg, tc, seeds.cat(), cfg.trim), nullptr, &base.params);
  const Trained cat = retrain_trimmed(g, a.cat.trimmed, a.split, cfg, tc, seeds.retrain(0));
  a.base = base.params;
  a.retrained = cat.params;
  a.base_embedding = forward(base.params, base.graph).embedding;
  a.cat_embedding = forward(cat.params, cat.graph).embedding;

  RunReport& report = a.report;
  report.command = "trim";
  report.config = echo(cfg);
  report.arms = {"base", "cat"};
  RepetitionRecord rec;
  rec.split_seed = seeds.split;
  rec.accuracy = {{"base", base.test}, {"cat", cat.test}};
  rec.hidden_dim = {{"base", base.hidden}, {"cat", cat.hidden}};
  add_diagnostics(rec, &report.self_attention_delta, g, base, cat, cfg.train.attention_layer);
  report.repetitions.push_back(std::move(rec));
  report.finalize();
  report.timings["cluster_s"] = a.cat.timings.cluster_s;
  report.timings["effect_s"] = a.cat.timings.effect_s;
  report.timings["trim_s"] = a.cat.timings.trim_s;
  report.timings["total_s"] = seconds_since(start);
  return a;
}

void save_embeddings(const Matrix& embeddings, const std::filesystem::path& path) {
  std::ofstream out = text::open_output(path);
  for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
    out << i;
    for (Eigen::Index j = 0; j < embeddings.cols(); ++j) out << '\t' << text::format_double(embeddings(i, j));
    out << '\n';
  }
  if (!out) fail(ErrorKind::kIo, "failed writing '" + path.string() + "'");
}

void cmd_export(const TrimArtifacts& a, const std::filesystem::path& out) {
  std::error_code ec;
  std::filesystem::create_directories(out / "trimmed", ec);
  if (ec) fail(ErrorKind::kIo, "cannot create '" + (out / "trimmed").string() + "': " + ec.message());
  write_report(a.report, out / "report.json");
  save_embeddings(a.base_embedding, out / "embeddings_base.tsv");
  save_embeddings(a.cat_embedding, out / "embeddings_cat.tsv");
  save_effect_table(a.cat.te, out / "te.tsv");
  save_clusters(a.cat.clustering, out / "clusters.tsv");
  save_retained_clusters(a.cat.trimmed, out / "retained_clusters.tsv");
  save_graph(a.cat.trimmed.graph.with_labels(a.original.labels()), out / "trimmed");
}

}  // namespace cat
