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

// catbench: command-line front end for the trimming pipeline.
//
// Exit codes: 0 success, 1 unexpected failure, 2 usage error, 3..13 the
// cat::ErrorKind of the failure (see error.hpp). gradcheck exits with the
// numerical-error code when a gradient is off.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cat/bench.hpp"
#include "cat/dataset.hpp"
#include "cat/error.hpp"
#include "cat/synthetic.hpp"
#include "cat/text_io.hpp"

namespace {

constexpr int kUsageExit = 2;

struct CliOptions {
  std::string dataset;
  std::string model = "gat";
  std::string cluster = "sup";
  std::string trim = "low";
  int reps = 20;
  std::uint64_t seed = 0;
  std::string hidden = "16,32,64";
  std::string out;
  bool full_protocol = false;
  int threads = 0;
  double lr = 1e-3;
  double weight_decay = 1e-4;
  int max_epochs = 600;
  int patience = 50;
  int heads = 8;
  double dropout = 0.6;
  int attention_layer = 0;
  int finetune_epochs = -1;
  double keep_fraction = 0.5;

  cat::SyntheticSpec synth;
};

std::vector<int> parse_hidden(const std::string& list) {
  std::vector<int> out;
  for (std::string_view field : cat::text::split(list, ',')) {
    out.push_back(static_cast<int>(cat::text::parse_int(field, "--hidden")));
  }
  return out;
}

cat::ExperimentConfig experiment(const CliOptions& o) {
  cat::ExperimentConfig cfg;
  cfg.dataset = o.dataset;
  cfg.variant = cat::parse_variant(o.model);
  cfg.cluster = cat::parse_cluster_mode(o.cluster);
  cfg.trim = cat::parse_trim_mode(o.trim);
  cfg.repetitions = o.reps;
  cfg.hidden = parse_hidden(o.hidden);
  cfg.seed = o.seed;
  cfg.out = o.out;
  cfg.threads = o.threads;
  cfg.train.lr = o.lr;
  cfg.train.weight_decay = o.weight_decay;
  cfg.train.max_epochs = o.max_epochs;
  cfg.train.patience = o.patience;
  cfg.train.heads = o.heads;
  cfg.train.dropout = o.dropout;
  cfg.train.attention_layer = o.attention_layer;
  cfg.finetune_epochs = o.finetune_epochs;
  if (o.full_protocol) cfg.apply_full_protocol();
  cfg.validate();
  return cfg;
}

cat::Graph load_dataset(const CliOptions& o) {
  if (o.dataset.empty()) cat::fail(cat::ErrorKind::kInvalidArgument, "--dataset is required");
  return cat::load_graph(o.dataset);
}

void print_report(const cat::RunReport& r) {
  std::cout << std::fixed << std::setprecision(2);
  for (const std::string& arm : r.arms) {
    const cat::Aggregate& a = r.aggregates.at(arm);
    std::cout << std::left << std::setw(24) << arm << std::right << std::setw(7) << 100.0 * a.mean
              << " +- " << std::setw(5) << 100.0 * a.std << '\n';
  }
  std::cout << std::setprecision(4);
  for (const auto& [key, a] : r.aggregates) {
    if (key.starts_with("metric.")) std::cout << key << ' ' << a.mean << " +- " << a.std << '\n';
  }
  if (auto it = r.timings.find("total_s"); it != r.timings.end()) {
    std::cout << std::setprecision(1) << "elapsed " << it->second << " s\n";
  }
}

void maybe_write(const cat::RunReport& r, const CliOptions& o) {
  if (o.out.empty()) return;
  std::filesystem::create_directories(o.out);
  cat::write_report(r, std::filesystem::path(o.out) / "report.json");
}

int run_compare(const CliOptions& o) {
  const cat::Graph g = load_dataset(o);
  const cat::RunReport r = cat::cmd_compare(g, experiment(o));
  print_report(r);
  maybe_write(r, o);
  return 0;
}

int run_ablate(const CliOptions& o) {
  const cat::Graph g = load_dataset(o);
  const cat::RunReport r = cat::cmd_ablation(g, experiment(o));
  print_report(r);
  maybe_write(r, o);
  return 0;
}

int run_preexp(const CliOptions& o) {
  const cat::Graph g = load_dataset(o);
  const cat::ExperimentConfig cfg = experiment(o);
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < cfg.repetitions; ++i) seeds.push_back(o.seed + static_cast<std::uint64_t>(i));
  const cat::RunReport r = cat::cmd_preexperiment(g, cfg, o.keep_fraction, seeds);
  print_report(r);
  maybe_write(r, o);
  return 0;
}

int run_trim_cmd(const CliOptions& o, bool full_export) {
  if (o.out.empty()) cat::fail(cat::ErrorKind::kInvalidArgument, "--out is required");
  const cat::Graph g = load_dataset(o);
  const cat::TrimArtifacts a = cat::run_trim(g, experiment(o));
  const std::filesystem::path out = o.out;
  if (full_export) {
    cat::cmd_export(a, out);
    cat::save_params(a.base, out / "params_base.txt");
    cat::save_params(a.retrained, out / "params_cat.txt");
  } else {
    std::filesystem::create_directories(out);
    cat::save_graph(a.cat.trimmed.graph.with_labels(a.original.labels()), out / "trimmed");
    cat::save_effect_table(a.cat.te, out / "te.tsv");
    cat::save_retained_clusters(a.cat.trimmed, out / "retained_clusters.tsv");
    cat::write_report(a.report, out / "report.json");
  }
  print_report(a.report);
  std::cout << "edges " << a.original.num_graph_edges() << " -> "
            << a.cat.trimmed.graph.num_graph_edges() << '\n';
  return 0;
}

int run_gradcheck(const CliOptions& o) {
  cat::SyntheticSpec spec;
  spec.num_nodes = 20;
  spec.num_classes = 3;
  spec.feature_dim = 6;
  spec.avg_degree = 4.0;
  spec.seed = o.seed;
  const cat::Graph g = cat::add_self_loops(cat::generate_synthetic(spec));
  cat::TrainConfig cfg;
  cfg.layers = 2;
  cfg.heads = 2;
  cfg.hidden_dim = 8;
  const cat::ModelParams p = cat::build_model(cat::parse_variant(o.model), g, cfg, o.seed);
  std::vector<cat::NodeId> rows(static_cast<std::size_t>(g.num_nodes()));
  for (cat::NodeId v = 0; v < g.num_nodes(); ++v) rows[static_cast<std::size_t>(v)] = v;
  double worst = 0.0;
  std::cout << std::scientific << std::setprecision(3);
  for (const cat::ParamGradCheck& c : cat::check_model_gradients(p, g, rows)) {
    std::cout << std::left << std::setw(28) << c.name << c.max_rel_error << '\n';
    worst = std::max(worst, c.max_rel_error);
  }
  const bool ok = worst < 1e-4;
  std::cout << "max relative error " << worst << (ok ? " ok" : " FAILED") << '\n';
  return ok ? 0 : static_cast<int>(cat::ErrorKind::kNumerical);
}

int run_synth(const CliOptions& o) {
  if (o.out.empty()) cat::fail(cat::ErrorKind::kInvalidArgument, "--out is required");
  cat::SyntheticSpec spec = o.synth;
  spec.seed = o.seed;
  const cat::Graph g = cat::generate_synthetic(spec);
  cat::save_graph(g, o.out);
  std::cout << "nodes " << g.num_nodes() << " edges " << g.num_graph_edges() << " homophily "
            << std::setprecision(4) << cat::edge_homophily(g) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CliOptions o;
  CLI::App app{"catbench: causal attention trimming for heterophilic graphs"};
  app.set_config("--config", "", "flat key=value file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--dataset", o.dataset, "dataset directory");
  app.add_option("--model", o.model, "gat, gatv2 or gatv3")
      ->check(CLI::IsMember({"gat", "gatv2", "gatv3"}));
  app.add_option("--cluster", o.cluster, "unsup, semi, sup or random")
      ->check(CLI::IsMember({"unsup", "semi", "sup", "random"}));
  app.add_option("--trim", o.trim, "low or high")->check(CLI::IsMember({"low", "high"}));
  app.add_option("--reps", o.reps, "repetitions (seeds for preexp)")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "master seed");
  app.add_option("--hidden", o.hidden, "comma-separated hidden sizes");
  app.add_option("--out", o.out, "output directory");
  app.add_flag("--full-protocol", o.full_protocol, "100 repetitions, hidden 16,32,64,128");
  app.add_option("--threads", o.threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  app.add_option("--lr", o.lr, "learning rate")->check(CLI::PositiveNumber);
  app.add_option("--weight-decay", o.weight_decay, "L2 weight decay");
  app.add_option("--max-epochs", o.max_epochs, "epoch budget")->check(CLI::NonNegativeNumber);
  app.add_option("--patience", o.patience, "early-stopping patience")->check(CLI::NonNegativeNumber);
  app.add_option("--heads", o.heads, "attention heads in hidden layers")->check(CLI::PositiveNumber);
  app.add_option("--dropout", o.dropout, "dropout probability")->check(CLI::Range(0.0, 0.99));
  app.add_option("--attention-layer", o.attention_layer, "layer read for self-attention");
  app.add_option("--finetune-epochs", o.finetune_epochs, "attention fine-tuning epochs, -1 = max-epochs");
  app.add_option("--keep-fraction", o.keep_fraction, "degree kept by t1/t2")->check(CLI::Range(0.0, 1.0));

  auto* compare = app.add_subcommand("compare", "base model vs CAT over repetitions");
  auto* preexp = app.add_subcommand("preexp", "base model on the t0..t3 treatment graphs");
  auto* ablate = app.add_subcommand("ablate", "CAT vs random clusters and high distraction");
  auto* trim = app.add_subcommand("trim", "one CAT run; writes the trimmed graph and effects");
  auto* exp = app.add_subcommand("export", "one CAT run; writes every artifact and checkpoints");
  auto* grad = app.add_subcommand("gradcheck", "finite-difference check on a random 20-node graph");
  auto* synth = app.add_subcommand("synth", "writes a synthetic dataset");
  synth->add_option("--nodes", o.synth.num_nodes)->check(CLI::PositiveNumber);
  synth->add_option("--classes", o.synth.num_classes)->check(CLI::PositiveNumber);
  synth->add_option("--features", o.synth.feature_dim)->check(CLI::PositiveNumber);
  synth->add_option("--homophily", o.synth.target_homophily)->check(CLI::Range(0.0, 1.0));
  synth->add_option("--degree", o.synth.avg_degree)->check(CLI::PositiveNumber);
  synth->add_option("--separation", o.synth.class_separation)->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageExit;
  }

  try {
    if (*compare) return run_compare(o);
    if (*preexp) return run_preexp(o);
    if (*ablate) return run_ablate(o);
    if (*trim) return run_trim_cmd(o, false);
    if (*exp) return run_trim_cmd(o, true);
    if (*grad) return run_gradcheck(o);
    if (*synth) return run_synth(o);
  } catch (const cat::Error& e) {
    std::cerr << "error (" << cat::to_string(e.kind()) << "): " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kUsageExit;
}
