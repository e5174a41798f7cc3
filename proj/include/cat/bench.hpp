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

// Experiment drivers. Each repetition owns its split and every RNG stream,
// all derived from the master seed, so repetitions run in any order or in
// parallel and the report does not depend on scheduling.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cat/causal.hpp"
#include "cat/clustering.hpp"
#include "cat/gat.hpp"
#include "cat/graph.hpp"

namespace cat {

struct ExperimentConfig {
  std::filesystem::path dataset;
  Variant variant = Variant::kGat;
  ClusterMode cluster = ClusterMode::kSup;
  TrimMode trim = TrimMode::kLowDistraction;
  int repetitions = 20;
  std::vector<int> hidden = {16, 32, 64};
  TrainConfig train;
  int finetune_epochs = -1;
  KMeansOptions kmeans;
  std::array<double, 3> ratios = {0.6, 0.2, 0.2};
  std::filesystem::path out;
  std::uint64_t seed = 0;
  /// Worker threads for repetitions; 0 picks the hardware concurrency.
  int threads = 0;

  /// Full protocol: 100 repetitions and hidden sizes {16, 32, 64, 128}.
  void apply_full_protocol();
  void validate() const;
};

struct Aggregate {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation

  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

Aggregate aggregate(std::span<const double> values);

struct RepetitionRecord {
  int index = 0;
  std::uint64_t split_seed = 0;
  /// Test accuracy per arm ("base", "cat", "t1", ...).
  std::map<std::string, double> accuracy;
  /// Hidden size chosen by validation accuracy per arm.
  std::map<std::string, int> hidden_dim;
  /// Optional per-repetition diagnostics (improved_fraction, silhouette_base, ...).
  std::map<std::string, double> metrics;

  friend bool operator==(const RepetitionRecord&, const RepetitionRecord&) = default;
};

struct RunReport {
  std::string command;
  std::map<std::string, std::string> config;
  std::vector<std::string> arms;
  std::vector<RepetitionRecord> repetitions;
  std::map<std::string, Aggregate> aggregates;
  /// Per-node alpha_self change of the first repetition (compare only).
  std::vector<double> self_attention_delta;
  /// Wall-clock seconds; excluded from result comparisons.
  std::map<std::string, double> timings;

  /// Recomputes aggregates from the repetition rows.
  void finalize();
  /// Equality of everything except timings.
  bool same_results(const RunReport& other) const;
};

std::string report_to_json(const RunReport& r);
RunReport report_from_json(const std::string& text);
void write_report(const RunReport& r, const std::filesystem::path& path);
RunReport read_report(const std::filesystem::path& path);

struct SelfAttentionDelta {
  Vector delta;
  double improved_fraction = 0.0;
};

SelfAttentionDelta self_attention_delta(const ClusterAttention& before, const ClusterAttention& after);

/// Mean silhouette coefficient with Euclidean distance; singleton clusters score 0.
double silhouette(const Matrix& embeddings, std::span<const Label> labels);

/// Base model vs CAT-trimmed retraining, per repetition and hidden size.
RunReport cmd_compare(const Graph& g, const ExperimentConfig& cfg);

/// Base model on the control graph and on the three treatment graphs, one
/// repetition per seed.
RunReport cmd_preexperiment(const Graph& g, const ExperimentConfig& cfg, double keep_fraction,
                            std::span<const std::uint64_t> seeds);

/// CAT, CAT with random clusters (seeds 0, 10, 100) and CAT keeping the
/// highest-effect cluster, under one protocol.
RunReport cmd_ablation(const Graph& g, const ExperimentConfig& cfg);

/// Everything one CAT run produces, for export.
struct TrimArtifacts {
  Graph original;  // with self-loops
  Split split;
  CatResult cat;
  ModelParams base;
  ModelParams retrained;
  Matrix base_embedding;
  Matrix cat_embedding;
  RunReport report;
};

TrimArtifacts run_trim(const Graph& g, const ExperimentConfig& cfg);

/// Writes report.json, embeddings_base.tsv, embeddings_cat.tsv, te.tsv,
/// clusters.tsv, retained_clusters.tsv and the trimmed graph under
/// out/trimmed.
void cmd_export(const TrimArtifacts& a, const std::filesystem::path& out);

void save_embeddings(const Matrix& embeddings, const std::filesystem::path& path);

}  // namespace cat
