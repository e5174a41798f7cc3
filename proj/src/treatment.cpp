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

#include "cat/treatment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "cat/error.hpp"
#include "cat/random.hpp"

namespace cat {
namespace {

using Pair = std::pair<NodeId, NodeId>;

std::size_t idx(NodeId v) { return static_cast<std::size_t>(v); }

// Non-self edges: ordered pairs for directed graphs, (min, max) pairs for undirected ones.
std::vector<Pair> graph_pairs(const Graph& g) {
  std::vector<Pair> pairs;
  for (const Edge& e : g.edges()) {
    if (e.is_self_loop()) continue;
    if (g.undirected() && e.src > e.dst) continue;
    pairs.emplace_back(e.src, e.dst);
  }
  return pairs;
}

Graph rebuild(const Graph& g, const std::vector<Pair>& pairs) {
  std::vector<Edge> edges;
  edges.reserve(2 * pairs.size() + g.num_self_loops());
  for (const Edge& e : g.edges()) {
    if (e.is_self_loop()) edges.push_back(e);
  }
  for (const auto& [s, d] : pairs) {
    edges.push_back({s, d});
    if (g.undirected()) edges.push_back({d, s});
  }
  return g.with_edges(std::move(edges), g.undirected());
}

std::int64_t quota(double keep_fraction, std::int64_t count) {
  // The epsilon absorbs representation error in products like 0.1 * 30.
  return static_cast<std::int64_t>(std::ceil(keep_fraction * static_cast<double>(count) - 1e-9));
}

std::vector<Pair> reduce_degree(const Graph& g, double keep_fraction, bool classwise, Rng& rng) {
  const auto n = idx(g.num_nodes());
  const auto c = idx(g.num_classes());
  // Budget per (node, class) for t1; the per-node totals serve t2.
  std::vector<std::int64_t> budget(n * c, 0);
  std::vector<std::int64_t> total(n, 0);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const LndProfile p = lnd_profile(g, v);
    for (std::size_t k = 0; k < c; ++k) {
      budget[idx(v) * c + k] = quota(keep_fraction, p.classwise[k]);
      total[idx(v)] += budget[idx(v) * c + k];
    }
  }
  auto slot = [&](NodeId center, NodeId neighbor) -> std::int64_t& {
    return classwise ? budget[idx(center) * c + idx(g.label(neighbor))] : total[idx(center)];
  };

  std::vector<Pair> pairs = graph_pairs(g);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  std::vector<Pair> kept;
  for (const auto& [s, d] : pairs) {
    if (g.undirected()) {
      if (slot(d, s) > 0 && slot(s, d) > 0) {
        --slot(d, s);
        --slot(s, d);
        kept.emplace_back(s, d);
      }
    } else if (slot(d, s) > 0) {
      --slot(d, s);
      kept.emplace_back(s, d);
    }
  }
  return kept;
}

// Directed graphs: each in-neighbor of a node is swapped for a random
// same-class node that is not yet an in-neighbor.
std::vector<Pair> replace_directed(const Graph& g, Rng& rng, std::size_t& warnings) {
  std::vector<std::vector<NodeId>> members(idx(g.num_classes()));
  for (NodeId v = 0; v < g.num_nodes(); ++v) members[idx(g.label(v))].push_back(v);

  std::vector<Pair> out;
  for (NodeId d = 0; d < g.num_nodes(); ++d) {
    auto nbrs = g.in_neighbors(d);
    std::set<NodeId> current(nbrs.begin(), nbrs.end());
    std::vector<NodeId> order(nbrs.begin(), nbrs.end());
    std::shuffle(order.begin(), order.end(), rng);
    for (NodeId s : order) {
      const auto& pool = members[idx(g.label(s))];
      std::vector<NodeId> candidates;
      for (NodeId u : pool) {
        if (u != d && !current.contains(u)) candidates.push_back(u);
      }
      if (candidates.empty()) {
        ++warnings;
        out.emplace_back(s, d);
        continue;
      }
      std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
      const NodeId r = candidates[pick(rng)];
      current.erase(s);
      current.insert(r);
      out.emplace_back(r, d);
    }
  }
  return out;
}

// Undirected graphs: (a,b),(c,d) -> (a,d),(c,b) with label(a)=label(c) and
// label(b)=label(d). Every endpoint swaps one neighbor for another of the
// same class, so all profiles are preserved exactly.
std::vector<Pair> replace_undirected(const Graph& g, Rng& rng, std::size_t& warnings) {
  constexpr int kAttempts = 32;
  std::vector<Pair> pairs = graph_pairs(g);
  std::set<Pair> present;
  auto key = [](NodeId u, NodeId v) { return u < v ? Pair{u, v} : Pair{v, u}; };
  for (const auto& [u, v] : pairs) present.insert(key(u, v));

  auto type = [&](const Pair& p) {
    const Label x = g.label(p.first);
    const Label y = g.label(p.second);
    return std::minmax(x, y);
  };
  std::map<std::pair<Label, Label>, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < pairs.size(); ++i) buckets[type(pairs[i])].push_back(i);

  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);

  for (std::size_t i : order) {
    const auto& bucket = buckets[type(pairs[i])];
    std::uniform_int_distribution<std::size_t> pick(0, bucket.size() - 1);
    bool swapped = false;
    for (int attempt = 0; attempt < kAttempts && !swapped; ++attempt) {
      const std::size_t j = bucket[pick(rng)];
      if (j == i) continue;
      auto [a, b] = pairs[i];
      auto [c, d] = pairs[j];
      if (std::bernoulli_distribution(0.5)(rng)) std::swap(c, d);
      if (g.label(a) != g.label(c) || g.label(b) != g.label(d)) std::swap(c, d);
      if (g.label(a) != g.label(c) || g.label(b) != g.label(d)) continue;
      if (a == d || c == b || b == d || a == c) continue;
      if (present.contains(key(a, d)) || present.contains(key(c, b))) continue;
      present.erase(key(a, b));
      present.erase(key(c, d));
      present.insert(key(a, d));
      present.insert(key(c, b));
      pairs[i] = {a, d};
      pairs[j] = {c, b};
      swapped = true;
    }
    if (!swapped) ++warnings;
  }
  return pairs;
}

}  // namespace

std::string_view to_string(Treatment t) {
  switch (t) {
    case Treatment::kT0: return "t0";
    case Treatment::kT1: return "t1";
    case Treatment::kT2: return "t2";
    case Treatment::kT3: return "t3";
  }
  return "?";
}

Treatment parse_treatment(std::string_view name) {
  if (name == "t0") return Treatment::kT0;
  if (name == "t1") return Treatment::kT1;
  if (name == "t2") return Treatment::kT2;
  if (name == "t3") return Treatment::kT3;
  fail(ErrorKind::kInvalidArgument, "unknown treatment '" + std::string(name) + "'");
}

TreatmentResult apply_treatment(const Graph& g, Treatment t, double keep_fraction,
                                std::uint64_t seed) {
  if (!g.all_labels_known()) fail(ErrorKind::kInvalidArgument, "treatments need every label");
  if ((t == Treatment::kT1 || t == Treatment::kT2) &&
      !(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
    fail(ErrorKind::kInvalidArgument, "keep_fraction must lie in (0, 1]");
  }
  Rng rng = make_rng(seed);
  TreatmentResult result;
  switch (t) {
    case Treatment::kT0:
      result.graph = g;
      break;
    case Treatment::kT1:
      result.graph = rebuild(g, reduce_degree(g, keep_fraction, /*classwise=*/true, rng));
      break;
    case Treatment::kT2:
      result.graph = rebuild(g, reduce_degree(g, keep_fraction, /*classwise=*/false, rng));
      break;
    case Treatment::kT3:
      result.graph = rebuild(g, g.undirected() ? replace_undirected(g, rng, result.warnings)
                                               : replace_directed(g, rng, result.warnings));
      break;
  }
  return result;
}

}  // namespace cat
