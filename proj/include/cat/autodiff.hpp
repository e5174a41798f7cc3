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

// Minimal reverse-mode automatic differentiation over dense double matrices.
//
// A Tape records every primitive in execution order; Tape::backward walks it
// in reverse and accumulates gradients into every node that requires them.
// Graph-structured primitives work on an edge list (COO): per-edge rows are
// grouped by a destination index, so no N x N matrix is ever formed.

#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "cat/random.hpp"

namespace cat::ad {

using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;
using IndexList = std::vector<Index>;
using SharedIndex = std::shared_ptr<const IndexList>;
using SparseMatrix = Eigen::SparseMatrix<double>;
using SharedSparse = std::shared_ptr<const SparseMatrix>;

inline SharedIndex share(IndexList idx) {
  return std::make_shared<const IndexList>(std::move(idx));
}

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  Index rows() const { return value().rows(); }
  Index cols() const { return value().cols(); }
  bool requires_grad() const;
  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  /// Receives the gradient flowing into the node's output.
  using BackwardFn = std::function<void(Tape&, const Matrix& grad_out)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  Var parameter(Matrix value);

  /// Appends a node computed from `inputs`. The node requires a gradient when
  /// any input does; `backward` is dropped otherwise.
  Var record(Matrix value, std::initializer_list<Var> inputs, BackwardFn backward);
  Var record(Matrix value, std::span<const Var> inputs, BackwardFn backward);

  /// Seeds d(loss)/d(loss) = 1 and propagates. loss must be 1 x 1.
  void backward(Var loss);

  void accumulate(Var v, const Matrix& grad);

  const Matrix& value(Var v) const { return nodes_[v.id_].value; }
  bool requires_grad(Var v) const { return nodes_[v.id_].requires_grad; }
  /// Gradient of v; zeros of v's shape when nothing flowed into it.
  Matrix grad(Var v) const;
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    bool is_leaf = false;
    BackwardFn backward;
  };

  void check_owned(Var v) const;

  std::deque<Node> nodes_;
};

// Primitives. Shape mismatches throw cat::Error(kShapeMismatch) naming both shapes.

Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
/// a (n x d) plus row vector b (1 x d) broadcast over rows.
Var add_row(Var a, Var b);
Var leaky_relu(Var a, double slope);
Var elu(Var a, double alpha = 1.0);
Var relu(Var a);
Var concat_cols(std::span<const Var> parts);
Var slice_cols(Var a, Index start, Index count);
Var slice_rows(Var a, Index start, Index count);
Var gather_rows(Var a, SharedIndex rows);
/// Sum of all entries, 1 x 1.
Var sum(Var a);
/// Mean of equally shaped values.
Var mean_of(std::span<const Var> parts);

/// Softmax of per-edge scalars (E x 1) over edges sharing a segment id.
/// Stabilized by subtracting each segment's max. Every segment in
/// [0, num_segments) must be non-empty (kEmptySegment otherwise).
Var segment_softmax(Var scores, SharedIndex segment, Index num_segments);

/// out[segment[e]] += weight[e] * values[e]; values is E x d, weight E x 1.
Var segment_weighted_sum(Var values, Var weight, SharedIndex segment, Index num_segments);

Var log_softmax_rows(Var a);

/// Mean negative log-likelihood of log-probabilities over the given rows.
Var nll_loss(Var log_probs, std::span<const std::int32_t> labels, std::span<const Index> rows);

/// Inverted dropout: kept entries are scaled by 1 / (1 - p). p == 0 returns a.
/// Entries of a constant input that are already zero consume no draws.
Var dropout(Var a, double p, Rng& rng);

// Constant sparse left operands (bag-of-words features).

SharedSparse to_sparse(const Matrix& a);
/// True when a is large and mostly zeros.
bool prefer_sparse(const Matrix& a);
/// Same draws, in the same order, as dropout() on the dense constant.
SharedSparse dropout(const SharedSparse& a, double p, Rng& rng);
/// a * b with a constant.
Var spmm(SharedSparse a, Var b);

// Initialization and optimizer.

/// Uniform in +-sqrt(6 / (rows + cols)), drawn row-major.
Matrix glorot_uniform(Index rows, Index cols, Rng& rng);

struct AdamOptions {
  double lr = 1e-3;
  /// Classical L2: weight_decay * param is added to the gradient.
  double weight_decay = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam over a fixed, ordered set of parameter matrices.
class Adam {
 public:
  explicit Adam(AdamOptions options) : options_(options) {}

  /// grads[i] is the gradient of *params[i]. The set and its order must stay
  /// the same across calls.
  void step(std::span<Matrix* const> params, std::span<const Matrix> grads);
  long long steps() const { return t_; }

 private:
  AdamOptions options_;
  long long t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

// Finite-difference verification.

struct GradCheckResult {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  Matrix analytic;
  Matrix numeric;
};

/// Relative error floor: |a - n| / max(|a|, |n|, kGradCheckFloor).
inline constexpr double kGradCheckFloor = 1e-6;

double relative_error(double analytic, double numeric);

/// Compares the tape gradient of f at x with central differences of the
/// given step, entry by entry. f builds a scalar on a fresh tape from x.
GradCheckResult grad_check(const std::function<Var(Tape&, Var)>& f, const Matrix& x,
                           double step = 1e-4);

}  // namespace cat::ad
