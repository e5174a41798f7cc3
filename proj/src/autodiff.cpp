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

#include "cat/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SparseCore>

#include "cat/error.hpp"

namespace cat::ad {
namespace {


std::string shape(const Matrix& m) {
  return "(" + std::to_string(m.rows()) + " x " + std::to_string(m.cols()) + ")";
}

[[noreturn]] void shape_error(const char* op, const Matrix& a, const Matrix& b) {
  fail(ErrorKind::kShapeMismatch, std::string(op) + ": incompatible shapes " + shape(a) + " and " +
                                      shape(b));
}

void require_same_shape(const char* op, const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) shape_error(op, a, b);
}

// 53 uniform bits per draw.
double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

const Matrix& Var::value() const { return tape_->value(*this); }
bool Var::requires_grad() const { return tape_->requires_grad(*this); }

void Tape::check_owned(Var v) const {
  if (v.tape_ != this || v.id_ >= nodes_.size()) {
    fail(ErrorKind::kInvalidArgument, "variable does not belong to this tape");
  }
}

Var Tape::constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), Matrix(), false, true, nullptr});
  return Var(this, nodes_.size() - 1);
}

Var Tape::parameter(Matrix value) {
  nodes_.push_back(Node{std::move(value), Matrix(), true, true, nullptr});
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Matrix value, std::initializer_list<Var> inputs, BackwardFn backward) {
  return record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                std::move(backward));
}

Var Tape::record(Matrix value, std::span<const Var> inputs, BackwardFn backward) {
  bool needs = false;
  for (Var in : inputs) {
    check_owned(in);
    needs = needs || nodes_[in.id_].requires_grad;
  }
  nodes_.push_back(Node{std::move(value), Matrix(), needs, false,
                        needs ? std::move(backward) : BackwardFn()});
  return Var(this, nodes_.size() - 1);
}

void Tape::accumulate(Var v, const Matrix& grad) {
  Node& node = nodes_[v.id_];
  if (!node.requires_grad) return;
  if (node.grad.size() == 0) {
    node.grad = grad;
  } else {
    node.grad += grad;
  }
}

Matrix Tape::grad(Var v) const {
  check_owned(v);
  const Node& node = nodes_[v.id_];
  if (node.grad.size() == 0) return Matrix::Zero(node.value.rows(), node.value.cols());
  return node.grad;
}

void Tape::backward(Var loss) {
  check_owned(loss);
  const Matrix& out = nodes_[loss.id_].value;
  if (out.rows() != 1 || out.cols() != 1) {
    fail(ErrorKind::kShapeMismatch, "backward needs a scalar (1 x 1) loss, got " + shape(out));
  }
  for (Node& node : nodes_) node.grad.resize(0, 0);
  nodes_[loss.id_].grad = Matrix::Ones(1, 1);
  for (std::size_t i = loss.id_ + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (node.grad.size() == 0) continue;
    if (node.is_leaf) {
      if (!node.grad.allFinite()) {
        fail(ErrorKind::kNumerical, "non-finite gradient reached tape entry " + std::to_string(i));
      }
      continue;
    }
    if (node.backward) node.backward(*this, node.grad);
  }
}

Var matmul(Var a, Var b) {
  Tape& t = *a.tape();
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.cols() != bv.rows()) shape_error("matmul", av, bv);

  if (!a.requires_grad() && prefer_sparse(av)) {
    return spmm(to_sparse(av), b);
  }
  Matrix out = av * bv;
  return t.record(std::move(out), {a, b}, [a, b](Tape& tape, const Matrix& g) {
    if (a.requires_grad()) tape.accumulate(a, g * b.value().transpose());
    if (b.requires_grad()) tape.accumulate(b, a.value().transpose() * g);
  });
}

bool prefer_sparse(const Matrix& a) {
  constexpr Index kMinEntries = 1 << 14;
  if (a.size() < kMinEntries) return false;
  const Index nonzeros = (a.array() != 0.0).count();
  return nonzeros * 4 < a.size();
}

SharedSparse to_sparse(const Matrix& a) {
  auto s = std::make_shared<SparseMatrix>(a.rows(), a.cols());
  s->reserve((a.array() != 0.0).count());
  for (Index j = 0; j < a.cols(); ++j) {
    s->startVec(j);
    for (Index i = 0; i < a.rows(); ++i) {
      if (a(i, j) != 0.0) s->insertBack(i, j) = a(i, j);
    }
  }
  s->finalize();
  return s;
}

SharedSparse dropout(const SharedSparse& a, double p, Rng& rng) {
  if (p < 0.0 || p >= 1.0) fail(ErrorKind::kInvalidArgument, "dropout probability must lie in [0, 1)");
  if (p == 0.0) return a;
  const double keep = 1.0 - p;
  const double factor = 1.0 / keep;
  auto out = std::make_shared<SparseMatrix>(*a);
  double* values = out->valuePtr();
  for (Index k = 0; k < out->nonZeros(); ++k) values[k] *= uniform01(rng) < keep ? factor : 0.0;
  return out;
}

Var spmm(SharedSparse a, Var b) {
  const Matrix& bv = b.value();
  if (a->cols() != bv.rows()) {
    fail(ErrorKind::kShapeMismatch, "matmul: incompatible shapes (" + std::to_string(a->rows()) +
                                        " x " + std::to_string(a->cols()) + ") and " + shape(bv));
  }
  Matrix out = *a * bv;
  return b.tape()->record(std::move(out), {b}, [a, b](Tape& tape, const Matrix& g) {
    tape.accumulate(b, Matrix(a->transpose() * g));
  });
}

Var add(Var a, Var b) {
  require_same_shape("add", a.value(), b.value());
  return a.tape()->record(a.value() + b.value(), {a, b}, [a, b](Tape& tape, const Matrix& g) {
    tape.accumulate(a, g);
    tape.accumulate(b, g);
  });
}

Var sub(Var a, Var b) {
  require_same_shape("sub", a.value(), b.value());
  return a.tape()->record(a.value() - b.value(), {a, b}, [a, b](Tape& tape, const Matrix& g) {
    tape.accumulate(a, g);
    if (b.requires_grad()) tape.accumulate(b, -g);
  });
}

Var mul(Var a, Var b) {
  require_same_shape("mul", a.value(), b.value());
  Matrix out = a.value().cwiseProduct(b.value());
  return a.tape()->record(std::move(out), {a, b}, [a, b](Tape& tape, const Matrix& g) {
    if (a.requires_grad()) tape.accumulate(a, g.cwiseProduct(b.value()));
    if (b.requires_grad()) tape.accumulate(b, g.cwiseProduct(a.value()));
  });
}

Var scale(Var a, double factor) {
  return a.tape()->record(a.value() * factor, {a}, [a, factor](Tape& tape, const Matrix& g) {
    tape.accumulate(a, g * factor);
  });
}

Var add_row(Var a, Var b) {
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (bv.rows() != 1 || bv.cols() != av.cols()) shape_error("add_row", av, bv);
  Matrix out = av.rowwise() + bv.row(0);
  return a.tape()->record(std::move(out), {a, b}, [a, b](Tape& tape, const Matrix& g) {
    tape.accumulate(a, g);
    if (b.requires_grad()) tape.accumulate(b, g.colwise().sum());
  });
}

Var leaky_relu(Var a, double slope) {
  Matrix out = a.value().unaryExpr([slope](double x) { return x > 0.0 ? x : slope * x; });
  return a.tape()->record(std::move(out), {a}, [a, slope](Tape& tape, const Matrix& g) {
    Matrix d = a.value().unaryExpr([slope](double x) { return x > 0.0 ? 1.0 : slope; });
    tape.accumulate(a, g.cwiseProduct(d));
  });
}

Var elu(Var a, double alpha) {
  Matrix out = a.value().unaryExpr([alpha](double x) { return x > 0.0 ? x : alpha * std::expm1(x); });
  return a.tape()->record(std::move(out), {a}, [a, alpha](Tape& tape, const Matrix& g) {
    Matrix d = a.value().unaryExpr([alpha](double x) { return x > 0.0 ? 1.0 : alpha * std::exp(x); });
    tape.accumulate(a, g.cwiseProduct(d));
  });
}

Var relu(Var a) {
  Matrix out = a.value().cwiseMax(0.0);
  return a.tape()->record(std::move(out), {a}, [a](Tape& tape, const Matrix& g) {
    Matrix d = (a.value().array() > 0.0).cast<double>().matrix();
    tape.accumulate(a, g.cwiseProduct(d));
  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) fail(ErrorKind::kInvalidArgument, "concat_cols needs at least one input");
  const Index rows = parts[0].rows();
  Index cols = 0;
  for (Var p : parts) {
    if (p.rows() != rows) shape_error("concat_cols", parts[0].value(), p.value());
    cols += p.cols();
  }
  Matrix out(rows, cols);
  Index at = 0;
  for (Var p : parts) {
    out.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return parts[0].tape()->record(std::move(out), parts, [inputs](Tape& tape, const Matrix& g) {
    Index offset = 0;
    for (Var p : inputs) {
      if (p.requires_grad()) tape.accumulate(p, g.middleCols(offset, p.cols()));
      offset += p.cols();
    }
  });
}

Var slice_cols(Var a, Index start, Index count) {
  const Matrix& av = a.value();
  if (start < 0 || count < 0 || start + count > av.cols()) {
    fail(ErrorKind::kShapeMismatch, "slice_cols [" + std::to_string(start) + ", " +
                                        std::to_string(start + count) + ") outside " + shape(av));
  }
  return a.tape()->record(av.middleCols(start, count), {a},
                          [a, start, count](Tape& tape, const Matrix& g) {
                            Matrix full = Matrix::Zero(a.rows(), a.cols());
                            full.middleCols(start, count) = g;
                            tape.accumulate(a, full);
                          });
}

Var slice_rows(Var a, Index start, Index count) {
  const Matrix& av = a.value();
  if (start < 0 || count < 0 || start + count > av.rows()) {
    fail(ErrorKind::kShapeMismatch, "slice_rows [" + std::to_string(start) + ", " +
                                        std::to_string(start + count) + ") outside " + shape(av));
  }
  return a.tape()->record(av.middleRows(start, count), {a},
                          [a, start, count](Tape& tape, const Matrix& g) {
                            Matrix full = Matrix::Zero(a.rows(), a.cols());
                            full.middleRows(start, count) = g;
                            tape.accumulate(a, full);
                          });
}

Var gather_rows(Var a, SharedIndex rows) {
  const Matrix& av = a.value();
  Matrix out(static_cast<Index>(rows->size()), av.cols());
  for (std::size_t e = 0; e < rows->size(); ++e) {
    const Index r = (*rows)[e];
    if (r < 0 || r >= av.rows()) {
      fail(ErrorKind::kShapeMismatch, "gather_rows: row " + std::to_string(r) + " outside " + shape(av));
    }
    out.row(static_cast<Index>(e)) = av.row(r);
  }
  return a.tape()->record(std::move(out), {a}, [a, rows](Tape& tape, const Matrix& g) {
    Matrix full = Matrix::Zero(a.rows(), a.cols());
    for (std::size_t e = 0; e < rows->size(); ++e) full.row((*rows)[e]) += g.row(static_cast<Index>(e));
    tape.accumulate(a, full);
  });
}

Var sum(Var a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return a.tape()->record(std::move(out), {a}, [a](Tape& tape, const Matrix& g) {
    tape.accumulate(a, Matrix::Constant(a.rows(), a.cols(), g(0, 0)));
  });
}

Var mean_of(std::span<const Var> parts) {
  if (parts.empty()) fail(ErrorKind::kInvalidArgument, "mean_of needs at least one input");
  if (parts.size() == 1) return parts[0];
  Var acc = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) acc = add(acc, parts[i]);
  return scale(acc, 1.0 / static_cast<double>(parts.size()));
}

Var segment_softmax(Var scores, SharedIndex segment, Index num_segments) {
  const Matrix& s = scores.value();
  if (s.cols() != 1 || s.rows() != static_cast<Index>(segment->size())) {
    fail(ErrorKind::kShapeMismatch, "segment_softmax: scores " + shape(s) + " vs " +
                                        std::to_string(segment->size()) + " segment ids");
  }
  const auto n = static_cast<std::size_t>(num_segments);
  std::vector<double> max(n, -std::numeric_limits<double>::infinity());
  std::vector<double> total(n, 0.0);
  for (std::size_t e = 0; e < segment->size(); ++e) {
    const Index k = (*segment)[e];
    if (k < 0 || k >= num_segments) {
      fail(ErrorKind::kShapeMismatch, "segment_softmax: segment id " + std::to_string(k) +
                                          " outside [0, " + std::to_string(num_segments) + ")");
    }
    max[static_cast<std::size_t>(k)] = std::max(max[static_cast<std::size_t>(k)], s(static_cast<Index>(e), 0));
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (max[k] == -std::numeric_limits<double>::infinity()) {
      fail(ErrorKind::kEmptySegment, "segment_softmax: node " + std::to_string(k) + " has no incoming edge");
    }
  }
  Matrix out(s.rows(), 1);
  for (std::size_t e = 0; e < segment->size(); ++e) {
    const auto k = static_cast<std::size_t>((*segment)[e]);
    out(static_cast<Index>(e), 0) = std::exp(s(static_cast<Index>(e), 0) - max[k]);
    total[k] += out(static_cast<Index>(e), 0);
  }
  for (std::size_t e = 0; e < segment->size(); ++e) {
    out(static_cast<Index>(e), 0) /= total[static_cast<std::size_t>((*segment)[e])];
  }
  auto y = std::make_shared<const Matrix>(out);
  return scores.tape()->record(std::move(out), {scores},
                               [scores, segment, num_segments, y](Tape& tape, const Matrix& g) {
    std::vector<double> dot(static_cast<std::size_t>(num_segments), 0.0);
    for (std::size_t e = 0; e < segment->size(); ++e) {
      dot[static_cast<std::size_t>((*segment)[e])] += g(static_cast<Index>(e), 0) * (*y)(static_cast<Index>(e), 0);
    }
    Matrix d(y->rows(), 1);
    for (std::size_t e = 0; e < segment->size(); ++e) {
      const auto i = static_cast<Index>(e);
      d(i, 0) = (*y)(i, 0) * (g(i, 0) - dot[static_cast<std::size_t>((*segment)[e])]);
    }
    tape.accumulate(scores, d);
  });
}

Var segment_weighted_sum(Var values, Var weight, SharedIndex segment, Index num_segments) {
  const Matrix& v = values.value();
  const Matrix& w = weight.value();
  const auto edges = static_cast<Index>(segment->size());
  if (v.rows() != edges || w.rows() != edges || w.cols() != 1) {
    fail(ErrorKind::kShapeMismatch, "segment_weighted_sum: values " + shape(v) + ", weights " +
                                        shape(w) + ", " + std::to_string(edges) + " segment ids");
  }
  Matrix out = Matrix::Zero(num_segments, v.cols());
  for (Index e = 0; e < edges; ++e) {
    const Index k = (*segment)[static_cast<std::size_t>(e)];
    if (k < 0 || k >= num_segments) {
      fail(ErrorKind::kShapeMismatch, "segment_weighted_sum: segment id " + std::to_string(k) +
                                          " outside [0, " + std::to_string(num_segments) + ")");
    }
    out.row(k) += w(e, 0) * v.row(e);
  }
  return values.tape()->record(std::move(out), {values, weight},
                               [values, weight, segment](Tape& tape, const Matrix& g) {
    const Matrix& v = values.value();
    const Matrix& w = weight.value();
    const Index edges = v.rows();
    if (values.requires_grad()) {
      Matrix dv(edges, v.cols());
      for (Index e = 0; e < edges; ++e) dv.row(e) = w(e, 0) * g.row((*segment)[static_cast<std::size_t>(e)]);
      tape.accumulate(values, dv);
    }
    if (weight.requires_grad()) {
      Matrix dw(edges, 1);
      for (Index e = 0; e < edges; ++e) dw(e, 0) = v.row(e).dot(g.row((*segment)[static_cast<std::size_t>(e)]));
      tape.accumulate(weight, dw);
    }
  });
}

Var log_softmax_rows(Var a) {
  const Matrix& x = a.value();
  Matrix out(x.rows(), x.cols());
  for (Index i = 0; i < x.rows(); ++i) {
    const double m = x.row(i).maxCoeff();
    const double lse = m + std::log((x.row(i).array() - m).exp().sum());
    out.row(i) = x.row(i).array() - lse;
  }
  auto y = std::make_shared<const Matrix>(out);
  return a.tape()->record(std::move(out), {a}, [a, y](Tape& tape, const Matrix& g) {
    const Matrix p = y->array().exp().matrix();
    Matrix d = g - (p.array().colwise() * g.rowwise().sum().array()).matrix();
    tape.accumulate(a, d);
  });
}

Var nll_loss(Var log_probs, std::span<const std::int32_t> labels, std::span<const Index> rows) {
  const Matrix& lp = log_probs.value();
  if (rows.empty()) fail(ErrorKind::kInvalidArgument, "nll_loss over an empty index set");
  if (static_cast<Index>(labels.size()) != lp.rows()) {
    fail(ErrorKind::kShapeMismatch, "nll_loss: " + std::to_string(labels.size()) +
                                        " labels for log-probabilities " + shape(lp));
  }
  std::vector<std::pair<Index, Index>> picks;
  picks.reserve(rows.size());
  double total = 0.0;
  for (Index r : rows) {
    const std::int32_t y = labels[static_cast<std::size_t>(r)];
    if (y < 0 || y >= lp.cols()) {
      fail(ErrorKind::kInvalidArgument, "nll_loss: row " + std::to_string(r) + " has no valid label");
    }
    picks.emplace_back(r, y);
    total -= lp(r, y);
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  Matrix out(1, 1);
  out(0, 0) = total * inv;
  return log_probs.tape()->record(std::move(out), {log_probs},
                                  [log_probs, picks, inv](Tape& tape, const Matrix& g) {
    Matrix d = Matrix::Zero(log_probs.rows(), log_probs.cols());
    for (const auto& [r, y] : picks) d(r, y) -= g(0, 0) * inv;
    tape.accumulate(log_probs, d);
  });
}

Var dropout(Var a, double p, Rng& rng) {
  if (p < 0.0 || p >= 1.0) fail(ErrorKind::kInvalidArgument, "dropout probability must lie in [0, 1)");
  if (p == 0.0) return a;
  const double keep = 1.0 - p;
  const double factor = 1.0 / keep;
  const Matrix& av = a.value();
  auto mask = std::make_shared<Matrix>(av.rows(), av.cols());
  // Without a gradient, entries that are already zero cannot change the
  // result, so they consume no draws.
  const bool sparse_ok = !a.requires_grad();
  for (Index j = 0; j < mask->cols(); ++j) {
    for (Index i = 0; i < mask->rows(); ++i) {
      if (sparse_ok && av(i, j) == 0.0) {
        (*mask)(i, j) = 0.0;
      } else {
        (*mask)(i, j) = uniform01(rng) < keep ? factor : 0.0;
      }
    }
  }
  Matrix out = a.value().cwiseProduct(*mask);
  return a.tape()->record(std::move(out), {a}, [a, mask](Tape& tape, const Matrix& g) {
    tape.accumulate(a, g.cwiseProduct(*mask));
  });
}

Matrix glorot_uniform(Index rows, Index cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> u(-limit, limit);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = u(rng);
  }
  return m;
}

void Adam::step(std::span<Matrix* const> params, std::span<const Matrix> grads) {
  if (params.size() != grads.size()) {
    fail(ErrorKind::kShapeMismatch, "adam: " + std::to_string(params.size()) + " parameters but " +
                                        std::to_string(grads.size()) + " gradients");
  }
  if (m_.empty()) {
    for (Matrix* p : params) {
      m_.push_back(Matrix::Zero(p->rows(), p->cols()));
      v_.push_back(Matrix::Zero(p->rows(), p->cols()));
    }
  } else if (m_.size() != params.size()) {
    fail(ErrorKind::kInvalidArgument, "adam: parameter set changed between steps");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& p = *params[i];
    require_same_shape("adam", p, grads[i]);
    const Matrix g = grads[i] + options_.weight_decay * p;
    m_[i] = options_.beta1 * m_[i] + (1.0 - options_.beta1) * g;
    v_[i] = options_.beta2 * v_[i] + (1.0 - options_.beta2) * g.cwiseProduct(g);
    p.array() -= options_.lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + options_.eps);
  }
}

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), kGradCheckFloor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckResult grad_check(const std::function<Var(Tape&, Var)>& f, const Matrix& x, double step) {
  GradCheckResult result;
  {
    Tape tape;
    Var xv = tape.parameter(x);
    Var y = f(tape, xv);
    tape.backward(y);
    result.analytic = tape.grad(xv);
  }
  auto eval = [&](const Matrix& at) {
    Tape tape;
    Var xv = tape.constant(at);
    return f(tape, xv).value()(0, 0);
  };
  result.numeric = Matrix::Zero(x.rows(), x.cols());
  Matrix probe = x;
  for (Index j = 0; j < x.cols(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) {
      const double orig = probe(i, j);
      probe(i, j) = orig + step;
      const double up = eval(probe);
      probe(i, j) = orig - step;
      const double down = eval(probe);
      probe(i, j) = orig;
      const double n = (up - down) / (2.0 * step);
      result.numeric(i, j) = n;
      const double a = result.analytic(i, j);
      result.max_abs_error = std::max(result.max_abs_error, std::abs(a - n));
      result.max_rel_error = std::max(result.max_rel_error, relative_error(a, n));
    }
  }
  return result;
}

}  // namespace cat::ad
