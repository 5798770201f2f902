// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

// Eager reverse-mode differentiation over the Matrix operator catalog.
//
// Every operation on a Var computes its value immediately and appends a node
// to the owning Tape. Nodes are stored in creation order, so parents always
// precede children and backward() is a single reverse sweep. A Tape belongs
// to one thread for its whole life.

#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "emma/matrix.hpp"

namespace emma {

class Tape;

/// Handle to one node on a Tape. Cheap to copy; valid while the Tape lives.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  std::size_t id() const noexcept { return id_; }
  Tape* tape() const noexcept { return tape_; }
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

enum class OpKind : std::uint8_t {
  kLeaf,
  kConstant,
  kAdd,
  kSub,
  kHadamard,
  kMatMul,
  kOuter,
  kTranspose,
  kCumProd,
  kCumSum,
  kTriu,
  kRoll,
  kFlip,
  kSigmoid,
  kTanh,
  kExp,
  kLog,
  kReciprocal,
  kSoftmaxRows,
  kAddScalar,
  kMulScalar,
  kOneMinus,
  kSum,
  kSelectRow,
  kStackRows,
};

/// Non-tensor arguments of an operation (axis, triangle offset, roll shift,
/// scalar operand, row index). Unused fields keep their defaults.
struct OpParams {
  Axis axis = Axis::kAlongRow;
  long offset = 0;
  double scalar = 0.0;
  std::size_t index = 0;
};

struct TapeNode {
  OpKind kind = OpKind::kLeaf;
  std::vector<std::size_t> parents;
  OpParams params;
  Matrix value;
};

/// Adjoints produced by Tape::backward, indexed by Var.
class Gradients {
 public:
  /// d(output)/d(v). Nodes the output does not depend on have zero adjoints.
  const Matrix& operator[](const Var& v) const;

 private:
  friend class Tape;
  const Tape* tape_ = nullptr;
  std::vector<Matrix> adjoints_;
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// A differentiable input.
  Var leaf(Matrix value);
  /// A non-differentiable input; it still receives an adjoint on request.
  Var constant(Matrix value);

  Var record(OpKind kind, std::vector<std::size_t> parents, OpParams params = {});

  std::size_t size() const noexcept { return nodes_.size(); }
  const TapeNode& node(std::size_t id) const { return nodes_.at(id); }
  const Matrix& value(const Var& v) const;

  /// Reverse sweep from a 1x1 output. Throws kArgument for a non-scalar
  /// output and kLookup for a Var recorded on another tape.
  Gradients backward(const Var& output) const;

  /// Recomputes every node from its leaves and constants.
  std::vector<Matrix> replay() const;

 private:
  void check_owned(const Var& v) const;

  // A deque keeps node values at stable addresses, so references returned by
  // Var::value() survive later recordings.
  std::deque<TapeNode> nodes_;
};

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var hadamard(const Var& a, const Var& b);
Var matmul(const Var& a, const Var& b);
Var outer(const Var& u, const Var& v);
Var transpose(const Var& a);
Var cumprod(const Var& a, Axis axis);
Var cumsum(const Var& a, Axis axis);
Var triu(const Var& a, long offset);
Var roll(const Var& a, long k);
Var flip(const Var& a);
Var sigmoid(const Var& a);
Var tanh(const Var& a);
Var exp(const Var& a);
Var log(const Var& a);
Var reciprocal(const Var& a);
Var softmax_rows(const Var& a);
Var add_scalar(const Var& a, double s);
Var mul_scalar(const Var& a, double s);
Var one_minus(const Var& a);
Var sum(const Var& a);
Var select_row(const Var& a, std::size_t r);
Var stack_rows(std::span<const Var> parts);

// Helpers that let one templated routine run on plain matrices or on a tape.
inline const Matrix& value_of(const Matrix& m) { return m; }
inline const Matrix& value_of(const Var& v) { return v.value(); }
inline Matrix lift(const Matrix&, Matrix m) { return m; }
inline Var lift(const Var& like, Matrix m) { return like.tape()->constant(std::move(m)); }

/// Central-difference gradient of f at theta.
using ScalarFunction = std::function<double(std::span<const double>)>;
std::vector<double> central_difference(const ScalarFunction& f, std::span<const double> theta,
                                       double h);

/// max_k |g_analytic[k] - g_central[k]| / max(1e-8, max_k |g_central[k]|).
/// Throws kArgument for h <= 0, kConformance for a size mismatch and
/// kNumericDomain if f is non-finite at any probe point.
double finite_diff_check(const ScalarFunction& f, std::span<const double> theta,
                         std::span<const double> analytic_gradient, double h);

}  // namespace emma
