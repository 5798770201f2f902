// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

// Monotonic alignment estimation, infinite-lookback weights and the
// alignment moments used for latency and variance regularization.
//
// Row i of every |y| x |x| matrix belongs to target step i, column j to
// source position j (both zero-based here; delays are reported one-based).
// The routines that appear in a training objective are templates over the
// value type so they run unchanged on Matrix and on tape Vars. The
// *_recursive functions are literal loop transcriptions kept as oracles.

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "emma/error.hpp"
#include "emma/matrix.hpp"
#include "emma/tape.hpp"

namespace emma {

/// Throws kDomain unless every entry lies in [0, 1].
void require_probabilities(const Matrix& p, const char* op);
/// Throws kDomain unless every entry is strictly positive.
void require_positive_energies(const Matrix& e, const char* op);

/// The alignment before the first target step: all mass on the first source
/// position.
Matrix initial_alignment(std::size_t source_len);

/// Literal dynamic program: alpha[i][j] = p[i][j] * sum_{k<=j} alpha[i-1][k]
/// * prod_{k<=l<j} (1 - p[i][l]). O(|y| |x|^2).
Matrix alignment_recursive(const Matrix& p);

/// Literal double sum: beta[i][j] = sum_{k>=j} alpha[i][k] e[i][j] / sum_{l<=k} e[i][l].
Matrix beta_recursive(const Matrix& alpha, const Matrix& e);

/// P_ext = triu_1(J_{|x| x 1} roll_1(p_row)); entry (m, n) = p[n-1] for n > m.
template <class M>
M extended_probability(const M& p_row) {
  const Matrix& row = value_of(p_row);
  require_probabilities(row, "extended_probability");
  if (row.rows() != 1 || row.cols() == 0) {
    fail(ErrorKind::kArgument,
         "extended_probability: expected a non-empty row, got " + shape_string(row));
  }
  const M column_of_ones = lift(p_row, ones(row.cols(), 1));
  return triu(outer(column_of_ones, roll(p_row, 1)), 1);
}

/// T = triu_0(cumprod_2(1 - P_ext)); T[m][n] = prod_{m<=l<n} (1 - p[l]) above
/// the diagonal, 1 on it, 0 below.
template <class M>
M transition_matrix(const M& p_row) {
  return triu(cumprod(one_minus(extended_probability(p_row)), Axis::kAlongRow), 0);
}

/// Closed-form, division-free alignment: alpha_i = p_i (.) (alpha_{i-1} T(i)).
template <class M>
M alignment_parallel(const M& p) {
  const Matrix& pv = value_of(p);
  require_probabilities(pv, "alignment_parallel");
  if (pv.rows() == 0 || pv.cols() == 0) {
    fail(ErrorKind::kArgument, "alignment_parallel: empty probability matrix");
  }
  std::vector<M> rows;
  rows.reserve(pv.rows());
  M previous = lift(p, initial_alignment(pv.cols()));
  for (std::size_t i = 0; i < pv.rows(); ++i) {
    const M p_row = select_row(p, i);
    previous = hadamard(p_row, matmul(previous, transition_matrix(p_row)));
    rows.push_back(previous);
  }
  return stack_rows(std::span<const M>(rows));
}

/// beta_i = e_i (.) flip(cumsum(flip(alpha_i (.) 1 / cumsum(e_i)))).
template <class M>
M beta_parallel(const M& alpha, const M& e) {
  const Matrix& ev = value_of(e);
  require_positive_energies(ev, "beta_parallel");
  const Matrix& av = value_of(alpha);
  if (av.rows() != ev.rows() || av.cols() != ev.cols()) {
    fail(ErrorKind::kConformance,
         "beta_parallel: shape mismatch " + shape_string(av) + " vs " + shape_string(ev));
  }
  const M inverse_prefix = reciprocal(cumsum(e, Axis::kAlongRow));
  const M weighted = hadamard(alpha, inverse_prefix);
  return hadamard(e, flip(cumsum(flip(weighted), Axis::kAlongRow)));
}

/// Optionally forces p[i][|x|-1] = 1 so that every alignment row has unit mass.
template <class M>
M force_last_column(const M& p) {
  const Matrix& pv = value_of(p);
  Matrix keep(pv.rows(), pv.cols(), 1.0);
  Matrix last(pv.rows(), pv.cols(), 0.0);
  for (std::size_t i = 0; i < pv.rows(); ++i) {
    keep(i, pv.cols() - 1) = 0.0;
    last(i, pv.cols() - 1) = 1.0;
  }
  return add(hadamard(p, lift(p, std::move(keep))), lift(p, std::move(last)));
}

/// One-based source positions (1, 2, ..., n) as an n x 1 column.
Matrix position_column(std::size_t source_len);

/// Expected delay per target step: d_i = sum_k k alpha[i][k]; |y| x 1.
template <class M>
M expected_delays(const M& alpha) {
  return matmul(alpha, lift(alpha, position_column(value_of(alpha).cols())));
}

/// Alignment variance per target step: sum_k k^2 alpha - (sum_k k alpha)^2; |y| x 1.
template <class M>
M alignment_variance(const M& alpha) {
  const Matrix positions = position_column(value_of(alpha).cols());
  const M first = matmul(alpha, lift(alpha, positions));
  const M second = matmul(alpha, lift(alpha, hadamard(positions, positions)));
  return sub(second, hadamard(first, first));
}

/// How expected delays are turned into a latency loss.
enum class LatencyCost {
  /// Mean lag behind the ideal policy d*_i = (i-1) |x| / |y|.
  kLagBehindIdeal,
  /// Plain mean of the expected delays.
  kMeanDelay,
};

/// Ideal delays (i-1) |x| / |y| for i = 1..|y| as a column.
Matrix ideal_delays(std::size_t source_len, std::size_t target_len);

template <class M>
M latency_loss(const M& delays, std::size_t source_len, std::size_t target_len,
               LatencyCost cost = LatencyCost::kLagBehindIdeal) {
  const Matrix& dv = value_of(delays);
  if (target_len == 0) fail(ErrorKind::kArgument, "latency_loss: zero target length");
  if (dv.size() != target_len) {
    fail(ErrorKind::kConformance, "latency_loss: " + std::to_string(dv.size()) +
                                      " delays for target length " + std::to_string(target_len));
  }
  const double scale = 1.0 / static_cast<double>(target_len);
  if (cost == LatencyCost::kMeanDelay) return mul_scalar(sum(delays), scale);
  const M ideal = lift(delays, ideal_delays(source_len, target_len));
  return mul_scalar(sum(sub(delays, ideal)), scale);
}

template <class M>
M variance_loss(const M& variances) {
  const Matrix& vv = value_of(variances);
  if (vv.size() == 0) fail(ErrorKind::kArgument, "variance_loss: empty variance vector");
  return mul_scalar(sum(variances), 1.0 / static_cast<double>(vv.size()));
}

/// Head output: the lookback weights applied to the value rows, beta V.
template <class M>
M attention_output(const M& beta, const M& values) {
  return matmul(beta, values);
}

}  // namespace emma
