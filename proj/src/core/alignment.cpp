// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "emma/alignment.hpp"

#include <string>

namespace emma {

void require_probabilities(const Matrix& p, const char* op) {
  for (double v : p.data()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      fail(ErrorKind::kDomain,
           std::string(op) + ": probability " + std::to_string(v) + " outside [0, 1]");
    }
  }
}

void require_positive_energies(const Matrix& e, const char* op) {
  for (double v : e.data()) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      fail(ErrorKind::kDomain, std::string(op) + ": energy " + std::to_string(v) +
                                   " is not strictly positive and finite");
    }
  }
}

Matrix initial_alignment(std::size_t source_len) {
  Matrix alpha(1, source_len);
  if (source_len > 0) alpha(0, 0) = 1.0;
  return alpha;
}

Matrix alignment_recursive(const Matrix& p) {
  require_probabilities(p, "alignment_recursive");
  const std::size_t target_len = p.rows();
  const std::size_t source_len = p.cols();
  Matrix alpha(target_len, source_len);
  Matrix previous = initial_alignment(source_len);
  for (std::size_t i = 0; i < target_len; ++i) {
    for (std::size_t j = 0; j < source_len; ++j) {
      // Walk k from j down to 0, extending prod_{k<=l<j} (1 - p[i][l]) by one factor per step.
      double total = 0.0;
      double survive = 1.0;
      for (std::size_t k = j + 1; k-- > 0;) {
        if (k < j) survive *= 1.0 - p(i, k);
        total += previous(0, k) * survive;
      }
      alpha(i, j) = p(i, j) * total;
    }
    previous = select_row(alpha, i);
  }
  return alpha;
}

Matrix beta_recursive(const Matrix& alpha, const Matrix& e) {
  require_positive_energies(e, "beta_recursive");
  if (alpha.rows() != e.rows() || alpha.cols() != e.cols()) {
    fail(ErrorKind::kConformance,
         "beta_recursive: shape mismatch " + shape_string(alpha) + " vs " + shape_string(e));
  }
  const std::size_t n = e.cols();
  Matrix beta(e.rows(), n);
  std::vector<double> denominator(n);
  for (std::size_t i = 0; i < e.rows(); ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      double s = 0.0;
      for (std::size_t l = 0; l <= k; ++l) s += e(i, l);
      denominator[k] = s;
    }
    for (std::size_t j = 0; j < n; ++j) {
      double total = 0.0;
      for (std::size_t k = j; k < n; ++k) total += alpha(i, k) * e(i, j) / denominator[k];
      beta(i, j) = total;
    }
  }
  return beta;
}

Matrix position_column(std::size_t source_len) {
  Matrix k(source_len, 1);
  for (std::size_t j = 0; j < source_len; ++j) k(j, 0) = static_cast<double>(j + 1);
  return k;
}

Matrix ideal_delays(std::size_t source_len, std::size_t target_len) {
  Matrix d(target_len, 1);
  const double rate = static_cast<double>(source_len) / static_cast<double>(target_len);
  for (std::size_t i = 0; i < target_len; ++i) d(i, 0) = static_cast<double>(i) * rate;
  return d;
}

}  // namespace emma
