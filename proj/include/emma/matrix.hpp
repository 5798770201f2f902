// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

// Dense row-major matrices of doubles and the primitive operator catalog the
// alignment math is written in: elementwise product, matrix product,
// cumulative product/sum, upper-triangle masking, cyclic roll, flip, ones,
// outer product, sigmoid, row softmax, exp, log and scalar arithmetic.
//
// Every operation returns a new value; a Matrix is never mutated through the
// catalog. Shape violations raise ErrorKind::kConformance with both shapes in
// the message.

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace emma {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  /// Builds a matrix from nested row lists; all rows must have equal length.
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix row_vector(std::span<const double> values);
  static Matrix column_vector(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data_).subspan(r * cols_, cols_);
  }
  std::span<double> row(std::size_t r) {
    return std::span<double>(data_).subspan(r * cols_, cols_);
  }

  /// The single entry of a 1x1 matrix.
  double scalar() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// "RxC" for error messages.
std::string shape_string(const Matrix& m);

/// Direction of a cumulative scan. kAlongRow scans each row left to right
/// (the second dimension); kAlongColumn scans each column top to bottom.
enum class Axis { kAlongRow, kAlongColumn };

Matrix ones(std::size_t rows, std::size_t cols);
Matrix identity(std::size_t n);

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix matmul(const Matrix& a, const Matrix& b);
/// Outer product of two vectors of either orientation: (|u| x |v|).
Matrix outer(const Matrix& u, const Matrix& v);
Matrix transpose(const Matrix& a);

Matrix cumprod(const Matrix& a, Axis axis);
Matrix cumsum(const Matrix& a, Axis axis);
/// Keeps entries (m, n) with n >= m + offset, zeroes the rest.
Matrix triu(const Matrix& a, long offset);
/// Cyclic shift by k along the last axis: roll(.., 1) maps (a1..aN) to (aN, a1..aN-1).
Matrix roll(const Matrix& a, long k);
/// Reverses the last axis.
Matrix flip(const Matrix& a);

Matrix sigmoid(const Matrix& a);
Matrix tanh(const Matrix& a);
Matrix exp(const Matrix& a);
Matrix log(const Matrix& a);
Matrix reciprocal(const Matrix& a);
Matrix softmax_rows(const Matrix& a);

Matrix add_scalar(const Matrix& a, double s);
Matrix mul_scalar(const Matrix& a, double s);
/// 1 - a, elementwise.
Matrix one_minus(const Matrix& a);

/// Sum of all entries as a 1x1 matrix.
Matrix sum(const Matrix& a);
/// Row r as a 1xC matrix.
Matrix select_row(const Matrix& a, std::size_t r);
/// Vertical concatenation of equal-width matrices.
Matrix stack_rows(std::span<const Matrix> parts);

/// Per-row maximum as an Rx1 column.
Matrix row_max(const Matrix& a);

bool all_finite(const Matrix& a) noexcept;
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace emma
