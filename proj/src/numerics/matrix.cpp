// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "emma/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "emma/error.hpp"

namespace emma {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorKind::kConformance, std::string(op) + ": shape mismatch " +
                                      shape_string(a) + " vs " + shape_string(b));
  }
}

bool is_vector(const Matrix& m) { return m.rows() == 1 || m.cols() == 1; }

template <class F>
Matrix map(const Matrix& a, F&& f) {
  Matrix out(a.rows(), a.cols());
  auto src = a.data();
  auto dst = out.data();
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] = f(src[k]);
  return out;
}

template <class F>
Matrix zip(const Matrix& a, const Matrix& b, const char* op, F&& f) {
  require_same_shape(a, b, op);
  Matrix out(a.rows(), a.cols());
  auto x = a.data();
  auto y = b.data();
  auto dst = out.data();
  for (std::size_t k = 0; k < x.size(); ++k) dst[k] = f(x[k], y[k]);
  return out;
}

template <class Combine>
Matrix scan(const Matrix& a, Axis axis, double init, Combine&& combine) {
  Matrix out(a.rows(), a.cols());
  switch (axis) {
    case Axis::kAlongRow:
      for (std::size_t r = 0; r < a.rows(); ++r) {
        double acc = init;
        for (std::size_t c = 0; c < a.cols(); ++c) {
          acc = combine(acc, a(r, c));
          out(r, c) = acc;
        }
      }
      return out;
    case Axis::kAlongColumn:
      for (std::size_t c = 0; c < a.cols(); ++c) {
        double acc = init;
        for (std::size_t r = 0; r < a.rows(); ++r) {
          acc = combine(acc, a(r, c));
          out(r, c) = acc;
        }
      }
      return out;
  }
  fail(ErrorKind::kArgument, "scan: invalid axis");
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    fail(ErrorKind::kConformance,
         "Matrix: " + std::to_string(data_.size()) + " values for shape " +
             std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  const std::size_t m = n == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(n * m);
  for (const auto& row : rows) {
    if (row.size() != m) fail(ErrorKind::kConformance, "Matrix::from_rows: ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Matrix(n, m, std::move(data));
}

Matrix Matrix::row_vector(std::span<const double> values) {
  return Matrix(1, values.size(), std::vector<double>(values.begin(), values.end()));
}

Matrix Matrix::column_vector(std::span<const double> values) {
  return Matrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

double Matrix::scalar() const {
  if (rows_ != 1 || cols_ != 1) {
    fail(ErrorKind::kArgument, "scalar(): expected 1x1, got " + shape_string(*this));
  }
  return data_[0];
}

std::string shape_string(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

Matrix ones(std::size_t rows, std::size_t cols) { return Matrix(rows, cols, 1.0); }

Matrix identity(std::size_t n) {
  Matrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) out(k, k) = 1.0;
  return out;
}

Matrix add(const Matrix& a, const Matrix& b) { return zip(a, b, "add", std::plus<>{}); }
Matrix sub(const Matrix& a, const Matrix& b) { return zip(a, b, "sub", std::minus<>{}); }
Matrix hadamard(const Matrix& a, const Matrix& b) {
  return zip(a, b, "hadamard", std::multiplies<>{});
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    fail(ErrorKind::kConformance,
         "matmul: shape mismatch " + shape_string(a) + " vs " + shape_string(b));
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

Matrix outer(const Matrix& u, const Matrix& v) {
  if (!is_vector(u) || !is_vector(v)) {
    fail(ErrorKind::kConformance,
         "outer: expected vectors, got " + shape_string(u) + " and " + shape_string(v));
  }
  Matrix out(u.size(), v.size());
  auto x = u.data();
  auto y = v.data();
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) out(i, j) = x[i] * y[j];
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = a(r, c);
  }
  return out;
}

Matrix cumprod(const Matrix& a, Axis axis) {
  return scan(a, axis, 1.0, std::multiplies<>{});
}

Matrix cumsum(const Matrix& a, Axis axis) { return scan(a, axis, 0.0, std::plus<>{}); }

Matrix triu(const Matrix& a, long offset) {
  Matrix out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) {
      if (static_cast<long>(c) >= static_cast<long>(r) + offset) out(r, c) = a(r, c);
    }
  }
  return out;
}

Matrix roll(const Matrix& a, long k) {
  const auto n = static_cast<long>(a.cols());
  if (n == 0) fail(ErrorKind::kArgument, "roll: empty last axis");
  const long shift = ((k % n) + n) % n;
  Matrix out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (long c = 0; c < n; ++c) {
      out(r, static_cast<std::size_t>((c + shift) % n)) = a(r, static_cast<std::size_t>(c));
    }
  }
  return out;
}

Matrix flip(const Matrix& a) {
  Matrix out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, a.cols() - 1 - c) = a(r, c);
  }
  return out;
}

Matrix sigmoid(const Matrix& a) {
  return map(a, [](double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double z = std::exp(x);
    return z / (1.0 + z);
  });
}

Matrix tanh(const Matrix& a) {
  return map(a, [](double x) { return std::tanh(x); });
}

Matrix exp(const Matrix& a) {
  return map(a, [](double x) { return std::exp(x); });
}

Matrix log(const Matrix& a) {
  return map(a, [](double x) {
    if (!(x > 0.0)) fail(ErrorKind::kDomain, "log: non-positive entry " + std::to_string(x));
    return std::log(x);
  });
}

Matrix reciprocal(const Matrix& a) {
  return map(a, [](double x) {
    if (x == 0.0) fail(ErrorKind::kDomain, "reciprocal: zero entry");
    return 1.0 / x;
  });
}

Matrix softmax_rows(const Matrix& a) {
  Matrix out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto in = a.row(r);
    if (in.empty()) continue;
    const double peak = *std::max_element(in.begin(), in.end());
    double total = 0.0;
    auto dst = out.row(r);
    for (std::size_t c = 0; c < in.size(); ++c) {
      dst[c] = std::exp(in[c] - peak);
      total += dst[c];
    }
    for (double& v : dst) v /= total;
  }
  return out;
}

Matrix add_scalar(const Matrix& a, double s) {
  return map(a, [s](double x) { return x + s; });
}

Matrix mul_scalar(const Matrix& a, double s) {
  return map(a, [s](double x) { return x * s; });
}

Matrix one_minus(const Matrix& a) {
  return map(a, [](double x) { return 1.0 - x; });
}

Matrix sum(const Matrix& a) {
  double total = 0.0;
  for (double v : a.data()) total += v;
  return Matrix(1, 1, total);
}

Matrix select_row(const Matrix& a, std::size_t r) {
  if (r >= a.rows()) {
    fail(ErrorKind::kArgument,
         "select_row: row " + std::to_string(r) + " out of range for " + shape_string(a));
  }
  auto src = a.row(r);
  return Matrix(1, a.cols(), std::vector<double>(src.begin(), src.end()));
}

Matrix stack_rows(std::span<const Matrix> parts) {
  if (parts.empty()) return Matrix();
  const std::size_t cols = parts.front().cols();
  std::size_t rows = 0;
  for (const auto& p : parts) {
    if (p.cols() != cols) {
      fail(ErrorKind::kConformance, "stack_rows: shape mismatch " +
                                        shape_string(parts.front()) + " vs " + shape_string(p));
    }
    rows += p.rows();
  }
  std::vector<double> data;
  data.reserve(rows * cols);
  for (const auto& p : parts) data.insert(data.end(), p.data().begin(), p.data().end());
  return Matrix(rows, cols, std::move(data));
}

Matrix row_max(const Matrix& a) {
  Matrix out(a.rows(), 1);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto in = a.row(r);
    out(r, 0) = in.empty() ? 0.0 : *std::max_element(in.begin(), in.end());
  }
  return out;
}

bool all_finite(const Matrix& a) noexcept {
  return std::all_of(a.data().begin(), a.data().end(),
                     [](double v) { return std::isfinite(v); });
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    worst = std::max(worst, std::abs(a.data()[k] - b.data()[k]));
  }
  return worst;
}

}  // namespace emma
