// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "gradient_step.hpp"

#include <cmath>

namespace emma::detail {

double gradient_step(ToyModel& model, const ToyModel& gradient, double learning_rate) {
  const std::vector<double> g = flatten(gradient);
  double norm_sq = 0.0;
  for (double x : g) norm_sq += x * x;
  const double norm = std::sqrt(norm_sq);
  const double scale = norm > kGradientClipNorm ? kGradientClipNorm / norm : 1.0;
  std::vector<double> theta = flatten(model);
  for (std::size_t k = 0; k < theta.size(); ++k) theta[k] -= learning_rate * scale * g[k];
  unflatten(model, theta);
  return norm;
}

void accumulate(ToyModel& a, const ToyModel& b, double scale) {
  std::vector<double> x = flatten(a);
  const std::vector<double> y = flatten(b);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] += scale * y[k];
  unflatten(a, x);
}

}  // namespace emma::detail
