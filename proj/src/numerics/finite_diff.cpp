// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <string>

#include "emma/error.hpp"
#include "emma/tape.hpp"

namespace emma {

std::vector<double> central_difference(const ScalarFunction& f, std::span<const double> theta,
                                       double h) {
  if (!(h > 0.0)) fail(ErrorKind::kArgument, "finite differences: step must be positive");
  std::vector<double> probe(theta.begin(), theta.end());
  std::vector<double> grad(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) {
    probe[k] = theta[k] + h;
    const double up = f(probe);
    probe[k] = theta[k] - h;
    const double down = f(probe);
    probe[k] = theta[k];
    if (!std::isfinite(up) || !std::isfinite(down)) {
      fail(ErrorKind::kNumericDomain,
           "finite differences: non-finite value probing coordinate " + std::to_string(k));
    }
    grad[k] = (up - down) / (2.0 * h);
  }
  return grad;
}

double finite_diff_check(const ScalarFunction& f, std::span<const double> theta,
                         std::span<const double> analytic_gradient, double h) {
  if (analytic_gradient.size() != theta.size()) {
    fail(ErrorKind::kConformance, "finite_diff_check: " + std::to_string(analytic_gradient.size()) +
                                      " gradient entries for " + std::to_string(theta.size()) +
                                      " parameters");
  }
  const auto numeric = central_difference(f, theta, h);
  // Components near zero carry O(eps / h) rounding noise in the central
  // difference, so errors are measured against the gradient's scale.
  double scale = 1e-8;
  double worst = 0.0;
  for (std::size_t k = 0; k < numeric.size(); ++k) {
    scale = std::max(scale, std::abs(numeric[k]));
    worst = std::max(worst, std::abs(analytic_gradient[k] - numeric[k]));
  }
  return worst / scale;
}

}  // namespace emma
