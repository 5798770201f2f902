// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "emma/policy_head.hpp"

namespace emma {

void EncDecStates::validate() const {
  if (h.rows() == 0 || s.rows() == 0) {
    fail(ErrorKind::kArgument, "EncDecStates: source and target must be non-empty");
  }
  if (h.cols() != s.cols()) {
    fail(ErrorKind::kConformance, "EncDecStates: encoder " + shape_string(h) +
                                      " and decoder " + shape_string(s) +
                                      " state widths differ");
  }
  if (v.rows() != h.rows()) {
    fail(ErrorKind::kConformance, "EncDecStates: values " + shape_string(v) +
                                      " do not match encoder " + shape_string(h));
  }
}

Matrix random_normal(std::size_t rows, std::size_t cols, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, stddev);
  Matrix out(rows, cols);
  for (double& x : out.data()) x = normal(rng);
  return out;
}

namespace {

std::vector<Linear> make_stack(std::size_t in, std::size_t hidden, std::size_t out,
                               std::size_t depth, std::mt19937_64& rng) {
  std::vector<Linear> layers;
  for (std::size_t k = 0; k < depth; ++k) {
    const std::size_t fan_in = k == 0 ? in : hidden;
    const std::size_t fan_out = k + 1 == depth ? out : hidden;
    layers.push_back(Linear{random_normal(fan_in, fan_out, 1.0 / std::sqrt(double(fan_in)), rng),
                            Matrix(1, fan_out)});
  }
  return layers;
}

}  // namespace

PolicyHeadParams make_policy_head(std::size_t state_dim, const PolicyHeadOptions& options,
                                  std::mt19937_64& rng) {
  if (options.depth == 0) fail(ErrorKind::kArgument, "make_policy_head: depth must be >= 1");
  if (!(options.temperature > 0.0)) {
    fail(ErrorKind::kArgument, "make_policy_head: temperature must be positive");
  }
  const std::size_t hidden = options.hidden == 0 ? state_dim : options.hidden;
  const std::size_t projection = options.projection == 0 ? state_dim : options.projection;
  PolicyHeadParams head;
  head.ffn_s = make_stack(state_dim, hidden, projection, options.depth, rng);
  head.ffn_h = make_stack(state_dim, hidden, projection, options.depth, rng);
  head.bias = Matrix(1, 1, options.bias_init);
  head.temperature = options.temperature;
  return head;
}

EnergyHeadParams make_energy_head(std::size_t state_dim, std::size_t key_dim,
                                  std::mt19937_64& rng) {
  const double scale = 1.0 / std::sqrt(double(state_dim));
  return EnergyHeadParams{random_normal(state_dim, key_dim, scale, rng),
                          random_normal(state_dim, key_dim, scale, rng)};
}

}  // namespace emma
