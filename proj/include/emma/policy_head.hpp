// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "emma/error.hpp"
#include "emma/matrix.hpp"
#include "emma/tape.hpp"

namespace emma {

/// x W + b applied to every row of x. weight is (in x out), bias is (1 x out).
template <class M>
struct BasicLinear {
  M weight;
  M bias;
};

/// Stepwise-probability network of one head. The two feedforward stacks
/// project decoder and encoder states into a shared energy space; tanh sits
/// between consecutive layers.
template <class M>
struct BasicPolicyHead {
  std::vector<BasicLinear<M>> ffn_s;
  std::vector<BasicLinear<M>> ffn_h;
  M bias;  // 1x1, learnable
  double temperature = 0.2;
};

/// Query/key projections used for the attention energies of one head.
template <class M>
struct BasicEnergyHead {
  M query;  // d x d_k
  M key;    // d x d_k
};

using Linear = BasicLinear<Matrix>;
using PolicyHeadParams = BasicPolicyHead<Matrix>;
using EnergyHeadParams = BasicEnergyHead<Matrix>;

/// Frozen encoder/decoder states for one (source, target) pair. Row i of s is
/// the decoder state that precedes target i (row 0 is the begin-of-sequence
/// state).
struct EncDecStates {
  Matrix h;  // |x| x d
  Matrix s;  // |y| x d
  Matrix v;  // |x| x d_v

  void validate() const;
  std::size_t source_len() const { return h.rows(); }
  std::size_t target_len() const { return s.rows(); }
};

template <class M>
M feed_forward(const std::vector<BasicLinear<M>>& layers, const M& x) {
  const Matrix& xv = value_of(x);
  M out = x;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    if (k > 0) out = tanh(out);
    const M row_of_ones = lift(x, ones(xv.rows(), 1));
    out = add(matmul(out, layers[k].weight), outer(row_of_ones, layers[k].bias));
  }
  return out;
}

/// p[i][j] = sigmoid((FFN_s(s_i) . FFN_h(h_j) + b) / temperature).
template <class M>
M stepwise_probability(const BasicPolicyHead<M>& head, const M& s, const M& h) {
  if (!(head.temperature > 0.0)) {
    fail(ErrorKind::kArgument, "stepwise_probability: temperature must be positive");
  }
  const M query = feed_forward(head.ffn_s, s);
  const M key = feed_forward(head.ffn_h, h);
  const Matrix& qv = value_of(query);
  const Matrix& kv = value_of(key);
  if (qv.cols() != kv.cols()) {
    fail(ErrorKind::kConformance, "stepwise_probability: projection widths differ " +
                                      shape_string(qv) + " vs " + shape_string(kv));
  }
  const M scores = matmul(query, transpose(key));
  const M spread_bias =
      matmul(matmul(lift(s, ones(qv.rows(), 1)), head.bias), lift(s, ones(1, kv.rows())));
  return sigmoid(mul_scalar(add(scores, spread_bias), 1.0 / head.temperature));
}

/// e[i][j] = exp(q_i . k_j / sqrt(d_k) - max_j'(q_i . k_j' / sqrt(d_k))).
/// The row maximum is a constant shift; the lookback weights do not depend on it.
template <class M>
M attention_energies(const BasicEnergyHead<M>& head, const M& s, const M& h) {
  const M q = matmul(s, head.query);
  const M k = matmul(h, head.key);
  const double scale = 1.0 / std::sqrt(static_cast<double>(value_of(q).cols()));
  const M scores = mul_scalar(matmul(q, transpose(k)), scale);
  const Matrix& sv = value_of(scores);
  const Matrix shift = outer(row_max(sv), ones(1, sv.cols()));
  return exp(sub(scores, lift(s, shift)));
}

struct PolicyHeadOptions {
  std::size_t depth = 2;       // number of linear layers per stack
  std::size_t hidden = 0;      // 0 means "state dimension"
  std::size_t projection = 0;  // 0 means "state dimension"
  double bias_init = -4.0;
  double temperature = 0.2;
};

/// Random initialization: weights ~ N(0, 1/fan_in), zero layer biases.
PolicyHeadParams make_policy_head(std::size_t state_dim, const PolicyHeadOptions& options,
                                  std::mt19937_64& rng);
EnergyHeadParams make_energy_head(std::size_t state_dim, std::size_t key_dim,
                                  std::mt19937_64& rng);

Matrix random_normal(std::size_t rows, std::size_t cols, double stddev, std::mt19937_64& rng);

}  // namespace emma
