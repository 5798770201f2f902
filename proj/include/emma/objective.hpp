// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

// Training objective of the monotonic policy: negative log-likelihood of the
// target through a toy readout over the lookback attention, plus weighted
// latency and alignment-variance regularizers averaged over heads.

#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "emma/alignment.hpp"
#include "emma/policy_head.hpp"

namespace emma {

template <class M>
struct BasicHead {
  BasicPolicyHead<M> policy;
  BasicEnergyHead<M> energy;
};

/// logits_i = sum_h (beta_h V)_i W_h + b. Equivalent to one output projection
/// over the concatenated head outputs.
template <class M>
struct BasicReadout {
  std::vector<M> weight;  // per head, d_v x vocab
  M bias;                 // 1 x vocab
};

template <class M>
struct BasicToyModel {
  std::vector<BasicHead<M>> heads;
  BasicReadout<M> readout;
};

using ToyModel = BasicToyModel<Matrix>;

/// Visits every trainable matrix in a fixed order. Temperatures are
/// configuration, not parameters.
template <class Model, class F>
void visit_parameters(Model& model, F&& f) {
  for (auto& head : model.heads) {
    for (auto& layer : head.policy.ffn_s) {
      f(layer.weight);
      f(layer.bias);
    }
    for (auto& layer : head.policy.ffn_h) {
      f(layer.weight);
      f(layer.bias);
    }
    f(head.policy.bias);
    f(head.energy.query);
    f(head.energy.key);
  }
  for (auto& w : model.readout.weight) f(w);
  f(model.readout.bias);
}

std::size_t parameter_count(const ToyModel& model);
std::vector<double> flatten(const ToyModel& model);
/// Overwrites the parameters of `model` from a flat vector of matching length.
void unflatten(ToyModel& model, std::span<const double> values);

struct ToyModelShape {
  std::size_t state_dim = 8;
  std::size_t value_dim = 8;
  std::size_t key_dim = 8;
  std::size_t vocab = 8;
  std::size_t heads = 2;
  PolicyHeadOptions policy;
};

ToyModel make_toy_model(const ToyModelShape& shape, std::mt19937_64& rng);

struct LossWeights {
  double latency = 0.0;
  double variance = 0.0;
};

struct ObjectiveOptions {
  bool force_last_column = false;
  LatencyCost latency_cost = LatencyCost::kLagBehindIdeal;
};

struct ObjectiveTerms {
  double loss = 0.0;
  double nll = 0.0;
  double latency = 0.0;   // head-averaged latency loss
  double variance = 0.0;  // head-averaged variance loss
  double mean_delay = 0.0;
  double mean_variance = 0.0;
};

struct ObjectiveResult {
  ObjectiveTerms terms;
  ToyModel gradient;  // same layout as the model
};

/// Forward value only (plain matrices, no tape).
ObjectiveTerms emma_objective_value(const ToyModel& model, const EncDecStates& states,
                                    std::span<const int> targets, const LossWeights& weights,
                                    const ObjectiveOptions& options = {});

/// Forward value and gradient with respect to every model parameter.
ObjectiveResult emma_objective(const ToyModel& model, const EncDecStates& states,
                               std::span<const int> targets, const LossWeights& weights,
                               const ObjectiveOptions& options = {});

}  // namespace emma
