// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "emma/objective.hpp"

#include <string>

namespace emma {

namespace {

template <class M>
struct ObjectiveGraph {
  M loss;
  M nll;
  M latency;
  M variance;
  double mean_delay = 0.0;
  double mean_variance = 0.0;
};

double mean_of(const Matrix& m) {
  double total = 0.0;
  for (double v : m.data()) total += v;
  return m.size() == 0 ? 0.0 : total / static_cast<double>(m.size());
}

template <class M>
ObjectiveGraph<M> build_objective(const BasicToyModel<M>& model, const M& h, const M& s,
                                  const M& v, std::span<const int> targets,
                                  const LossWeights& weights, const ObjectiveOptions& options) {
  const std::size_t source_len = value_of(h).rows();
  const std::size_t target_len = value_of(s).rows();
  const std::size_t vocab = value_of(model.readout.bias).cols();
  const std::size_t head_count = model.heads.size();

  if (head_count == 0) fail(ErrorKind::kArgument, "emma_objective: model has no heads");
  if (model.readout.weight.size() != head_count) {
    fail(ErrorKind::kConformance, "emma_objective: readout has " +
                                      std::to_string(model.readout.weight.size()) +
                                      " head projections for " + std::to_string(head_count) +
                                      " heads");
  }
  if (vocab < 2) fail(ErrorKind::kArgument, "emma_objective: vocabulary size must be >= 2");
  if (targets.size() != target_len) {
    fail(ErrorKind::kConformance, "emma_objective: " + std::to_string(targets.size()) +
                                      " targets for " + std::to_string(target_len) +
                                      " decoder states");
  }

  Matrix one_hot(target_len, vocab);
  for (std::size_t i = 0; i < target_len; ++i) {
    if (targets[i] < 0 || static_cast<std::size_t>(targets[i]) >= vocab) {
      fail(ErrorKind::kArgument, "emma_objective: target index " + std::to_string(targets[i]) +
                                     " outside vocabulary of size " + std::to_string(vocab));
    }
    one_hot(i, static_cast<std::size_t>(targets[i])) = 1.0;
  }

  ObjectiveGraph<M> graph;
  std::vector<M> latency_terms;
  std::vector<M> variance_terms;
  M logits = matmul(lift(s, ones(target_len, 1)), model.readout.bias);
  for (std::size_t k = 0; k < head_count; ++k) {
    const auto& head = model.heads[k];
    M p = stepwise_probability(head.policy, s, h);
    if (options.force_last_column) p = force_last_column(p);
    const M alpha = alignment_parallel(p);
    const M energies = attention_energies(head.energy, s, h);
    const M beta = beta_parallel(alpha, energies);
    logits = add(logits, matmul(attention_output(beta, v), model.readout.weight[k]));

    const M delays = expected_delays(alpha);
    const M spread = alignment_variance(alpha);
    graph.mean_delay += mean_of(value_of(delays)) / static_cast<double>(head_count);
    graph.mean_variance += mean_of(value_of(spread)) / static_cast<double>(head_count);
    latency_terms.push_back(latency_loss(delays, source_len, target_len, options.latency_cost));
    variance_terms.push_back(variance_loss(spread));
  }

  const M log_probs = log(softmax_rows(logits));
  graph.nll = mul_scalar(sum(hadamard(log_probs, lift(s, std::move(one_hot)))), -1.0);

  const double inv_heads = 1.0 / static_cast<double>(head_count);
  graph.latency = latency_terms.front();
  graph.variance = variance_terms.front();
  for (std::size_t k = 1; k < head_count; ++k) {
    graph.latency = add(graph.latency, latency_terms[k]);
    graph.variance = add(graph.variance, variance_terms[k]);
  }
  graph.latency = mul_scalar(graph.latency, inv_heads);
  graph.variance = mul_scalar(graph.variance, inv_heads);

  graph.loss = add(graph.nll, add(mul_scalar(graph.latency, weights.latency),
                                  mul_scalar(graph.variance, weights.variance)));
  return graph;
}

void check_inputs(const EncDecStates& states, const LossWeights& weights) {
  states.validate();
  if (weights.latency < 0.0 || weights.variance < 0.0) {
    fail(ErrorKind::kArgument, "emma_objective: loss weights must be non-negative");
  }
}

template <class M>
ObjectiveTerms terms_of(const ObjectiveGraph<M>& g) {
  return ObjectiveTerms{value_of(g.loss).scalar(),     value_of(g.nll).scalar(),
                        value_of(g.latency).scalar(),  value_of(g.variance).scalar(),
                        g.mean_delay,                  g.mean_variance};
}

}  // namespace

std::size_t parameter_count(const ToyModel& model) {
  std::size_t n = 0;
  visit_parameters(model, [&](const Matrix& m) { n += m.size(); });
  return n;
}

std::vector<double> flatten(const ToyModel& model) {
  std::vector<double> out;
  out.reserve(parameter_count(model));
  visit_parameters(model,
                   [&](const Matrix& m) { out.insert(out.end(), m.data().begin(), m.data().end()); });
  return out;
}

void unflatten(ToyModel& model, std::span<const double> values) {
  if (values.size() != parameter_count(model)) {
    fail(ErrorKind::kConformance, "unflatten: " + std::to_string(values.size()) +
                                      " values for " + std::to_string(parameter_count(model)) +
                                      " parameters");
  }
  std::size_t offset = 0;
  visit_parameters(model, [&](Matrix& m) {
    for (double& x : m.data()) x = values[offset++];
  });
}

ToyModel make_toy_model(const ToyModelShape& shape, std::mt19937_64& rng) {
  ToyModel model;
  for (std::size_t k = 0; k < shape.heads; ++k) {
    BasicHead<Matrix> head;
    head.policy = make_policy_head(shape.state_dim, shape.policy, rng);
    head.energy = make_energy_head(shape.state_dim, shape.key_dim, rng);
    model.heads.push_back(std::move(head));
    model.readout.weight.push_back(
        random_normal(shape.value_dim, shape.vocab, 1.0 / std::sqrt(double(shape.value_dim)), rng));
  }
  model.readout.bias = Matrix(1, shape.vocab);
  return model;
}

ObjectiveTerms emma_objective_value(const ToyModel& model, const EncDecStates& states,
                                    std::span<const int> targets, const LossWeights& weights,
                                    const ObjectiveOptions& options) {
  check_inputs(states, weights);
  return terms_of(
      build_objective(model, states.h, states.s, states.v, targets, weights, options));
}

ObjectiveResult emma_objective(const ToyModel& model, const EncDecStates& states,
                               std::span<const int> targets, const LossWeights& weights,
                               const ObjectiveOptions& options) {
  check_inputs(states, weights);
  Tape tape;

  // Bind every parameter as a leaf, mirroring the model layout.
  BasicToyModel<Var> bound;
  for (const auto& head : model.heads) {
    BasicHead<Var> b;
    for (const auto& layer : head.policy.ffn_s) {
      b.policy.ffn_s.push_back({tape.leaf(layer.weight), tape.leaf(layer.bias)});
    }
    for (const auto& layer : head.policy.ffn_h) {
      b.policy.ffn_h.push_back({tape.leaf(layer.weight), tape.leaf(layer.bias)});
    }
    b.policy.bias = tape.leaf(head.policy.bias);
    b.policy.temperature = head.policy.temperature;
    b.energy.query = tape.leaf(head.energy.query);
    b.energy.key = tape.leaf(head.energy.key);
    bound.heads.push_back(std::move(b));
  }
  for (const auto& w : model.readout.weight) bound.readout.weight.push_back(tape.leaf(w));
  bound.readout.bias = tape.leaf(model.readout.bias);

  const Var h = tape.constant(states.h);
  const Var s = tape.constant(states.s);
  const Var v = tape.constant(states.v);
  const auto graph = build_objective(bound, h, s, v, targets, weights, options);
  const Gradients grads = tape.backward(graph.loss);

  ObjectiveResult result{terms_of(graph), model};
  std::vector<Var> leaves;
  visit_parameters(bound, [&](Var& var) { leaves.push_back(var); });
  std::size_t next = 0;
  visit_parameters(result.gradient, [&](Matrix& m) { m = grads[leaves[next++]]; });
  return result;
}

}  // namespace emma
