// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <string>

#include "emma/error.hpp"
#include "emma/harness.hpp"
#include "gradient_step.hpp"

namespace emma {

namespace {

struct ToyProblem {
  EncDecStates states;
  std::vector<int> targets;
};

// Frozen random states. Values are one-hot source tokens and target i copies
// the source token at a monotone position spread evenly over the source.
ToyProblem make_problem(const ToyTrainingConfig& config, std::mt19937_64& rng) {
  ToyProblem problem;
  const std::size_t d = config.state_dim;
  problem.states.h = random_normal(config.source_len, d, 1.0, rng);
  problem.states.s = random_normal(config.target_len, d, 1.0, rng);
  problem.states.v = Matrix(config.source_len, config.vocab);
  std::uniform_int_distribution<int> token(0, static_cast<int>(config.vocab) - 1);
  std::vector<int> source(config.source_len);
  for (std::size_t j = 0; j < config.source_len; ++j) {
    source[j] = token(rng);
    problem.states.v(j, static_cast<std::size_t>(source[j])) = 1.0;
  }
  for (std::size_t i = 0; i < config.target_len; ++i) {
    const std::size_t aligned = (i + 1) * config.source_len / config.target_len;
    problem.targets.push_back(source[aligned == 0 ? 0 : aligned - 1]);
  }
  return problem;
}

void check_config(const ToyTrainingConfig& config) {
  if (config.settings.size() < 2) {
    fail(ErrorKind::kArgument, "train_toy_policy: need at least two loss-weight settings, got " +
                                   std::to_string(config.settings.size()));
  }
  if (config.source_len == 0 || config.target_len == 0 || config.state_dim == 0 ||
      config.heads == 0) {
    fail(ErrorKind::kArgument, "train_toy_policy: lengths, dimension and heads must be positive");
  }
  if (config.vocab < 2) fail(ErrorKind::kArgument, "train_toy_policy: vocabulary must be >= 2");
  if (!(config.learning_rate > 0.0) || !(config.temperature > 0.0)) {
    fail(ErrorKind::kArgument,
         "train_toy_policy: learning rate and temperature must be positive");
  }
  for (const auto& w : config.settings) {
    if (w.latency < 0.0 || w.variance < 0.0) {
      fail(ErrorKind::kArgument, "train_toy_policy: loss weights must be non-negative");
    }
  }
}

TrainingStep to_step(std::size_t step, const ObjectiveTerms& terms) {
  return TrainingStep{step, terms.loss, terms.nll, terms.mean_delay, terms.mean_variance};
}

}  // namespace

TrainingReport train_toy_policy(const ToyTrainingConfig& config) {
  check_config(config);
  std::mt19937_64 rng(config.seed);
  const ToyProblem problem = make_problem(config, rng);

  ToyModelShape shape;
  shape.state_dim = config.state_dim;
  shape.key_dim = config.state_dim;
  shape.value_dim = config.vocab;
  shape.vocab = config.vocab;
  shape.heads = config.heads;
  shape.policy.bias_init = config.bias_init;
  shape.policy.temperature = config.temperature;
  const ToyModel initial = make_toy_model(shape, rng);

  ObjectiveOptions options;
  options.force_last_column = config.force_last_column;

  TrainingReport report;
  report.config = config;
  for (const LossWeights& weights : config.settings) {
    TrainingRun run;
    run.weights = weights;
    ToyModel model = initial;
    for (std::size_t step = 0; step < config.steps; ++step) {
      const ObjectiveResult r =
          emma_objective(model, problem.states, problem.targets, weights, options);
      if (!std::isfinite(r.terms.loss)) {
        fail(ErrorKind::kNumericDomain,
             "train_toy_policy: non-finite loss at step " + std::to_string(step));
      }
      if (step == 0) run.initial = r.terms;
      run.log.push_back(to_step(step, r.terms));
      detail::gradient_step(model, r.gradient, config.learning_rate);
    }
    run.final_terms = emma_objective_value(model, problem.states, problem.targets, weights, options);
    if (!std::isfinite(run.final_terms.loss)) {
      fail(ErrorKind::kNumericDomain,
           "train_toy_policy: non-finite loss at step " + std::to_string(config.steps));
    }
    if (config.steps == 0) run.initial = run.final_terms;
    run.log.push_back(to_step(config.steps, run.final_terms));
    report.runs.push_back(std::move(run));
  }
  return report;
}

}  // namespace emma
