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

constexpr std::uint64_t kSourceStream = 1;
constexpr std::uint64_t kTargetStream = 2;
constexpr double kPositionScale = 0.5;

}  // namespace

ToyEmmaModel::ToyEmmaModel(ToyModel model, Matrix source_embedding, Matrix target_embedding,
                           std::uint64_t position_seed)
    : model_(std::move(model)),
      source_embedding_(std::move(source_embedding)),
      target_embedding_(std::move(target_embedding)),
      position_seed_(position_seed) {
  if (target_embedding_.rows() != source_embedding_.rows() + 1 ||
      target_embedding_.cols() != source_embedding_.cols()) {
    fail(ErrorKind::kConformance, "ToyEmmaModel: embeddings " + shape_string(source_embedding_) +
                                      " and " + shape_string(target_embedding_) +
                                      " do not match");
  }
}

double ToyEmmaModel::position(std::uint64_t stream, std::size_t index, std::size_t dim) const {
  return kPositionScale * hashed_normal(position_seed_, stream, index, dim);
}

Matrix ToyEmmaModel::source_states(std::span<const TokenId> source) const {
  const std::size_t vocab = source_embedding_.rows();
  const std::size_t d = source_embedding_.cols();
  Matrix h(source.size(), d);
  for (std::size_t j = 0; j < source.size(); ++j) {
    if (source[j] < 0 || static_cast<std::size_t>(source[j]) >= vocab) {
      fail(ErrorKind::kArgument, "ToyEmmaModel: source token " + std::to_string(source[j]) +
                                     " outside vocabulary of size " + std::to_string(vocab));
    }
    for (std::size_t c = 0; c < d; ++c) {
      h(j, c) = source_embedding_(static_cast<std::size_t>(source[j]), c) +
                position(kSourceStream, j, c);
    }
  }
  return h;
}

Matrix ToyEmmaModel::decoder_state(std::span<const TokenId> prefix) const {
  const std::size_t vocab = source_embedding_.rows();
  const std::size_t d = target_embedding_.cols();
  std::size_t row = vocab;  // begin-of-sequence
  if (!prefix.empty()) {
    const TokenId last = prefix.back();
    if (last < 0 || static_cast<std::size_t>(last) >= vocab) {
      fail(ErrorKind::kArgument, "ToyEmmaModel: target token " + std::to_string(last) +
                                     " outside vocabulary");
    }
    row = static_cast<std::size_t>(last);
  }
  Matrix s(1, d);
  for (std::size_t c = 0; c < d; ++c) {
    s(0, c) = target_embedding_(row, c) + position(kTargetStream, prefix.size(), c);
  }
  return s;
}

Matrix ToyEmmaModel::value_rows(std::span<const TokenId> source) const {
  Matrix v(source.size(), source_embedding_.rows());
  for (std::size_t j = 0; j < source.size(); ++j) v(j, static_cast<std::size_t>(source[j])) = 1.0;
  return v;
}

EncDecStates ToyEmmaModel::states_for(std::span<const TokenId> source,
                                      std::span<const TokenId> target) const {
  EncDecStates states;
  states.h = source_states(source);
  states.v = value_rows(source);
  std::vector<Matrix> rows;
  for (std::size_t i = 0; i < target.size(); ++i) rows.push_back(decoder_state(target.first(i)));
  states.s = stack_rows(rows);
  return states;
}

EncoderState ToyEmmaModel::encode_prefix(std::span<const SourceChunk> consumed,
                                         bool source_finished) const {
  std::vector<TokenId> payloads;
  payloads.reserve(consumed.size());
  for (const auto& chunk : consumed) payloads.push_back(chunk.payload);
  EncoderState state;
  state.h = source_states(payloads);
  state.consumed = consumed.size();
  state.source_finished = source_finished;
  // The one-hot values are recoverable from h only through the payloads, so
  // keep them alongside: columns [d, d + vocab) hold the value rows.
  const Matrix v = value_rows(payloads);
  Matrix packed(state.h.rows(), state.h.cols() + v.cols());
  for (std::size_t j = 0; j < packed.rows(); ++j) {
    for (std::size_t c = 0; c < state.h.cols(); ++c) packed(j, c) = state.h(j, c);
    for (std::size_t c = 0; c < v.cols(); ++c) packed(j, state.h.cols() + c) = v(j, c);
  }
  state.h = std::move(packed);
  return state;
}

namespace {

Matrix column_block(const Matrix& m, std::size_t first, std::size_t count) {
  Matrix out(m.rows(), count);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < count; ++c) out(r, c) = m(r, first + c);
  }
  return out;
}

}  // namespace

std::vector<double> ToyEmmaModel::head_probabilities(const EncoderState& state,
                                                     std::span<const TokenId> prefix) const {
  const std::size_t d = source_embedding_.cols();
  const Matrix h = column_block(state.h, 0, d);
  const Matrix s = decoder_state(prefix);
  std::vector<double> ps;
  for (const auto& head : model_.heads) {
    const Matrix p = stepwise_probability(head.policy, s, h);
    ps.push_back(p(0, p.cols() - 1));
  }
  return ps;
}

TokenId ToyEmmaModel::next_token(const EncoderState& state, std::span<const TokenId> prefix) const {
  if (state.source_finished && prefix.size() >= state.consumed) return kEndOfSequence;
  const std::size_t d = source_embedding_.cols();
  const std::size_t vocab = source_embedding_.rows();
  const Matrix h = column_block(state.h, 0, d);
  const Matrix v = column_block(state.h, d, vocab);
  const Matrix s = decoder_state(prefix);
  Matrix logits = model_.readout.bias;
  for (std::size_t k = 0; k < model_.heads.size(); ++k) {
    Matrix weights = attention_energies(model_.heads[k].energy, s, h);
    weights = mul_scalar(weights, 1.0 / sum(weights).scalar());
    logits = add(logits, matmul(matmul(weights, v), model_.readout.weight[k]));
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < logits.cols(); ++c) {
    if (logits(0, c) > logits(0, best)) best = c;
  }
  return static_cast<TokenId>(best);
}

ToyEmmaModel train_toy_emma_model(const ToyTrainedOptions& options, std::uint64_t seed) {
  if (options.vocab < 2 || options.state_dim == 0 || options.heads == 0 ||
      options.sample_len == 0 || options.samples == 0) {
    fail(ErrorKind::kArgument, "train_toy_emma_model: invalid options");
  }
  std::mt19937_64 rng(seed);
  const std::size_t d = options.state_dim;
  ToyModelShape shape;
  shape.state_dim = d;
  shape.key_dim = d;
  shape.value_dim = options.vocab;
  shape.vocab = options.vocab;
  shape.heads = options.heads;
  shape.policy.bias_init = options.bias_init;
  shape.policy.temperature = options.temperature;
  ToyModel model = make_toy_model(shape, rng);
  Matrix source_embedding = random_normal(options.vocab, d, 1.0, rng);
  Matrix target_embedding = random_normal(options.vocab + 1, d, 1.0, rng);
  const std::uint64_t position_seed = rng();

  // Copy pairs: the target repeats the source token by token.
  std::uniform_int_distribution<TokenId> token(0, static_cast<TokenId>(options.vocab) - 1);
  std::vector<std::vector<TokenId>> samples(options.samples);
  for (auto& sample : samples) {
    for (std::size_t j = 0; j < options.sample_len; ++j) sample.push_back(token(rng));
  }

  ObjectiveOptions objective_options;
  objective_options.force_last_column = true;
  const double inv_samples = 1.0 / static_cast<double>(samples.size());
  for (std::size_t step = 0; step < options.steps; ++step) {
    const ToyEmmaModel current(model, source_embedding, target_embedding, position_seed);
    ToyModel total_gradient;
    double total_loss = 0.0;
    for (std::size_t n = 0; n < samples.size(); ++n) {
      const EncDecStates states = current.states_for(samples[n], samples[n]);
      ObjectiveResult r =
          emma_objective(model, states, samples[n], options.weights, objective_options);
      total_loss += r.terms.loss;
      if (n == 0) {
        total_gradient = std::move(r.gradient);
        detail::accumulate(total_gradient, total_gradient, inv_samples - 1.0);
      } else {
        detail::accumulate(total_gradient, r.gradient, inv_samples);
      }
    }
    if (!std::isfinite(total_loss)) {
      fail(ErrorKind::kNumericDomain,
           "train_toy_emma_model: non-finite loss at step " + std::to_string(step));
    }
    detail::gradient_step(model, total_gradient, options.learning_rate);
  }
  return ToyEmmaModel(std::move(model), std::move(source_embedding), std::move(target_embedding),
                      position_seed);
}

}  // namespace emma
