// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "emma/scripted_models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace emma {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in (0, 1), never exactly 0.
double to_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double hashed_normal(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t state = splitmix64(seed);
  state = splitmix64(state ^ a);
  state = splitmix64(state ^ b);
  state = splitmix64(state ^ c);
  const double u1 = to_unit(splitmix64(state ^ 0x1ULL));
  const double u2 = to_unit(splitmix64(state ^ 0x2ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

EncoderState CopyModel::encode_prefix(std::span<const SourceChunk> consumed,
                                      bool source_finished) const {
  EncoderState state;
  state.h = Matrix(consumed.size(), 1);
  for (std::size_t j = 0; j < consumed.size(); ++j) {
    state.h(j, 0) = static_cast<double>(consumed[j].payload);
  }
  state.consumed = consumed.size();
  state.source_finished = source_finished;
  return state;
}

TokenId CopyModel::map_token(TokenId source) const {
  auto it = vocab_map_.find(source);
  return it == vocab_map_.end() ? source : it->second;
}

TokenId CopyModel::next_token(const EncoderState& state, std::span<const TokenId> prefix) const {
  const std::size_t written = prefix.size();
  if (written < state.consumed) return map_token(static_cast<TokenId>(state.h(written, 0)));
  if (state.source_finished) return kEndOfSequence;
  // Running ahead of the source: repeat the latest payload.
  return map_token(static_cast<TokenId>(state.h(state.consumed - 1, 0)));
}

std::vector<double> ScriptedWaitKModel::head_probabilities(
    const EncoderState& state, std::span<const TokenId> prefix) const {
  const std::size_t lag = std::max<std::size_t>(k_, 1);
  return {state.consumed >= lag + prefix.size() ? 1.0 : 0.0};
}

std::vector<double> ScriptedOfflineModel::head_probabilities(
    const EncoderState& state, std::span<const TokenId>) const {
  return {state.source_finished ? 1.0 : 0.0};
}

double ScriptedStochasticModel::energy(std::size_t head, std::size_t written,
                                       std::size_t consumed) const {
  return options_.mean +
         options_.stddev * hashed_normal(options_.seed, head, written, consumed);
}

std::vector<double> ScriptedStochasticModel::head_probabilities(
    const EncoderState& state, std::span<const TokenId> prefix) const {
  const std::size_t written = prefix.size();
  std::vector<double> ps(options_.heads, 0.0);
  if (written + 1 > state.consumed + options_.lookahead) return ps;
  for (std::size_t h = 0; h < options_.heads; ++h) {
    const double g = energy(h, written, state.consumed) / options_.temperature;
    ps[h] = 1.0 / (1.0 + std::exp(-g));
  }
  return ps;
}

}  // namespace emma
