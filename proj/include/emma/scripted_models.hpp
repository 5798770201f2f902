// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

// Deterministic policy fixtures for the streaming runtime. All of them copy
// source payloads to the target through an optional token map; they differ
// only in when they are willing to write.

#pragma once

#include <cstdint>
#include <map>
#include <string_view>

#include "emma/runtime.hpp"

namespace emma {

using TokenMap = std::map<TokenId, TokenId>;

/// Copy model base: encoder state is the payload sequence; the next token is
/// the mapped payload of the chunk aligned with the next target position, and
/// end-of-sequence once every chunk of a finished source has been copied.
class CopyModel : public IncrementalModel {
 public:
  explicit CopyModel(TokenMap vocab_map = {}) : vocab_map_(std::move(vocab_map)) {}

  EncoderState encode_prefix(std::span<const SourceChunk> consumed,
                             bool source_finished) const override;
  TokenId next_token(const EncoderState& state, std::span<const TokenId> prefix) const override;

 protected:
  TokenId map_token(TokenId source) const;

 private:
  TokenMap vocab_map_;
};

/// Wait-k: one head whose probability is 1 once max(k, 1) + written chunks
/// have been consumed, else 0. k = 0 behaves like k = 1 because the first
/// decision always follows the first read.
class ScriptedWaitKModel final : public CopyModel {
 public:
  ScriptedWaitKModel(std::size_t k, TokenMap vocab_map = {})
      : CopyModel(std::move(vocab_map)), k_(k) {}

  std::vector<double> head_probabilities(const EncoderState& state,
                                         std::span<const TokenId> prefix) const override;

 private:
  std::size_t k_;
};

/// Writes nothing until the source is finished, then everything.
class ScriptedOfflineModel final : public CopyModel {
 public:
  using CopyModel::CopyModel;

  std::vector<double> head_probabilities(const EncoderState& state,
                                         std::span<const TokenId> prefix) const override;
};

struct StochasticPolicyOptions {
  std::uint64_t seed = 0;
  std::size_t heads = 2;
  double temperature = 1.0;
  double mean = 0.0;
  double stddev = 1.0;
  /// How many tokens the policy may run ahead of the consumed source.
  std::size_t lookahead = 1;
};

/// Head probability sigmoid(g(head, i, j) / temperature) with g drawn once
/// per (head, written count i, consumed count j) from a seeded Gaussian, and
/// 0 once the model would run more than `lookahead` tokens ahead. A token
/// written ahead of its source chunk repeats the latest consumed payload.
class ScriptedStochasticModel final : public CopyModel {
 public:
  ScriptedStochasticModel(StochasticPolicyOptions options, TokenMap vocab_map = {})
      : CopyModel(std::move(vocab_map)), options_(options) {}

  std::vector<double> head_probabilities(const EncoderState& state,
                                         std::span<const TokenId> prefix) const override;

  /// The Gaussian draw for one (head, i, j); a pure function of the seed.
  double energy(std::size_t head, std::size_t written, std::size_t consumed) const;

 private:
  StochasticPolicyOptions options_;
};

/// Stable 64-bit FNV-1a hash, used to salt seeds with instance ids.
std::uint64_t fnv1a(std::string_view text);
/// Standard normal variate that depends only on its arguments.
double hashed_normal(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c);

}  // namespace emma
