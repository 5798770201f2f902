// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

// Corpus BLEU-4 with a single reference, case-sensitive, exponential
// smoothing of zero n-gram matches and the standard brevity penalty. Text
// input goes through a simplified 13a tokenizer (punctuation split off word
// characters, no language-specific rules), so scores approximate the
// "nrefs:1|case:mixed|eff:no|tok:13a|smooth:exp" signature.

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emma/runtime.hpp"

namespace emma {

inline constexpr std::size_t kBleuOrder = 4;

std::vector<std::string> tokenize_13a(std::string_view text);

struct QualityReport {
  double bleu = 0.0;                               // [0, 100]
  std::array<double, kBleuOrder> precisions{};     // percent
  std::array<std::size_t, kBleuOrder> correct{};   // clipped matches
  std::array<std::size_t, kBleuOrder> total{};     // hypothesis n-grams
  double brevity_penalty = 0.0;
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
};

using TokenSequence = std::vector<std::string>;

/// BLEU over pre-tokenized sentences. Throws kArgument on a length mismatch.
QualityReport corpus_bleu(std::span<const TokenSequence> hypotheses,
                          std::span<const TokenSequence> references);

/// BLEU over raw text, tokenized with tokenize_13a.
QualityReport corpus_bleu_text(std::span<const std::string> hypotheses,
                               std::span<const std::string> references);

/// BLEU over token ids, each id treated as one word.
QualityReport corpus_bleu_ids(std::span<const std::vector<TokenId>> hypotheses,
                              std::span<const std::vector<TokenId>> references);

/// Score from sufficient statistics (shared by the corpus entry points).
QualityReport bleu_from_counts(const std::array<std::size_t, kBleuOrder>& correct,
                               const std::array<std::size_t, kBleuOrder>& total,
                               std::size_t hyp_len, std::size_t ref_len);

}  // namespace emma
