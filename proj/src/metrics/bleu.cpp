// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "emma/bleu.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <regex>
#include <sstream>

#include "emma/error.hpp"

namespace emma {

namespace {

using NgramCounts = std::map<std::string, std::size_t>;

NgramCounts count_ngrams(const TokenSequence& tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t start = 0; start + n <= tokens.size(); ++start) {
    std::string key;
    for (std::size_t k = 0; k < n; ++k) {
      if (k > 0) key.push_back('\x1f');
      key += tokens[start + k];
    }
    ++counts[key];
  }
  return counts;
}

// log() that maps a zero precision to a huge negative number instead of -inf.
double safe_log(double x) { return x == 0.0 ? -9999999999.0 : std::log(x); }

}  // namespace

std::vector<std::string> tokenize_13a(std::string_view text) {
  static const std::regex kPunctuation(R"(([\{-~\[-`\x20-&\(-\+:-@/]))");
  static const std::regex kPeriodCommaAfterNonDigit(R"(([^0-9])([\.,]))");
  static const std::regex kPeriodCommaBeforeNonDigit(R"(([\.,])([^0-9]))");
  static const std::regex kDashAfterDigit(R"(([0-9])(-))");

  std::string line = " " + std::string(text) + " ";
  line = std::regex_replace(line, kPunctuation, " $1 ");
  line = std::regex_replace(line, kPeriodCommaAfterNonDigit, "$1 $2 ");
  line = std::regex_replace(line, kPeriodCommaBeforeNonDigit, " $1 $2");
  line = std::regex_replace(line, kDashAfterDigit, "$1 $2 ");

  std::vector<std::string> tokens;
  std::istringstream words(line);
  for (std::string w; words >> w;) tokens.push_back(std::move(w));
  return tokens;
}

QualityReport bleu_from_counts(const std::array<std::size_t, kBleuOrder>& correct,
                               const std::array<std::size_t, kBleuOrder>& total,
                               std::size_t hyp_len, std::size_t ref_len) {
  QualityReport report;
  report.correct = correct;
  report.total = total;
  report.hyp_len = hyp_len;
  report.ref_len = ref_len;
  report.brevity_penalty = 1.0;
  if (hyp_len < ref_len) {
    report.brevity_penalty =
        hyp_len > 0 ? std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len))
                    : 0.0;
  }

  bool any_match = false;
  for (std::size_t c : correct) any_match = any_match || c > 0;
  if (!any_match) return report;

  double smooth = 1.0;
  for (std::size_t n = 0; n < kBleuOrder; ++n) {
    if (total[n] == 0) break;
    if (correct[n] == 0) {
      smooth *= 2.0;
      report.precisions[n] = 100.0 / (smooth * static_cast<double>(total[n]));
    } else {
      report.precisions[n] =
          100.0 * static_cast<double>(correct[n]) / static_cast<double>(total[n]);
    }
  }
  double log_sum = 0.0;
  for (double p : report.precisions) log_sum += safe_log(p);
  report.bleu = report.brevity_penalty * std::exp(log_sum / static_cast<double>(kBleuOrder));
  return report;
}

QualityReport corpus_bleu(std::span<const TokenSequence> hypotheses,
                          std::span<const TokenSequence> references) {
  if (hypotheses.size() != references.size()) {
    fail(ErrorKind::kArgument, "corpus_bleu: " + std::to_string(hypotheses.size()) +
                                   " hypotheses for " + std::to_string(references.size()) +
                                   " references");
  }
  std::array<std::size_t, kBleuOrder> correct{};
  std::array<std::size_t, kBleuOrder> total{};
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    const auto& hyp = hypotheses[s];
    const auto& ref = references[s];
    hyp_len += hyp.size();
    ref_len += ref.size();
    for (std::size_t n = 1; n <= kBleuOrder; ++n) {
      const NgramCounts hyp_counts = count_ngrams(hyp, n);
      const NgramCounts ref_counts = count_ngrams(ref, n);
      for (const auto& [gram, count] : hyp_counts) {
        auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) correct[n - 1] += std::min(count, it->second);
      }
      if (hyp.size() >= n) total[n - 1] += hyp.size() - n + 1;
    }
  }
  return bleu_from_counts(correct, total, hyp_len, ref_len);
}

QualityReport corpus_bleu_text(std::span<const std::string> hypotheses,
                               std::span<const std::string> references) {
  std::vector<TokenSequence> hyp;
  std::vector<TokenSequence> ref;
  for (const auto& h : hypotheses) hyp.push_back(tokenize_13a(h));
  for (const auto& r : references) ref.push_back(tokenize_13a(r));
  return corpus_bleu(hyp, ref);
}

QualityReport corpus_bleu_ids(std::span<const std::vector<TokenId>> hypotheses,
                              std::span<const std::vector<TokenId>> references) {
  auto words = [](const std::vector<TokenId>& ids) {
    TokenSequence out;
    out.reserve(ids.size());
    for (TokenId id : ids) out.push_back(std::to_string(id));
    return out;
  };
  std::vector<TokenSequence> hyp;
  std::vector<TokenSequence> ref;
  for (const auto& h : hypotheses) hyp.push_back(words(h));
  for (const auto& r : references) ref.push_back(words(r));
  return corpus_bleu(hyp, ref);
}

}  // namespace emma
