// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include "emma/bleu.hpp"
#include "emma/error.hpp"
#include "emma/metrics.hpp"
#include "oracles.hpp"

using namespace emma;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an emma::Error");
  return ErrorKind::kArgument;
}

std::vector<double> random_delays(std::mt19937_64& rng, std::size_t n, double source_len) {
  std::uniform_real_distribution<double> dist(0.0, source_len);
  std::vector<double> d(n);
  for (double& x : d) x = dist(rng);
  std::sort(d.begin(), d.end());
  if (rng() % 2 == 0) d.back() = source_len;
  return d;
}

oracle::Words random_sentence(std::mt19937_64& rng) {
  static const char* vocab[] = {"a", "b", "c", "d", "e", "f"};
  oracle::Words w(1 + rng() % 12);
  for (auto& s : w) s = vocab[rng() % 6];
  return w;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("average lagging fixtures") {
  const std::vector<double> offline{4, 4, 4, 4};
  CHECK(average_lagging(offline, 4.0, 4) == doctest::Approx(4.0).epsilon(1e-12));
  const std::vector<double> eager{1, 2, 3, 4};
  CHECK(average_lagging(eager, 4.0, 4) == doctest::Approx(1.0).epsilon(1e-12));
  const std::vector<double> wait2{2, 3, 4, 5, 6, 6};
  CHECK(average_lagging(wait2, 6.0, 6) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("length-adaptive lagging on over-generation") {
  const std::vector<double> d{1, 2, 3, 4};
  CHECK(std::fabs(average_lagging(d, 4.0, 2) - (-0.5)) <= 1e-9);
  CHECK(std::fabs(length_adaptive_average_lagging(d, 4.0, 2, 4) - 1.0) <= 1e-9);
}

TEST_CASE("offline LAAL equals the source length") {
  const std::vector<double> d(5, 3.5);
  CHECK(std::fabs(length_adaptive_average_lagging(d, 3.5, 7, 5) - 3.5) <= 1e-12);
}

TEST_CASE("lagging matches the oracle and LAAL bounds AL from above") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const double src = 1.0 + static_cast<double>(rng() % 50) / 10.0;
    const std::size_t hyp = 1 + rng() % 10;
    const std::size_t ref = 1 + rng() % 10;
    const auto d = random_delays(rng, hyp, src);
    const double al = average_lagging(d, src, ref);
    const double laal = length_adaptive_average_lagging(d, src, ref, hyp);
    CHECK(std::fabs(al - oracle::lagging(d, src, static_cast<double>(ref))) <= 1e-9);
    CHECK(std::fabs(laal - oracle::lagging(d, src, static_cast<double>(std::max(ref, hyp)))) <=
          1e-9);
    CHECK(laal >= al - 1e-12);
  }
}

TEST_CASE("tokens after the cutoff do not change AL") {
  const std::vector<double> d{1, 3, 4};
  std::vector<double> longer = d;
  longer.insert(longer.end(), {4, 4, 4});
  CHECK(average_lagging(d, 4.0, 3) == average_lagging(longer, 4.0, 3));
}

TEST_CASE("lagging errors") {
  const std::vector<double> empty;
  const std::vector<double> decreasing{2, 1};
  const std::vector<double> beyond{1, 5};
  const std::vector<double> ok{1, 2};
  CHECK(kind_of([&] { average_lagging(empty, 1.0, 1); }) == ErrorKind::kArgument);
  CHECK(kind_of([&] { average_lagging(ok, 2.0, 0); }) == ErrorKind::kArgument);
  CHECK(kind_of([&] { average_lagging(decreasing, 2.0, 2); }) == ErrorKind::kDomain);
  CHECK(kind_of([&] { average_lagging(beyond, 2.0, 2); }) == ErrorKind::kDomain);
  CHECK(kind_of([&] { length_adaptive_average_lagging(ok, 2.0, 2, 3); }) ==
        ErrorKind::kArgument);
}

TEST_CASE("emission offsets") {
  // Second chunk waits for the first to finish playing.
  const std::vector<Emission> queued{{1.0, 0.5, 25, 1}, {1.2, 1.0, 50, 2}};
  const Offsets a = offsets(queued, 2.0);
  CHECK(a.start_offset_s == doctest::Approx(1.0));
  CHECK(a.end_offset_s == doctest::Approx(0.5));
  // A gap: the second chunk starts at its own emit time.
  const std::vector<Emission> gapped{{0.5, 0.25, 1, 1}, {2.0, 1.5, 1, 1}};
  const Offsets b = offsets(gapped, 2.0);
  CHECK(b.start_offset_s == doctest::Approx(0.5));
  CHECK(b.end_offset_s == doctest::Approx(1.5));
  const std::vector<Emission> exact{{0.0, 2.0, 1, 1}};
  CHECK(offsets(exact, 2.0).end_offset_s == doctest::Approx(0.0));
  CHECK(kind_of([] { offsets(std::vector<Emission>{}, 1.0); }) == ErrorKind::kEmptyOutput);
}

TEST_CASE("instance scoring and aggregation") {
  DecisionTrace trace;
  trace.instance_id = "x";
  trace.output = {1, 2, 3, 4};
  trace.delays_s = {1, 2, 3, 4};
  trace.delays_chunks = {1, 2, 3, 4};
  trace.source_duration_s = 4.0;
  trace.source_chunks = 4;
  trace.emissions = {{4.0, 0.08, 4, 4}};
  const InstanceLatency s = score_instance(trace, 2, DelayUnit::kSeconds);
  CHECK_FALSE(s.error);
  CHECK(s.al == doctest::Approx(-0.5));
  CHECK(s.laal == doctest::Approx(1.0));
  CHECK(s.start_offset_s == doctest::Approx(4.0));

  DecisionTrace empty = trace;
  empty.output.clear();
  empty.delays_s.clear();
  empty.delays_chunks.clear();
  empty.emissions.clear();
  const InstanceLatency bad = score_instance(empty, 2, DelayUnit::kSeconds);
  CHECK(bad.error.has_value());

  InstanceLatency other{"a", 1.5, 2.0, 1.0, 0.0, std::nullopt};
  const LatencyReport report = aggregate_latency({s, bad, other});
  CHECK(report.n_scored == 2);
  CHECK(report.n_failures == 1);
  CHECK(report.al == doctest::Approx(0.5));
  CHECK(report.laal == doctest::Approx(1.5));
  CHECK(report.per_instance.front().id == "a");
}

TEST_CASE("BLEU identity and disjoint corpora") {
  const std::vector<TokenSequence> ref{{"the", "cat", "sat", "on", "the", "mat"}};
  CHECK(corpus_bleu(ref, ref).bleu == doctest::Approx(100.0));
  const std::vector<TokenSequence> other{{"x", "y", "z", "w", "v", "u"}};
  CHECK(corpus_bleu(other, ref).bleu == 0.0);
}

TEST_CASE("BLEU reference fixtures") {
  const std::vector<std::string> h0{"a b c d"};
  const std::vector<std::string> r0{"e f g h"};
  CHECK(std::fabs(corpus_bleu_text(h0, r0).bleu - 0.0) <= 1e-9);

  const std::vector<std::string> h1{"a b c d e"};
  const std::vector<std::string> r1{"a b c x e"};
  const QualityReport q = corpus_bleu_text(h1, r1);
  CHECK(std::round(q.bleu * 100.0) / 100.0 == doctest::Approx(42.73));
  CHECK(q.precisions[0] == doctest::Approx(80.0));
  CHECK(q.precisions[1] == doctest::Approx(50.0));
  CHECK(q.precisions[2] == doctest::Approx(100.0 / 3.0));
  CHECK(q.precisions[3] == doctest::Approx(25.0));
  CHECK(q.brevity_penalty == doctest::Approx(1.0));
}

TEST_CASE("BLEU matches the oracle on random corpora") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng() % 5;
    std::vector<TokenSequence> hyps;
    std::vector<TokenSequence> refs;
    for (std::size_t s = 0; s < n; ++s) {
      hyps.push_back(random_sentence(rng));
      refs.push_back(random_sentence(rng));
    }
    CHECK(std::fabs(corpus_bleu(hyps, refs).bleu - oracle::bleu(hyps, refs)) <= 1e-6);
  }
}

TEST_CASE("BLEU ignores sentence order") {
  std::mt19937_64 rng(8);
  std::vector<TokenSequence> hyps;
  std::vector<TokenSequence> refs;
  for (int s = 0; s < 6; ++s) {
    hyps.push_back(random_sentence(rng));
    refs.push_back(random_sentence(rng));
  }
  const double base = corpus_bleu(hyps, refs).bleu;
  std::vector<std::size_t> order{5, 2, 0, 4, 1, 3};
  std::vector<TokenSequence> ph;
  std::vector<TokenSequence> pr;
  for (auto k : order) {
    ph.push_back(hyps[k]);
    pr.push_back(refs[k]);
  }
  CHECK(corpus_bleu(ph, pr).bleu == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("BLEU over ids and errors") {
  const std::vector<std::vector<TokenId>> ids{{1, 2, 3, 4, 5}};
  CHECK(corpus_bleu_ids(ids, ids).bleu == doctest::Approx(100.0));
  const std::vector<TokenSequence> one{{"a"}};
  const std::vector<TokenSequence> two{{"a"}, {"b"}};
  CHECK(kind_of([&] { corpus_bleu(one, two); }) == ErrorKind::kArgument);
}

TEST_CASE("simplified 13a tokenization") {
  CHECK(tokenize_13a("Hello, world.") ==
        std::vector<std::string>{"Hello", ",", "world", "."});
  CHECK(tokenize_13a("  a   b ") == std::vector<std::string>{"a", "b"});
  CHECK(tokenize_13a("").empty());
}

}  // TEST_SUITE
