// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance criteria, one PASS/FAIL line each. Exit status is non-zero if
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "emma/alignment.hpp"
#include "emma/bleu.hpp"
#include "emma/error.hpp"
#include "emma/harness.hpp"
#include "emma/metrics.hpp"
#include "emma/objective.hpp"
#include "emma/policy_head.hpp"
#include "emma/tape.hpp"
#include "oracles.hpp"

using namespace emma;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

char buffer[256];

template <typename... Args>
std::string format(const char* fmt, Args... args) {
  std::snprintf(buffer, sizeof(buffer), fmt, args...);
  return buffer;
}

// 1. Parallel alignment agrees with the recursion.
Outcome alignment_equivalence() {
  std::mt19937_64 rng(1);
  double worst = 0.0;
  const auto start = Clock::now();
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t ny = 1 + rng() % 32;
    const std::size_t nx = 1 + rng() % 64;
    const Matrix p = oracle::random_uniform(ny, nx, 0.01, 0.99, rng);
    worst = std::max(worst, max_abs_diff(alignment_parallel(p), alignment_recursive(p)));
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-10 && elapsed < 5.0,
          format("max |diff| %.3e over 1000 draws, %.2f s", worst, elapsed)};
}

// 2. Lookback weights agree with the direct sum and ignore energy shifts.
Outcome beta_equivalence() {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  double worst_shift = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t ny = 1 + rng() % 16;
    const std::size_t nx = 1 + rng() % 24;
    const Matrix alpha = alignment_parallel(oracle::random_uniform(ny, nx, 0.01, 0.99, rng));
    Matrix logits(ny, nx);
    for (double& x : logits.data()) x = normal(rng);
    const Matrix e = exp(logits);
    const Matrix beta = beta_parallel(alpha, e);
    worst = std::max(worst, max_abs_diff(beta, oracle::lookback_weights(alpha, e)));
    const double c = normal(rng);
    worst_shift = std::max(worst_shift, max_abs_diff(beta, beta_parallel(alpha, exp(add_scalar(logits, c)))));
  }
  return {worst <= 1e-10 && worst_shift <= 1e-12,
          format("max |diff| %.3e vs direct sum, %.3e under shifts", worst, worst_shift)};
}

// 3. Mass invariants.
Outcome mass_invariants() {
  std::mt19937_64 rng(3);
  double worst_alpha = 0.0;
  double worst_beta = 0.0;
  bool nonnegative = true;
  bool delays_ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t ny = 1 + rng() % 16;
    const std::size_t nx = 1 + rng() % 24;
    Matrix p = force_last_column(oracle::random_uniform(ny, nx, 0.01, 0.99, rng));
    const Matrix alpha = alignment_parallel(p);
    const Matrix beta = beta_parallel(alpha, oracle::random_uniform(ny, nx, 0.1, 3.0, rng));
    for (std::size_t i = 0; i < ny; ++i) {
      worst_alpha = std::max(worst_alpha, std::fabs(oracle::row_sum(alpha, i) - 1.0));
      worst_beta = std::max(worst_beta, std::fabs(oracle::row_sum(beta, i) - 1.0));
    }
    for (double x : alpha.data()) nonnegative = nonnegative && x >= -1e-15;
    for (double x : beta.data()) nonnegative = nonnegative && x >= -1e-15;
    const Matrix d = expected_delays(alpha);
    for (std::size_t i = 0; i < ny; ++i) {
      delays_ok = delays_ok && d(i, 0) >= 1.0 - 1e-12 &&
                  d(i, 0) <= static_cast<double>(nx) + 1e-12;
      if (i > 0) delays_ok = delays_ok && d(i, 0) >= d(i - 1, 0) - 1e-12;
    }
  }
  return {worst_alpha <= 1e-10 && worst_beta <= 1e-10 && nonnegative && delays_ok,
          format("row-sum error alpha %.3e beta %.3e, non-negative %s, delays monotone %s",
                 worst_alpha, worst_beta, nonnegative ? "yes" : "no", delays_ok ? "yes" : "no")};
}

// 4. Objective gradients pass central finite differences.
Outcome gradient_check() {
  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    ToyModelShape shape;
    shape.state_dim = 8;
    shape.heads = 2;
    const std::size_t nx = 1 + rng() % 6;
    const std::size_t ny = 1 + rng() % 4;
    const ToyModel model = make_toy_model(shape, rng);
    EncDecStates states;
    states.h = random_normal(nx, shape.state_dim, 1.0, rng);
    states.s = random_normal(ny, shape.state_dim, 1.0, rng);
    states.v = random_normal(nx, shape.value_dim, 1.0, rng);
    std::vector<int> targets;
    for (std::size_t i = 0; i < ny; ++i) targets.push_back(static_cast<int>(rng() % shape.vocab));
    const LossWeights weights{0.5, 0.5};
    const ObjectiveResult r = emma_objective(model, states, targets, weights);
    ToyModel probe = model;
    const ScalarFunction f = [&](std::span<const double> theta) {
      unflatten(probe, theta);
      return emma_objective_value(probe, states, targets, weights).loss;
    };
    worst = std::max(worst, finite_diff_check(f, flatten(model), flatten(r.gradient), 1e-5));
  }
  return {worst <= 1e-5, format("worst relative error %.3e over 50 instances", worst)};
}

// 5. Latency metric fixtures.
Outcome metric_fixtures() {
  std::vector<double> errors;
  const std::vector<double> offline{4, 4, 4, 4};
  const std::vector<double> eager{1, 2, 3, 4};
  const std::vector<double> wait2{2, 3, 4, 5, 6, 6};
  errors.push_back(average_lagging(offline, 4.0, 4) - 4.0);
  errors.push_back(average_lagging(eager, 4.0, 4) - 1.0);
  errors.push_back(average_lagging(wait2, 6.0, 6) - 2.0);
  errors.push_back(average_lagging(eager, 4.0, 2) + 0.5);
  errors.push_back(length_adaptive_average_lagging(eager, 4.0, 2, 4) - 1.0);
  const std::vector<Emission> emissions{{1.5, 0.5, 25, 1}, {1.6, 1.0, 50, 2}};
  const Offsets o = offsets(emissions, 2.0);
  errors.push_back(o.start_offset_s - 1.5);
  errors.push_back(o.end_offset_s - 1.0);
  const std::vector<Emission> exact{{0.0, 2.0, 1, 1}};
  errors.push_back(offsets(exact, 2.0).end_offset_s);
  double worst = 0.0;
  for (double e : errors) worst = std::max(worst, std::fabs(e));
  return {worst <= 1e-9, format("max |error| %.3e over %zu fixtures", worst, errors.size())};
}

// 6. BLEU identity and agreement with the reference implementation.
Outcome bleu_agreement() {
  std::mt19937_64 rng(6);
  static const char* vocab[] = {"a", "b", "c", "d", "e"};
  const auto sentence = [&] {
    oracle::Words w(1 + rng() % 12);
    for (auto& s : w) s = vocab[rng() % 5];
    return w;
  };
  std::vector<TokenSequence> same{sentence(), sentence()};
  while (same[0].size() < 4) same[0].push_back("a");
  const double identity = corpus_bleu(same, same).bleu;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<TokenSequence> hyps{sentence()};
    const std::vector<TokenSequence> refs{sentence()};
    worst = std::max(worst, std::fabs(corpus_bleu(hyps, refs).bleu - oracle::bleu(hyps, refs)));
  }
  const std::vector<std::string> h{"a b c d e"};
  const std::vector<std::string> r{"a b c x e"};
  const double fixture = corpus_bleu_text(h, r).bleu;
  return {std::fabs(identity - 100.0) <= 1e-9 && worst <= 1e-6 &&
              std::fabs(fixture - 42.7287006396) <= 1e-6,
          format("identity %.6f, max |diff| %.3e over 20 pairs, fixture %.4f", identity, worst,
                 fixture)};
}

// 7. Raising the threshold never lowers latency, corpus-wide or per token.
Outcome sweep_monotonicity(const Manifest& manifest) {
  const auto instances = load_instances(manifest.instances);
  const std::vector<double> thresholds{0.4, 0.5, 0.6, 0.7};
  std::vector<CorpusResult> results;
  for (double t : thresholds) {
    Manifest m = manifest;
    m.runtime.threshold = t;
    results.push_back(evaluate_corpus(m, instances));
  }
  bool al_ok = true;
  bool pointwise = true;
  std::string als;
  for (std::size_t k = 0; k < results.size(); ++k) {
    als += format("%s%.4f", k == 0 ? "" : " ", results[k].latency.al);
    if (k == 0) continue;
    al_ok = al_ok && results[k].latency.al >= results[k - 1].latency.al;
    for (std::size_t n = 0; n < results[k].outcomes.size(); ++n) {
      const auto& a = results[k - 1].outcomes[n].trace;
      const auto& b = results[k].outcomes[n].trace;
      if (!a || !b || a->delays_s.size() != b->delays_s.size()) {
        pointwise = false;
        continue;
      }
      for (std::size_t i = 0; i < a->delays_s.size(); ++i) {
        pointwise = pointwise && b->delays_s[i] >= a->delays_s[i];
      }
    }
  }
  return {al_ok && pointwise,
          "AL " + als + (pointwise ? ", delays pointwise non-decreasing" : ", pointwise violation")};
}

// 8. Latency and variance weights move training where they should.
Outcome training_tradeoff() {
  const auto start = Clock::now();
  ToyTrainingConfig config;
  config.steps = 500;
  config.seed = 8;
  config.settings = {{0.0, 0.0}, {0.1, 0.0}, {0.5, 0.0}};
  const TrainingReport latency = train_toy_policy(config);
  config.settings = {{0.0, 0.0}, {0.0, 0.5}};
  const TrainingReport variance = train_toy_policy(config);
  const double elapsed = seconds_since(start);

  bool delays_ok = true;
  std::string delays;
  for (std::size_t k = 0; k < latency.runs.size(); ++k) {
    const double d = latency.runs[k].final_terms.mean_delay;
    delays += format("%s%.4f", k == 0 ? "" : " ", d);
    if (k > 0) delays_ok = delays_ok && d <= latency.runs[k - 1].final_terms.mean_delay;
  }
  const double v0 = variance.runs[0].final_terms.mean_variance;
  const double v1 = variance.runs[1].final_terms.mean_variance;
  return {delays_ok && v1 < v0 && elapsed < 60.0,
          "mean delay " + delays + format(", variance %.4f -> %.4f, %.2f s", v0, v1, elapsed)};
}

// 9. Reports are byte-identical across repeats and worker counts.
Outcome reproducibility(const Manifest& manifest) {
  const auto instances = load_instances(manifest.instances);
  const std::vector<double> thresholds{0.4, 0.5, 0.6, 0.7};
  std::vector<std::string> reports;
  for (std::size_t workers : {1, 1, 8, 8}) {
    Manifest m = manifest;
    m.workers = workers;
    const SweepReport r = threshold_sweep(m, instances, thresholds);
    reports.push_back(format_report(r, ReportFormat::kCsv) + format_report(r, ReportFormat::kJson));
  }
  bool same = true;
  for (const auto& r : reports) same = same && r == reports[0];
  return {same, format("%zu reports of %zu bytes, identical: %s", reports.size(),
                       reports[0].size(), same ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path data = argc > 1 ? fs::path(argv[1]) : fs::path(EMMA_SOURCE_DIR) / "data";
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "parallel alignment matches recursion", alignment_equivalence},
      {2, "lookback weights match direct sum", beta_equivalence},
      {3, "alignment and lookback mass", mass_invariants},
      {4, "objective gradient vs finite differences", gradient_check},
      {5, "latency metric fixtures", metric_fixtures},
      {6, "BLEU identity and reference agreement", bleu_agreement},
      {7, "threshold sweep latency monotone",
       [&] { return sweep_monotonicity(load_manifest(data / "stochastic_manifest.json")); }},
      {8, "training latency/variance trade-off", training_tradeoff},
      {9, "reproducible reports across workers",
       [&] { return reproducibility(load_manifest(data / "stochastic_manifest.json")); }},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("[%s] criterion %d: %s (%s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
