// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <atomic>
#include <fstream>
#include <string>
#include <thread>

#include "emma/error.hpp"
#include "emma/harness.hpp"

namespace emma {

namespace {

std::vector<StreamInstance> with_chunk_override(std::span<const StreamInstance> instances,
                                                std::optional<double> chunk_ms) {
  std::vector<StreamInstance> out(instances.begin(), instances.end());
  if (chunk_ms) {
    for (auto& inst : out) {
      for (auto& chunk : inst.source_chunks) chunk.duration_s = *chunk_ms / 1000.0;
    }
  }
  std::sort(out.begin(), out.end(),
            [](const StreamInstance& a, const StreamInstance& b) { return a.id < b.id; });
  return out;
}

InstanceOutcome run_one(const ModelFactory& factory, const StreamInstance& inst,
                        const RuntimeConfig& config) {
  InstanceOutcome outcome;
  outcome.id = inst.id;
  try {
    const auto model = factory(inst);
    outcome.trace = run_stream(*model, inst, config);
  } catch (const Error& e) {
    outcome.error = std::string(to_string(e.kind())) + ": " + e.what();
  }
  return outcome;
}

std::vector<InstanceOutcome> run_all(const ModelFactory& factory,
                                     const std::vector<StreamInstance>& instances,
                                     const RuntimeConfig& config, std::size_t workers) {
  std::vector<InstanceOutcome> outcomes(instances.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < instances.size(); k = next++) {
      outcomes[k] = run_one(factory, instances[k], config);
    }
  };
  const std::size_t n_threads = std::min(workers, std::max<std::size_t>(instances.size(), 1));
  if (n_threads <= 1) {
    work();
    return outcomes;
  }
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  return outcomes;
}

void write_traces(const std::filesystem::path& dir, const std::vector<InstanceOutcome>& outcomes) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create trace directory " + dir.string());
  for (const auto& outcome : outcomes) {
    if (!outcome.trace) continue;
    const auto path = dir / (outcome.id + ".jsonl");
    std::ofstream out(path);
    if (!out) fail(ErrorKind::kIo, "cannot write trace " + path.string());
    write_trace_jsonl(*outcome.trace, out);
  }
}

}  // namespace

CorpusResult evaluate_corpus(const Manifest& manifest, std::span<const StreamInstance> instances) {
  manifest.validate();
  const std::vector<StreamInstance> sorted = with_chunk_override(instances, manifest.chunk_ms);
  const ModelFactory factory = make_model_factory(manifest, sorted);

  CorpusResult result;
  result.threshold = manifest.runtime.threshold;
  result.n_instances = sorted.size();
  result.outcomes = run_all(factory, sorted, manifest.runtime, manifest.workers);

  std::vector<InstanceLatency> latencies;
  std::vector<std::vector<TokenId>> hypotheses;
  std::vector<std::vector<TokenId>> references;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const auto& outcome = result.outcomes[k];
    if (!outcome.trace) {
      ++result.n_failures;
      continue;
    }
    InstanceLatency lat =
        score_instance(*outcome.trace, sorted[k].reference.size(), manifest.latency_unit);
    if (lat.error) ++result.n_failures;
    latencies.push_back(std::move(lat));
    hypotheses.push_back(outcome.trace->output);
    references.push_back(sorted[k].reference);
  }
  if (!sorted.empty() && hypotheses.empty()) {
    fail(ErrorKind::kCorpusFailure, "evaluate_corpus: all " + std::to_string(sorted.size()) +
                                        " instances failed; first error: " +
                                        *result.outcomes.front().error);
  }
  result.latency = aggregate_latency(std::move(latencies));
  result.quality = corpus_bleu_ids(hypotheses, references);
  if (manifest.trace_dir) write_traces(*manifest.trace_dir, result.outcomes);
  return result;
}

CorpusResult evaluate_corpus(const Manifest& manifest) {
  const auto instances = load_instances(manifest.instances);
  return evaluate_corpus(manifest, instances);
}

SweepRow to_row(const CorpusResult& result) {
  SweepRow row;
  row.threshold = result.threshold;
  row.bleu = result.quality.bleu;
  row.al = result.latency.al;
  row.laal = result.latency.laal;
  row.start_offset = result.latency.start_offset_s;
  row.end_offset = result.latency.end_offset_s;
  row.n_instances = result.n_instances;
  row.n_failures = result.n_failures;
  return row;
}

SweepReport threshold_sweep(const Manifest& manifest, std::span<const StreamInstance> instances,
                            std::span<const double> thresholds) {
  if (thresholds.size() < 2) {
    fail(ErrorKind::kArgument, "threshold_sweep: need at least two thresholds, got " +
                                   std::to_string(thresholds.size()));
  }
  std::vector<double> sorted(thresholds.begin(), thresholds.end());
  std::sort(sorted.begin(), sorted.end());
  for (double t : sorted) {
    if (!(t > 0.0 && t < 1.0)) {
      fail(ErrorKind::kArgument, "threshold_sweep: threshold " + std::to_string(t) +
                                     " outside (0, 1)");
    }
  }
  SweepReport report;
  for (double t : sorted) {
    Manifest m = manifest;
    m.runtime.threshold = t;
    // Traces from several thresholds would overwrite each other.
    if (m.trace_dir) m.trace_dir = *m.trace_dir / ("t" + std::to_string(t));
    report.rows.push_back(to_row(evaluate_corpus(m, instances)));
  }
  return report;
}

SweepReport threshold_sweep(const Manifest& manifest, std::span<const double> thresholds) {
  const auto instances = load_instances(manifest.instances);
  return threshold_sweep(manifest, instances, thresholds);
}

}  // namespace emma
