// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

// emma_sim: corpus evaluation, threshold sweeps and toy training.
//
//   emma_sim eval  --manifest m.json [--threshold 0.5] [--format csv|json] [--out FILE]
//   emma_sim sweep --manifest m.json [--sweep 0.4,0.5,0.6,0.7]
//   emma_sim train [--lambda-latency 0,0.1,0.5] [--lambda-variance 0] [--steps 500]
//
// Exit status: 0 on success, 1 when the corpus (or training) fails, 2 on
// argument or manifest errors.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "emma/emma.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct EvalOptions {
  std::string manifest;
  std::optional<double> threshold;
  std::vector<double> sweep;
  std::optional<double> chunk_ms;
  std::optional<std::size_t> l_unit;
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda_latency;
  std::optional<double> lambda_variance;
  std::string format = "csv";
  std::string out;
  std::string trace_dir;
  std::optional<std::size_t> workers;
};

struct TrainOptions {
  std::vector<double> lambda_latency{0.0, 0.1, 0.5};
  double lambda_variance = 0.0;
  std::size_t source_len = 6;
  std::size_t target_len = 4;
  std::size_t vocab = 8;
  std::size_t dim = 8;
  std::size_t heads = 2;
  std::size_t steps = 500;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;
  std::string out;
};

int exit_code(emma_status status) {
  switch (status) {
    case EMMA_OK: return kExitOk;
    case EMMA_ERR_ARGUMENT:
    case EMMA_ERR_PARSE:
    case EMMA_ERR_VALIDATION:
    case EMMA_ERR_IO: return kExitUsage;
    default: return kExitFailure;
  }
}

int report_error(emma_status status) {
  std::cerr << "emma_sim: " << emma_status_name(status) << ": " << emma_last_error() << "\n";
  return exit_code(status);
}

int write_text(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return kExitOk;
  }
  std::FILE* f = std::fopen(out.c_str(), "wb");
  if (f == nullptr) {
    std::cerr << "emma_sim: cannot open " << out << " for writing\n";
    return kExitUsage;
  }
  const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
  if (std::fclose(f) != 0 || !ok) {
    std::cerr << "emma_sim: failed writing " << out << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

emma_status apply_overrides(emma_manifest* m, const EvalOptions& o) {
  emma_status st = EMMA_OK;
  if (st == EMMA_OK && o.threshold) st = emma_manifest_set_threshold(m, *o.threshold);
  if (st == EMMA_OK && o.chunk_ms) st = emma_manifest_set_chunk_ms(m, *o.chunk_ms);
  if (st == EMMA_OK && o.l_unit) st = emma_manifest_set_min_unit_chunk(m, *o.l_unit);
  if (st == EMMA_OK && o.seed) st = emma_manifest_set_seed(m, *o.seed);
  if (st == EMMA_OK && o.workers) st = emma_manifest_set_workers(m, *o.workers);
  if (st == EMMA_OK && !o.trace_dir.empty()) st = emma_manifest_set_trace_dir(m, o.trace_dir.c_str());
  if (st == EMMA_OK && (o.lambda_latency || o.lambda_variance)) {
    st = emma_manifest_set_loss_weights(m, o.lambda_latency.value_or(0.0),
                                        o.lambda_variance.value_or(0.0));
  }
  return st;
}

int run_corpus(const EvalOptions& o, bool sweep) {
  emma_manifest* manifest = nullptr;
  emma_status st = emma_manifest_load(o.manifest.c_str(), &manifest);
  if (st != EMMA_OK) return report_error(st);
  st = apply_overrides(manifest, o);

  emma_report* report = nullptr;
  if (st == EMMA_OK) {
    if (sweep) {
      std::vector<double> thresholds = o.sweep;
      if (thresholds.empty()) {
        std::size_t count = 0;
        st = emma_manifest_sweep(manifest, nullptr, 0, &count);
        thresholds.resize(count);
        if (st == EMMA_OK) st = emma_manifest_sweep(manifest, thresholds.data(), count, &count);
      }
      if (st == EMMA_OK) st = emma_sweep(manifest, thresholds.data(), thresholds.size(), &report);
    } else {
      st = emma_evaluate(manifest, &report);
    }
  }
  emma_manifest_free(manifest);
  if (st != EMMA_OK) return report_error(st);

  const emma_report_format format = o.format == "json" ? EMMA_FORMAT_JSON : EMMA_FORMAT_CSV;
  std::size_t needed = 0;
  st = emma_report_format_text(report, format, nullptr, 0, &needed);
  std::string text(needed + 1, '\0');
  if (st == EMMA_OK) st = emma_report_format_text(report, format, text.data(), text.size(), &needed);
  emma_report_free(report);
  if (st != EMMA_OK) return report_error(st);
  text.resize(needed);
  return write_text(text, o.out);
}

int run_train(const TrainOptions& o) {
  emma_train_config* config = nullptr;
  emma_status st = emma_train_config_new(&config);
  if (st == EMMA_OK) {
    st = emma_train_config_set_shape(config, o.source_len, o.target_len, o.vocab, o.dim, o.heads);
  }
  if (st == EMMA_OK) st = emma_train_config_set_schedule(config, o.steps, o.learning_rate, o.seed);
  for (double lat : o.lambda_latency) {
    if (st == EMMA_OK) st = emma_train_config_add_setting(config, lat, o.lambda_variance);
  }
  emma_train_report* report = nullptr;
  if (st == EMMA_OK) st = emma_train(config, &report);
  emma_train_config_free(config);
  if (st != EMMA_OK) return report_error(st);

  for (std::size_t k = 0; k < emma_train_report_runs(report); ++k) {
    emma_train_summary s{};
    emma_train_report_summary(report, k, &s);
    std::fprintf(stderr,
                 "lambda_latency=%.3f lambda_variance=%.3f loss %.6f -> %.6f  "
                 "mean_delay=%.6f mean_variance=%.6f\n",
                 s.lambda_latency, s.lambda_variance, s.initial_loss, s.final_loss,
                 s.final_mean_delay, s.final_mean_variance);
  }
  int code = kExitOk;
  if (!o.out.empty()) {
    st = emma_train_report_write(report, o.out.c_str());
    if (st != EMMA_OK) code = report_error(st);
  }
  emma_train_report_free(report);
  return code;
}

void add_corpus_options(CLI::App* cmd, EvalOptions& o) {
  cmd->add_option("--manifest", o.manifest, "Manifest JSON file")->required();
  cmd->add_option("--threshold", o.threshold, "Decision threshold in (0, 1)");
  cmd->add_option("--chunk-ms", o.chunk_ms, "Override every source chunk duration (ms)");
  cmd->add_option("--l-unit", o.l_unit, "Minimum units per emitted chunk");
  cmd->add_option("--seed", o.seed, "Model seed");
  cmd->add_option("--lambda-latency", o.lambda_latency, "Latency weight for toy_trained models");
  cmd->add_option("--lambda-variance", o.lambda_variance,
                  "Variance weight for toy_trained models");
  cmd->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", o.out, "Report path (default: stdout)");
  cmd->add_option("--trace-dir", o.trace_dir, "Directory for per-instance event logs");
  cmd->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EMMA simultaneous-translation policy simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(emma_version()));

  EvalOptions eval_opts;
  auto* eval = app.add_subcommand("eval", "Evaluate a corpus at one threshold");
  add_corpus_options(eval, eval_opts);

  EvalOptions sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "Evaluate a corpus across thresholds");
  add_corpus_options(sweep, sweep_opts);
  sweep->add_option("--sweep", sweep_opts.sweep, "Comma-separated thresholds")->delimiter(',');

  TrainOptions train_opts;
  auto* train = app.add_subcommand("train", "Toy training of the regularized objective");
  train->add_option("--lambda-latency", train_opts.lambda_latency,
                    "Comma-separated latency weights, one run each")
      ->delimiter(',');
  train->add_option("--lambda-variance", train_opts.lambda_variance, "Variance weight");
  train->add_option("--source-len", train_opts.source_len);
  train->add_option("--target-len", train_opts.target_len);
  train->add_option("--vocab", train_opts.vocab);
  train->add_option("--dim", train_opts.dim);
  train->add_option("--heads", train_opts.heads);
  train->add_option("--steps", train_opts.steps);
  train->add_option("--lr", train_opts.learning_rate);
  train->add_option("--seed", train_opts.seed);
  train->add_option("--out", train_opts.out, "Training report path (JSON)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*eval) return run_corpus(eval_opts, false);
  if (*sweep) return run_corpus(sweep_opts, true);
  return run_train(train_opts);
}
