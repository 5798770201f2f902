// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "emma/emma.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "emma/alignment.hpp"
#include "emma/error.hpp"
#include "emma/harness.hpp"
#include "emma/metrics.hpp"

struct emma_manifest {
  emma::Manifest value;
};

struct emma_report {
  emma::SweepReport value;
};

struct emma_train_config {
  emma::ToyTrainingConfig value;
};

struct emma_train_report {
  emma::TrainingReport value;
};

namespace {

thread_local std::string g_last_error;

emma_status status_of(emma::ErrorKind kind) {
  return static_cast<emma_status>(static_cast<int>(kind) + 1);
}

template <class F>
emma_status guarded(F&& body) {
  try {
    body();
    return EMMA_OK;
  } catch (const emma::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return EMMA_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return EMMA_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return EMMA_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) emma::fail(emma::ErrorKind::kArgument, what);
}

emma::ReportFormat to_format(emma_report_format format) {
  switch (format) {
    case EMMA_FORMAT_CSV: return emma::ReportFormat::kCsv;
    case EMMA_FORMAT_JSON: return emma::ReportFormat::kJson;
  }
  emma::fail(emma::ErrorKind::kArgument, "unknown report format");
}

emma::Matrix matrix_from(const double* data, std::size_t rows, std::size_t cols) {
  require(data != nullptr, "null input buffer");
  return emma::Matrix(rows, cols, std::vector<double>(data, data + rows * cols));
}

void copy_out(const emma::Matrix& m, double* out) {
  require(out != nullptr, "null output buffer");
  std::copy(m.data().begin(), m.data().end(), out);
}

}  // namespace

extern "C" {

const char* emma_version(void) { return "0.1.0"; }

const char* emma_last_error(void) { return g_last_error.c_str(); }

const char* emma_status_name(emma_status status) {
  switch (status) {
    case EMMA_OK: return "ok";
    case EMMA_ERR_INTERNAL: return "internal";
    default: break;
  }
  const int k = static_cast<int>(status) - 1;
  if (k < 0 || k > static_cast<int>(emma::ErrorKind::kCorpusFailure)) return "unknown";
  return emma::to_string(static_cast<emma::ErrorKind>(k)).data();
}

emma_status emma_manifest_load(const char* path, emma_manifest** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "emma_manifest_load: null argument");
    *out = new emma_manifest{emma::load_manifest(path)};
  });
}

void emma_manifest_free(emma_manifest* manifest) { delete manifest; }

emma_status emma_manifest_set_threshold(emma_manifest* manifest, double threshold) {
  return guarded([&] {
    require(manifest != nullptr, "null manifest");
    require(threshold > 0.0 && threshold < 1.0, "threshold must lie in (0, 1)");
    manifest->value.runtime.threshold = threshold;
  });
}

emma_status emma_manifest_set_min_unit_chunk(emma_manifest* manifest, size_t units) {
  return guarded([&] {
    require(manifest != nullptr, "null manifest");
    require(units > 0, "min unit chunk must be positive");
    manifest->value.runtime.min_unit_chunk = units;
  });
}

emma_status emma_manifest_set_chunk_ms(emma_manifest* manifest, double chunk_ms) {
  return guarded([&] {
    require(manifest != nullptr, "null manifest");
    require(chunk_ms > 0.0, "chunk duration must be positive");
    manifest->value.chunk_ms = chunk_ms;
  });
}

emma_status emma_manifest_set_seed(emma_manifest* manifest, uint64_t seed) {
  return guarded([&] {
    require(manifest != nullptr, "null manifest");
    manifest->value.seed = seed;
    manifest->value.model.stochastic.seed = seed;
  });
}

emma_status emma_manifest_set_workers(emma_manifest* manifest, size_t workers) {
  return guarded([&] {
    require(manifest != nullptr, "null manifest");
    require(workers > 0, "worker count must be positive");
    manifest->value.workers = workers;
  });
}

emma_status emma_manifest_set_trace_dir(emma_manifest* manifest, const char* dir) {
  return guarded([&] {
    require(manifest != nullptr, "null manifest");
    if (dir == nullptr || *dir == '\0') {
      manifest->value.trace_dir.reset();
    } else {
      manifest->value.trace_dir = std::filesystem::path(dir);
    }
  });
}

emma_status emma_manifest_set_loss_weights(emma_manifest* manifest, double latency,
                                           double variance) {
  return guarded([&] {
    require(manifest != nullptr, "null manifest");
    require(latency >= 0.0 && variance >= 0.0, "loss weights must be non-negative");
    manifest->value.model.toy.weights = {latency, variance};
  });
}

emma_status emma_manifest_sweep(const emma_manifest* manifest, double* thresholds,
                                size_t capacity, size_t* count) {
  return guarded([&] {
    require(manifest != nullptr && count != nullptr, "null argument");
    const auto& sweep = manifest->value.sweep;
    *count = sweep.size();
    if (thresholds != nullptr) {
      std::copy_n(sweep.begin(), std::min(capacity, sweep.size()), thresholds);
    }
  });
}

emma_status emma_evaluate(const emma_manifest* manifest, emma_report** out) {
  return guarded([&] {
    require(manifest != nullptr && out != nullptr, "emma_evaluate: null argument");
    auto report = std::make_unique<emma_report>();
    report->value.rows.push_back(emma::to_row(emma::evaluate_corpus(manifest->value)));
    *out = report.release();
  });
}

emma_status emma_sweep(const emma_manifest* manifest, const double* thresholds, size_t count,
                       emma_report** out) {
  return guarded([&] {
    require(manifest != nullptr && out != nullptr, "emma_sweep: null argument");
    require(thresholds != nullptr || count == 0, "emma_sweep: null thresholds");
    const std::vector<double> ts(thresholds, thresholds + count);
    *out = new emma_report{emma::threshold_sweep(manifest->value, ts)};
  });
}

void emma_report_free(emma_report* report) { delete report; }

size_t emma_report_rows(const emma_report* report) {
  return report == nullptr ? 0 : report->value.rows.size();
}

emma_status emma_report_row(const emma_report* report, size_t index, emma_sweep_row* out) {
  return guarded([&] {
    require(report != nullptr && out != nullptr, "emma_report_row: null argument");
    if (index >= report->value.rows.size()) {
      emma::fail(emma::ErrorKind::kLookup, "emma_report_row: index " + std::to_string(index) +
                                               " out of range");
    }
    const auto& r = report->value.rows[index];
    *out = emma_sweep_row{r.threshold,    r.bleu,       r.al,          r.laal,
                          r.start_offset, r.end_offset, r.n_instances, r.n_failures};
  });
}

emma_status emma_report_write(const emma_report* report, emma_report_format format,
                              const char* path) {
  return guarded([&] {
    require(report != nullptr && path != nullptr, "emma_report_write: null argument");
    emma::emit_report(report->value, to_format(format), path);
  });
}

emma_status emma_report_format_text(const emma_report* report, emma_report_format format,
                                    char* buf, size_t capacity, size_t* needed) {
  return guarded([&] {
    require(report != nullptr && needed != nullptr, "emma_report_format_text: null argument");
    const std::string text = emma::format_report(report->value, to_format(format));
    *needed = text.size();
    if (buf != nullptr && capacity > text.size()) {
      std::memcpy(buf, text.c_str(), text.size() + 1);
    }
  });
}

emma_status emma_train_config_new(emma_train_config** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = new emma_train_config{};
  });
}

void emma_train_config_free(emma_train_config* config) { delete config; }

emma_status emma_train_config_set_shape(emma_train_config* config, size_t source_len,
                                        size_t target_len, size_t vocab, size_t state_dim,
                                        size_t heads) {
  return guarded([&] {
    require(config != nullptr, "null config");
    auto& c = config->value;
    c.source_len = source_len;
    c.target_len = target_len;
    c.vocab = vocab;
    c.state_dim = state_dim;
    c.heads = heads;
  });
}

emma_status emma_train_config_set_schedule(emma_train_config* config, size_t steps,
                                           double learning_rate, uint64_t seed) {
  return guarded([&] {
    require(config != nullptr, "null config");
    config->value.steps = steps;
    config->value.learning_rate = learning_rate;
    config->value.seed = seed;
  });
}

emma_status emma_train_config_add_setting(emma_train_config* config, double latency,
                                          double variance) {
  return guarded([&] {
    require(config != nullptr, "null config");
    require(latency >= 0.0 && variance >= 0.0, "loss weights must be non-negative");
    config->value.settings.push_back({latency, variance});
  });
}

emma_status emma_train(const emma_train_config* config, emma_train_report** out) {
  return guarded([&] {
    require(config != nullptr && out != nullptr, "emma_train: null argument");
    *out = new emma_train_report{emma::train_toy_policy(config->value)};
  });
}

void emma_train_report_free(emma_train_report* report) { delete report; }

size_t emma_train_report_runs(const emma_train_report* report) {
  return report == nullptr ? 0 : report->value.runs.size();
}

emma_status emma_train_report_summary(const emma_train_report* report, size_t index,
                                      emma_train_summary* out) {
  return guarded([&] {
    require(report != nullptr && out != nullptr, "null argument");
    if (index >= report->value.runs.size()) {
      emma::fail(emma::ErrorKind::kLookup, "emma_train_report_summary: index " +
                                               std::to_string(index) + " out of range");
    }
    const auto& run = report->value.runs[index];
    *out = emma_train_summary{run.weights.latency,        run.weights.variance,
                              run.initial.loss,           run.final_terms.loss,
                              run.final_terms.nll,        run.final_terms.mean_delay,
                              run.final_terms.mean_variance};
  });
}

emma_status emma_train_report_write(const emma_train_report* report, const char* path) {
  return guarded([&] {
    require(report != nullptr && path != nullptr, "null argument");
    emma::write_text_file(path, emma::format_training_report(report->value));
  });
}

emma_status emma_alignment_parallel(const double* p, size_t target_len, size_t source_len,
                                    double* alpha) {
  return guarded([&] {
    copy_out(emma::alignment_parallel(matrix_from(p, target_len, source_len)), alpha);
  });
}

emma_status emma_alignment_recursive(const double* p, size_t target_len, size_t source_len,
                                     double* alpha) {
  return guarded([&] {
    copy_out(emma::alignment_recursive(matrix_from(p, target_len, source_len)), alpha);
  });
}

emma_status emma_beta_parallel(const double* alpha, const double* energies, size_t target_len,
                               size_t source_len, double* beta) {
  return guarded([&] {
    copy_out(emma::beta_parallel(matrix_from(alpha, target_len, source_len),
                                 matrix_from(energies, target_len, source_len)),
             beta);
  });
}

emma_status emma_average_lagging(const double* delays, size_t count, double source_len,
                                 size_t ref_len, double* out) {
  return guarded([&] {
    require(out != nullptr && (delays != nullptr || count == 0), "null argument");
    *out = emma::average_lagging(std::span<const double>(delays, count), source_len, ref_len);
  });
}

emma_status emma_length_adaptive_average_lagging(const double* delays, size_t count,
                                                 double source_len, size_t ref_len, double* out) {
  return guarded([&] {
    require(out != nullptr && (delays != nullptr || count == 0), "null argument");
    *out = emma::length_adaptive_average_lagging(std::span<const double>(delays, count),
                                                 source_len, ref_len, count);
  });
}

}  // extern "C"
