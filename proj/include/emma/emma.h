/* Copyright 2026 The EMMA-Sim Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface of the EMMA simulator. Every object is an opaque handle owned
 * by the caller and released with the matching *_free function. Functions
 * return an emma_status; on failure emma_last_error() describes the most
 * recent error raised on the calling thread.
 */

#ifndef EMMA_EMMA_H_
#define EMMA_EMMA_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(EMMA_BUILDING_LIBRARY)
#define EMMA_API __declspec(dllexport)
#else
#define EMMA_API __declspec(dllimport)
#endif
#else
#define EMMA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum emma_status {
  EMMA_OK = 0,
  EMMA_ERR_ARGUMENT = 1,
  EMMA_ERR_CONFORMANCE = 2,
  EMMA_ERR_DOMAIN = 3,
  EMMA_ERR_LOOKUP = 4,
  EMMA_ERR_NUMERIC = 5,
  EMMA_ERR_PROTOCOL = 6,
  EMMA_ERR_PARSE = 7,
  EMMA_ERR_VALIDATION = 8,
  EMMA_ERR_IO = 9,
  EMMA_ERR_EMPTY_OUTPUT = 10,
  EMMA_ERR_CORPUS_FAILURE = 11,
  EMMA_ERR_INTERNAL = 99
} emma_status;

typedef enum emma_report_format { EMMA_FORMAT_CSV = 0, EMMA_FORMAT_JSON = 1 } emma_report_format;

typedef struct emma_manifest emma_manifest;
typedef struct emma_report emma_report;
typedef struct emma_train_config emma_train_config;
typedef struct emma_train_report emma_train_report;

typedef struct emma_sweep_row {
  double threshold;
  double bleu;
  double al;
  double laal;
  double start_offset;
  double end_offset;
  size_t n_instances;
  size_t n_failures;
} emma_sweep_row;

typedef struct emma_train_summary {
  double lambda_latency;
  double lambda_variance;
  double initial_loss;
  double final_loss;
  double final_nll;
  double final_mean_delay;
  double final_mean_variance;
} emma_train_summary;

EMMA_API const char* emma_version(void);
/* Thread-local; valid until the next failing call on the same thread. */
EMMA_API const char* emma_last_error(void);
EMMA_API const char* emma_status_name(emma_status status);

/* ---- Manifest ---------------------------------------------------------- */

EMMA_API emma_status emma_manifest_load(const char* path, emma_manifest** out);
EMMA_API void emma_manifest_free(emma_manifest* manifest);
EMMA_API emma_status emma_manifest_set_threshold(emma_manifest* manifest, double threshold);
EMMA_API emma_status emma_manifest_set_min_unit_chunk(emma_manifest* manifest, size_t units);
EMMA_API emma_status emma_manifest_set_chunk_ms(emma_manifest* manifest, double chunk_ms);
EMMA_API emma_status emma_manifest_set_seed(emma_manifest* manifest, uint64_t seed);
EMMA_API emma_status emma_manifest_set_workers(emma_manifest* manifest, size_t workers);
EMMA_API emma_status emma_manifest_set_trace_dir(emma_manifest* manifest, const char* dir);
/* Loss weights used when the manifest trains a toy model. */
EMMA_API emma_status emma_manifest_set_loss_weights(emma_manifest* manifest, double latency,
                                                    double variance);
/* Copies the manifest's sweep list; *count receives its length. Pass
 * thresholds = NULL to query the length only. */
EMMA_API emma_status emma_manifest_sweep(const emma_manifest* manifest, double* thresholds,
                                         size_t capacity, size_t* count);

/* ---- Evaluation -------------------------------------------------------- */

/* One row at the manifest threshold. */
EMMA_API emma_status emma_evaluate(const emma_manifest* manifest, emma_report** out);
/* One row per threshold, ascending. */
EMMA_API emma_status emma_sweep(const emma_manifest* manifest, const double* thresholds,
                                size_t count, emma_report** out);
EMMA_API void emma_report_free(emma_report* report);
EMMA_API size_t emma_report_rows(const emma_report* report);
EMMA_API emma_status emma_report_row(const emma_report* report, size_t index,
                                     emma_sweep_row* out);
EMMA_API emma_status emma_report_write(const emma_report* report, emma_report_format format,
                                       const char* path);
/* Formats into buf (NUL-terminated when it fits); *needed receives the
 * length without the terminator. */
EMMA_API emma_status emma_report_format_text(const emma_report* report, emma_report_format format,
                                             char* buf, size_t capacity, size_t* needed);

/* ---- Toy training ------------------------------------------------------ */

EMMA_API emma_status emma_train_config_new(emma_train_config** out);
EMMA_API void emma_train_config_free(emma_train_config* config);
EMMA_API emma_status emma_train_config_set_shape(emma_train_config* config, size_t source_len,
                                                 size_t target_len, size_t vocab, size_t state_dim,
                                                 size_t heads);
EMMA_API emma_status emma_train_config_set_schedule(emma_train_config* config, size_t steps,
                                                    double learning_rate, uint64_t seed);
EMMA_API emma_status emma_train_config_add_setting(emma_train_config* config, double latency,
                                                   double variance);
EMMA_API emma_status emma_train(const emma_train_config* config, emma_train_report** out);
EMMA_API void emma_train_report_free(emma_train_report* report);
EMMA_API size_t emma_train_report_runs(const emma_train_report* report);
EMMA_API emma_status emma_train_report_summary(const emma_train_report* report, size_t index,
                                               emma_train_summary* out);
EMMA_API emma_status emma_train_report_write(const emma_train_report* report, const char* path);

/* ---- Numeric kernels (row-major buffers) -------------------------------- */

/* p: target_len x source_len stepwise probabilities; alpha: same shape. */
EMMA_API emma_status emma_alignment_parallel(const double* p, size_t target_len,
                                             size_t source_len, double* alpha);
EMMA_API emma_status emma_alignment_recursive(const double* p, size_t target_len,
                                              size_t source_len, double* alpha);
/* alpha and energies: target_len x source_len; beta: same shape. */
EMMA_API emma_status emma_beta_parallel(const double* alpha, const double* energies,
                                        size_t target_len, size_t source_len, double* beta);
EMMA_API emma_status emma_average_lagging(const double* delays, size_t count, double source_len,
                                          size_t ref_len, double* out);
EMMA_API emma_status emma_length_adaptive_average_lagging(const double* delays, size_t count,
                                                          double source_len, size_t ref_len,
                                                          double* out);

#ifdef __cplusplus
}
#endif

#endif /* EMMA_EMMA_H_ */
