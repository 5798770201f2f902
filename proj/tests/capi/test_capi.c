/* Copyright 2026 The EMMA-Sim Authors
 * SPDX-License-Identifier: Apache-2.0 */

/* Exercises the shared library through its C header only. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "emma/emma.h"

static int failures = 0;

#define EXPECT(cond)                                             \
  do {                                                           \
    if (!(cond)) {                                               \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                \
    }                                                            \
  } while (0)

static void test_numerics(void) {
  const double p[6] = {0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
  double a[6];
  double b[6];
  double beta[6];
  const double e[6] = {1, 1, 1, 1, 1, 1};
  size_t k;
  double al = 0.0;
  const double delays[4] = {1, 2, 3, 4};

  EXPECT(emma_alignment_parallel(p, 2, 3, a) == EMMA_OK);
  EXPECT(emma_alignment_recursive(p, 2, 3, b) == EMMA_OK);
  for (k = 0; k < 6; ++k) EXPECT(fabs(a[k] - b[k]) < 1e-12);
  EXPECT(fabs(a[0] - 0.5) < 1e-12 && fabs(a[1] - 0.25) < 1e-12);
  EXPECT(emma_beta_parallel(a, e, 2, 3, beta) == EMMA_OK);

  EXPECT(emma_average_lagging(delays, 4, 4.0, 2, &al) == EMMA_OK);
  EXPECT(fabs(al + 0.5) < 1e-12);
  EXPECT(emma_length_adaptive_average_lagging(delays, 4, 4.0, 2, &al) == EMMA_OK);
  EXPECT(fabs(al - 1.0) < 1e-12);

  EXPECT(emma_alignment_parallel(NULL, 2, 3, a) == EMMA_ERR_ARGUMENT);
  EXPECT(strlen(emma_last_error()) > 0);
  EXPECT(emma_average_lagging(delays, 0, 4.0, 2, &al) == EMMA_ERR_ARGUMENT);
}

static void test_corpus(const char* manifest_path) {
  emma_manifest* m = NULL;
  emma_report* r = NULL;
  emma_sweep_row row;
  double sweep[8];
  size_t count = 0;
  size_t needed = 0;
  char* text;

  EXPECT(emma_manifest_load("/nonexistent/manifest.json", &m) == EMMA_ERR_IO);
  EXPECT(m == NULL);
  EXPECT(emma_manifest_load(manifest_path, &m) == EMMA_OK);
  if (m == NULL) return;
  EXPECT(emma_manifest_set_threshold(m, 1.5) == EMMA_ERR_ARGUMENT);
  EXPECT(emma_manifest_sweep(m, sweep, 8, &count) == EMMA_OK);
  EXPECT(count == 4);

  EXPECT(emma_evaluate(m, &r) == EMMA_OK);
  EXPECT(emma_report_rows(r) == 1);
  EXPECT(emma_report_row(r, 0, &row) == EMMA_OK);
  EXPECT(fabs(row.bleu - 100.0) < 1e-9);
  EXPECT(row.n_failures == 0);
  EXPECT(emma_report_row(r, 5, &row) == EMMA_ERR_LOOKUP);
  emma_report_free(r);
  r = NULL;

  EXPECT(emma_sweep(m, sweep, count, &r) == EMMA_OK);
  EXPECT(emma_report_rows(r) == 4);
  EXPECT(emma_report_format_text(r, EMMA_FORMAT_CSV, NULL, 0, &needed) == EMMA_OK);
  text = (char*)malloc(needed + 1);
  EXPECT(emma_report_format_text(r, EMMA_FORMAT_CSV, text, needed + 1, &needed) == EMMA_OK);
  EXPECT(strncmp(text, "threshold,bleu,al,laal", 22) == 0);
  text[0] = 'x';
  EXPECT(emma_report_format_text(r, EMMA_FORMAT_CSV, text, 4, &needed) == EMMA_OK);
  EXPECT(text[0] == 'x' && needed > 4);
  free(text);
  emma_report_free(r);
  EXPECT(emma_sweep(m, sweep, 1, &r) == EMMA_ERR_ARGUMENT);
  emma_manifest_free(m);
}

static void test_training(void) {
  emma_train_config* c = NULL;
  emma_train_report* r = NULL;
  emma_train_summary s;

  EXPECT(emma_train_config_new(&c) == EMMA_OK);
  EXPECT(emma_train_config_set_schedule(c, 40, 0.1, 3) == EMMA_OK);
  EXPECT(emma_train_config_add_setting(c, 0.0, 0.0) == EMMA_OK);
  EXPECT(emma_train(c, &r) == EMMA_ERR_ARGUMENT);
  EXPECT(emma_train_config_add_setting(c, 0.5, 0.0) == EMMA_OK);
  EXPECT(emma_train(c, &r) == EMMA_OK);
  EXPECT(emma_train_report_runs(r) == 2);
  EXPECT(emma_train_report_summary(r, 0, &s) == EMMA_OK);
  EXPECT(s.final_loss < s.initial_loss);
  EXPECT(emma_train_report_summary(r, 2, &s) == EMMA_ERR_LOOKUP);
  emma_train_report_free(r);
  emma_train_config_free(c);
}

int main(int argc, char** argv) {
  if (argc < 2) {
    fprintf(stderr, "usage: %s waitk_manifest.json\n", argv[0]);
    return 2;
  }
  EXPECT(strlen(emma_version()) > 0);
  EXPECT(strcmp(emma_status_name(EMMA_ERR_IO), "") != 0);
  test_numerics();
  test_corpus(argv[1]);
  test_training();
  if (failures != 0) {
    fprintf(stderr, "%d C API check(s) failed\n", failures);
    return 1;
  }
  printf("C API checks passed\n");
  return 0;
}
