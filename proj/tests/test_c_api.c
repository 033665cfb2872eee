/* Exercises the shared library through its C header only. */
#include "nsinterf/nsinterf.h"

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static void test_errors(void) {
  nsi_kpi* kpi = NULL;
  EXPECT(nsi_kpi_read("/nonexistent/file.csv", &kpi) == NSI_ERR_IO);
  EXPECT(kpi == NULL);
  EXPECT(strlen(nsi_last_error()) > 0);
  EXPECT(nsi_kpi_read(NULL, &kpi) == NSI_ERR_INVALID_ARGUMENT);
  EXPECT(strcmp(nsi_status_name(NSI_ERR_PARSE), "parse error") == 0);

  nsi_variant v;
  EXPECT(nsi_parse_variant("fa-max", &v) == NSI_OK && v == NSI_VARIANT_MAX_PCC_SRCC);
  EXPECT(nsi_parse_variant("nope", &v) == NSI_ERR_INVALID_ARGUMENT);

  nsi_sim_config* cfg = NULL;
  EXPECT(nsi_sim_config_scenario(3, 300, 0.3, 0.1, 1, &cfg) == NSI_ERR_INVALID_ARGUMENT);
  EXPECT(nsi_sim_config_scenario(1, 300, 1.5, 0.1, 1, &cfg) == NSI_ERR_INVALID_ARGUMENT);
  nsi_sim_config_free(NULL);
  nsi_report_free(NULL);
}

static void test_detect_and_score(void) {
  nsi_sim_config* cfg = NULL;
  EXPECT(nsi_sim_config_scenario(2, 700, 0.3, 0.1, 1, &cfg) == NSI_OK);
  int n = 0, r = 0, t = 0;
  uint64_t seed = 0;
  EXPECT(nsi_sim_config_info(cfg, &n, &r, &t, &seed) == NSI_OK);
  EXPECT(n == 20 && r == 6 && t == 700 && seed == 1);

  nsi_sim_output* sim = NULL;
  EXPECT(nsi_simulate(cfg, &sim) == NSI_OK);
  int periods = 0, slices = 0, resources = 0;
  EXPECT(nsi_sim_output_dims(sim, &periods, &slices, &resources) == NSI_OK);
  EXPECT(periods == 700 && slices == 20 && resources == 6);

  nsi_detector* det = NULL;
  EXPECT(nsi_detector_new(&det) == NSI_OK);
  EXPECT(nsi_detector_set_theta(det, 0.0) == NSI_ERR_INVALID_ARGUMENT);
  EXPECT(nsi_detector_set_intermediates(det, 1) == NSI_OK);

  nsi_report* rep = NULL;
  EXPECT(nsi_detect(det, nsi_sim_output_measurements(sim), &rep) == NSI_OK);
  nsi_scorecard card;
  EXPECT(nsi_evaluate(nsi_sim_output_truth(sim), rep, &card) == NSI_OK);
  EXPECT(card.covered_fraction >= card.exact_fraction);
  EXPECT(card.exact_fraction > 0.5);
  EXPECT(card.has_stage1);

  int est_rows = 0, est_cols = 0;
  EXPECT(nsi_assignment_dims(nsi_report_estimate(rep), &est_rows, &est_cols) == NSI_OK);
  EXPECT(est_rows == card.estimated_count && est_cols == 20);
  uint8_t small[4];
  EXPECT(nsi_assignment_entries(nsi_report_estimate(rep), small, sizeof small) == NSI_ERR_OUT_OF_RANGE);

  nsi_report_free(rep);
  nsi_detector_free(det);
  nsi_sim_output_free(sim);
  nsi_sim_config_free(cfg);
}

static void test_arrays(void) {
  /* Two slices rising together and one falling. */
  double values[3 * 6];
  for (int k = 0; k < 6; ++k) {
    values[3 * k + 0] = k;
    values[3 * k + 1] = 2.0 * k + 1.0;
    values[3 * k + 2] = 10.0 - k;
  }
  nsi_kpi* kpi = NULL;
  EXPECT(nsi_kpi_from_array(values, 6, 3, &kpi) == NSI_OK);
  int p = 0, s = 0;
  EXPECT(nsi_kpi_dims(kpi, &p, &s) == NSI_OK && p == 6 && s == 3);
  values[0] = NAN;
  nsi_kpi* bad = NULL;
  EXPECT(nsi_kpi_from_array(values, 6, 3, &bad) == NSI_ERR_INVALID_ARGUMENT);
  nsi_kpi_free(kpi);

  const uint8_t nested[] = {1, 1, 1, 1, 1, 0};
  const uint8_t top[] = {1, 1, 1};
  nsi_assignment* truth = NULL;
  nsi_assignment* wide = NULL;
  EXPECT(nsi_assignment_from_array(nested, 2, 3, &truth) == NSI_OK);
  uint8_t back[6];
  EXPECT(nsi_assignment_entries(truth, back, sizeof back) == NSI_OK);
  EXPECT(memcmp(back, nested, 6) == 0);
  EXPECT(nsi_assignment_from_array(top, 1, 3, &wide) == NSI_OK);
  const uint8_t two[] = {2, 0, 1};
  nsi_assignment* invalid = NULL;
  EXPECT(nsi_assignment_from_array(two, 1, 3, &invalid) == NSI_ERR_INVALID_ARGUMENT);
  nsi_assignment_free(truth);
  nsi_assignment_free(wide);
}

static void test_sweep(void) {
  nsi_sweep* sweep = NULL;
  EXPECT(nsi_sweep_load("/nonexistent.sweep", 0, 0, &sweep) == NSI_ERR_IO);
}

int main(void) {
  test_errors();
  test_detect_and_score();
  test_arrays();
  test_sweep();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("c api: all checks passed\n");
  return 0;
}
