/* C-language client of the public API. */
#include "lagstab/lagstab.h"

#include <math.h>
#include <stdio.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                                   \
  do {                                                                 \
    if (!(cond)) {                                                     \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                      \
    }                                                                  \
  } while (0)

int main(void) {
  const double T[4] = {1.0, 0.0, 0.0, 0.0};
  lagstab_chart* chart = NULL;
  EXPECT(lagstab_chart_builtin("grim_reaper", &chart) == LAGSTAB_OK);
  EXPECT(lagstab_chart_dim(chart) == 2);
  EXPECT(lagstab_chart_ambient_dim(chart) == 4);

  const double u[2] = {1.0471975511965976, 0.5}; /* pi/3 */
  double pos[4];
  EXPECT(lagstab_chart_eval(chart, u, 2, pos, 4) == LAGSTAB_OK);
  EXPECT(fabs(pos[0] - log(2.0)) < 1e-14);

  const double outside[2] = {2.0, 0.0};
  EXPECT(lagstab_chart_eval(chart, outside, 2, pos, 4) == LAGSTAB_E_DOMAIN);
  EXPECT(strlen(lagstab_last_error()) > 0);
  EXPECT(lagstab_chart_eval(chart, u, 2, pos, 2) == LAGSTAB_E_INVALID_ARGUMENT);

  double residual = -1.0, defect = -1.0;
  EXPECT(lagstab_soliton_residual(chart, T, 4, 20, &residual, &defect) == LAGSTAB_OK);
  EXPECT(residual >= 0.0 && residual <= 1e-10);
  EXPECT(defect <= 1e-12);
  EXPECT(lagstab_soliton_residual(chart, T, 3, 20, &residual, &defect) ==
         LAGSTAB_E_INVALID_ARGUMENT);

  lagstab_variation* var = NULL;
  EXPECT(lagstab_variation_random(chart, 1, 1, 40, &var) == LAGSTAB_OK);
  lagstab_second_variation_report rep;
  EXPECT(lagstab_second_variation(chart, T, 4, var, 40, 8, 1, &rep) == LAGSTAB_OK);
  EXPECT(rep.Fpp_square >= 0.0);
  EXPECT(rep.max_pairwise_rel_diff <= 1e-6);
  EXPECT(rep.fd_rel_diff <= 1e-4);
  lagstab_variation_free(var);

  lagstab_chart* pert = NULL;
  EXPECT(lagstab_chart_from_config("{\"chart\": \"perturbed_grim_reaper\"}", &pert) == LAGSTAB_OK);
  EXPECT(lagstab_variation_random(pert, 1, 1, 40, &var) == LAGSTAB_OK);
  EXPECT(lagstab_second_variation(pert, T, 4, var, 10, 4, 1, &rep) == LAGSTAB_E_PRECONDITION);
  lagstab_variation_free(var);
  lagstab_chart_free(pert);

  lagstab_chart* none = NULL;
  EXPECT(lagstab_chart_builtin("nope", &none) == LAGSTAB_E_CONFIG);
  EXPECT(none == NULL);
  EXPECT(lagstab_chart_from_config("{", &none) == LAGSTAB_E_CONFIG);

  double lambda = 0.0;
  int iterations = 0;
  EXPECT(lagstab_dirichlet_gap(2000, &lambda, &iterations) == LAGSTAB_OK);
  EXPECT(fabs(lambda - 1.0) <= 1e-3);
  EXPECT(lagstab_dirichlet_gap(10, &lambda, &iterations) == LAGSTAB_E_INVALID_ARGUMENT);

  int exit_code = -1;
  char* report = NULL;
  EXPECT(lagstab_run_command("verify-soliton", NULL, NULL, &exit_code, &report) == LAGSTAB_OK);
  EXPECT(exit_code == 0);
  EXPECT(report != NULL && strstr(report, "max_soliton_residual") != NULL);
  lagstab_string_free(report);

  EXPECT(lagstab_run_command("verify-soliton", "{\"chart\": 3}", "", &exit_code, &report) ==
         LAGSTAB_OK);
  EXPECT(exit_code == 2);
  lagstab_string_free(report);

  EXPECT(strcmp(lagstab_status_name(LAGSTAB_E_PRECONDITION), "precondition") == 0);
  lagstab_chart_free(chart);

  if (failures) fprintf(stderr, "%d C API check(s) failed\n", failures);
  return failures ? 1 : 0;
}
