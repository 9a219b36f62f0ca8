/* C interface to the lagstab verification engine.
 *
 * Every function returns a lagstab_status; on failure the message is
 * available from lagstab_last_error() (thread-local, valid until the next
 * call on the same thread). Handles are opaque and owned by the caller.
 */
#ifndef LAGSTAB_H
#define LAGSTAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LAGSTAB_API __declspec(dllexport)
#else
#define LAGSTAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lagstab_status {
  LAGSTAB_OK = 0,
  LAGSTAB_E_INVALID_ARGUMENT = 1,
  LAGSTAB_E_CONFIG = 2,
  LAGSTAB_E_DOMAIN = 3,
  LAGSTAB_E_EVALUATION = 4,
  LAGSTAB_E_IMMERSION = 5,
  LAGSTAB_E_PRECONDITION = 6,
  LAGSTAB_E_UNSUPPORTED = 7,
  LAGSTAB_E_SUPPORT = 8,
  LAGSTAB_E_CONVERGENCE = 9,
  LAGSTAB_E_INTERNAL = 10
} lagstab_status;

typedef struct lagstab_chart lagstab_chart;
typedef struct lagstab_variation lagstab_variation;

LAGSTAB_API const char* lagstab_last_error(void);
LAGSTAB_API const char* lagstab_status_name(lagstab_status status);

/* Builtin names: grim_reaper, flat_plane, perturbed_grim_reaper, non_lagrangian. */
LAGSTAB_API lagstab_status lagstab_chart_builtin(const char* name, lagstab_chart** out);
/* `config_json` is a run config (see config.hpp); its chart and chart_params are used. */
LAGSTAB_API lagstab_status lagstab_chart_from_config(const char* config_json, lagstab_chart** out);
LAGSTAB_API void lagstab_chart_free(lagstab_chart* chart);
LAGSTAB_API int lagstab_chart_dim(const lagstab_chart* chart);
LAGSTAB_API int lagstab_chart_ambient_dim(const lagstab_chart* chart);
/* position must hold ambient_dim doubles */
LAGSTAB_API lagstab_status lagstab_chart_eval(const lagstab_chart* chart, const double* u,
                                              size_t n, double* position, size_t capacity);

/* Max |T^perp - H| and max |Phi^* omega| on a per_axis^d sample of the domain. */
LAGSTAB_API lagstab_status lagstab_soliton_residual(const lagstab_chart* chart, const double* T,
                                                    size_t t_len, int per_axis,
                                                    double* residual, double* defect);

/* Seeded random variation supported on the chart's default support box:
 * theta = d(phi) when hamiltonian != 0, otherwise a generic 1-form. */
LAGSTAB_API lagstab_status lagstab_variation_random(const lagstab_chart* chart, uint64_t seed,
                                                    int hamiltonian, int cells,
                                                    lagstab_variation** out);
LAGSTAB_API void lagstab_variation_free(lagstab_variation* variation);

typedef struct lagstab_second_variation_report {
  double F;
  double first_variation;
  double Fpp_operator;
  double Fpp_divergence;
  double Fpp_square;
  double Fpp_fd;
  double scale;
  double lagrangian_defect;
  double max_pairwise_rel_diff;
  double fd_rel_diff;
  int fd_unstable;
  int closedness_warning;
} lagstab_second_variation_report;

/* All second-variation routes over the variation's support. Returns
 * LAGSTAB_E_PRECONDITION on a non-soliton chart. */
LAGSTAB_API lagstab_status lagstab_second_variation(const lagstab_chart* chart, const double* T,
                                                    size_t t_len,
                                                    const lagstab_variation* variation,
                                                    int cells, int points_per_cell, int workers,
                                                    lagstab_second_variation_report* out);

LAGSTAB_API lagstab_status lagstab_dirichlet_gap(int n, double* eigenvalue, int* iterations);

/* Runs "verify-soliton", "second-variation" or "section4". Either JSON text
 * may be NULL or empty. *report receives a malloc'd string to release with
 * lagstab_string_free. Configuration and precondition problems are reported
 * through *exit_code (2 and 3), not the status. */
LAGSTAB_API lagstab_status lagstab_run_command(const char* command, const char* config_json,
                                               const char* overrides_json, int* exit_code,
                                               char** report);
LAGSTAB_API void lagstab_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
