/*
 * C interface to the laplace-asym library: higher-order Laplace expansions
 * for perturbed Laplace-type integrals, their quadrature reference values,
 * and convergence-rate experiments.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every fallible call returns a lasym_status; on failure the message is
 * available from lasym_last_error() on the calling thread. Strings returned
 * through char** are heap allocated and released with lasym_string_free.
 */
#ifndef LAPLACE_ASYM_H
#define LAPLACE_ASYM_H

#include <stddef.h>

#if defined(_WIN32)
#  define LASYM_API __declspec(dllexport)
#else
#  define LASYM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lasym_status {
  LASYM_OK = 0,
  LASYM_ERR_INVALID_ARGUMENT = 1,
  LASYM_ERR_PARSE = 2,
  LASYM_ERR_DIMENSION = 3,
  LASYM_ERR_DERIVATIVE_ORDER = 4,
  LASYM_ERR_BOUNDARY_MAXIMUM = 5,
  LASYM_ERR_NO_CONVERGENCE = 6,
  LASYM_ERR_ASSUMPTION = 7,
  LASYM_ERR_DEGENERATE = 8,
  LASYM_ERR_INSUFFICIENT_DATA = 9,
  LASYM_ERR_INTERNAL = 100
} lasym_status;

typedef enum lasym_variant {
  LASYM_VARIANT_LIMIT = 0,
  LASYM_VARIANT_PERTURBED = 1
} lasym_variant;

typedef struct lasym_quadrature_config {
  int base_order;
  int refinement_levels;
  double rel_tol;
  long long max_total_nodes;
} lasym_quadrature_config;

typedef struct lasym_problem lasym_problem;
typedef struct lasym_report lasym_report;

LASYM_API const char* lasym_version(void);
LASYM_API const char* lasym_last_error(void);
LASYM_API const char* lasym_status_name(lasym_status status);
LASYM_API void lasym_string_free(char* s);
LASYM_API void lasym_quadrature_defaults(lasym_quadrature_config* cfg);

/* Problems */
LASYM_API lasym_status lasym_problem_from_file(const char* path, lasym_problem** out);
LASYM_API lasym_status lasym_problem_from_text(const char* text, lasym_problem** out);
LASYM_API lasym_status lasym_problem_builtin(const char* name, lasym_problem** out);
LASYM_API size_t lasym_builtin_count(void);
LASYM_API const char* lasym_builtin_name(size_t index);
LASYM_API void lasym_problem_free(lasym_problem* problem);
LASYM_API int lasym_problem_dim(const lasym_problem* problem);
LASYM_API int lasym_problem_perturbed(const lasym_problem* problem);
LASYM_API lasym_status lasym_problem_format(const lasym_problem* problem, char** text);

/* Assumption verification; n must be strictly ascending. */
LASYM_API lasym_status lasym_verify(const lasym_problem* problem, const long* n, size_t count,
                                    lasym_report** out);
LASYM_API int lasym_report_hard_ok(const lasym_report* report);
/* Copies the maximizer c into `c` (capacity >= dim). */
LASYM_API lasym_status lasym_report_maximizer(const lasym_report* report, double* c, size_t capacity);
LASYM_API lasym_status lasym_report_json(const lasym_report* report, char** json);
LASYM_API void lasym_report_free(lasym_report* report);

/* Leading-order approximation exp(log_scale) * mantissa. */
LASYM_API lasym_status lasym_approx(const lasym_problem* problem, const lasym_report* report, long n,
                                    lasym_variant variant, double* log_scale, double* mantissa);

/* Quadrature reference value centered at c_n; cfg may be NULL for defaults. */
LASYM_API lasym_status lasym_oracle(const lasym_problem* problem, const lasym_report* report, long n,
                                    const lasym_quadrature_config* cfg, double* log_scale,
                                    double* mantissa, double* est_error, int* converged);

/* Experiments; results are JSON documents. */
LASYM_API lasym_status lasym_rates_json(const lasym_problem* problem, const long* n, size_t count,
                                        const lasym_quadrature_config* cfg, char** json);
LASYM_API lasym_status lasym_lemmas_json(const lasym_problem* problem, const long* n, size_t count,
                                         char** json);
LASYM_API lasym_status lasym_suite_json(const lasym_quadrature_config* cfg, char** json,
                                        int* all_passed);

/* Gaussian moments of exp(y^T A y / 2) y^beta over R^dim. */
LASYM_API lasym_status lasym_moment_diag(int dim, const double* eigenvalues, const int* beta,
                                         double* out);
LASYM_API lasym_status lasym_moment_wick(int dim, const double* matrix_row_major, const int* beta,
                                         double* out);
LASYM_API lasym_status lasym_symmetric_eigenvalues(int dim, const double* matrix_row_major,
                                                   double* ascending);

LASYM_API lasym_status lasym_exponent_q(double p, int dim, int k, double* out);
LASYM_API lasym_status lasym_make_n_list(long n_min, long n_max, int points, int geometric,
                                         long* out, size_t capacity, size_t* count);

#ifdef __cplusplus
}
#endif

#endif /* LAPLACE_ASYM_H */
