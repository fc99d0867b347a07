/*
 * C interface to the Bezier-simplex multi-objective optimization library.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_destroy function. Every fallible call returns a bmo_status; on
 * failure bmo_last_error() describes the problem. The message buffer is
 * thread-local and stays valid until the next failing call on the same thread.
 *
 * Matrices are passed row-major. Strings returned through char** out
 * parameters are heap allocated and must be released with bmo_string_free.
 */
#ifndef BMO_BMO_H
#define BMO_BMO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(BMO_BUILDING_LIBRARY)
#    define BMO_API __declspec(dllexport)
#  else
#    define BMO_API __declspec(dllimport)
#  endif
#else
#  define BMO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bmo_status {
  BMO_OK = 0,
  BMO_ERR_INVALID_ARGUMENT = 1, /* null handle, bad buffer size */
  BMO_ERR_DOMAIN = 2,           /* precondition or dimension violation */
  BMO_ERR_CONFIG = 3,           /* invalid solver / experiment configuration */
  BMO_ERR_SCHEMA = 4,           /* malformed model document */
  BMO_ERR_UNSUPPORTED = 5,      /* metric needs an analytical Pareto map */
  BMO_ERR_SINGULAR = 6,         /* rank-deficient least-squares fit */
  BMO_ERR_SOLVER_ABORT = 7,     /* resampling budget exhausted */
  BMO_ERR_RUNTIME = 8           /* anything else */
} bmo_status;

typedef struct bmo_problem bmo_problem;
typedef struct bmo_model bmo_model;
typedef struct bmo_run bmo_run;

/* ---- library ---------------------------------------------------------- */

BMO_API const char* bmo_version(void);
BMO_API const char* bmo_status_name(bmo_status status);
BMO_API const char* bmo_last_error(void);
BMO_API void bmo_string_free(char* s);
BMO_API void bmo_buffer_free(double* p);

/* Derived 64-bit seed of trial `index` under `root`. */
BMO_API uint64_t bmo_trial_seed(uint64_t root, uint64_t index);

/* ---- weights ---------------------------------------------------------- */

/* n x M row-major weights drawn uniformly from the simplex. */
BMO_API bmo_status bmo_sample_simplex(size_t M, size_t n, uint64_t seed, double* out);

/* `count` deterministic triangular-lattice weights, count x M row-major. */
BMO_API bmo_status bmo_lattice_weights(size_t M, size_t count, double* out);

/* |N^M_D| = binomial(D + M - 1, M - 1). */
BMO_API bmo_status bmo_control_point_count(size_t M, size_t D, size_t* out);

/* ---- problems --------------------------------------------------------- */

/* Registry names: scaled-med, skew-3med, skew-3mmd, skew-med:M, skew-mmd:M. */
BMO_API bmo_status bmo_problem_create(const char* name, bmo_problem** out);
BMO_API void bmo_problem_destroy(bmo_problem* problem);
BMO_API const char* bmo_problem_name(const bmo_problem* problem);
BMO_API size_t bmo_problem_num_objectives(const bmo_problem* problem);
BMO_API size_t bmo_problem_dimension(const bmo_problem* problem);
BMO_API int bmo_problem_has_pareto_map(const bmo_problem* problem);

BMO_API bmo_status bmo_problem_evaluate(const bmo_problem* problem, const double* x, size_t L, double* f, size_t M);
/* M x L row-major. */
BMO_API bmo_status bmo_problem_jacobian(const bmo_problem* problem, const double* x, size_t L, double* jac,
                                        size_t M);
BMO_API bmo_status bmo_problem_pareto_map(const bmo_problem* problem, const double* t, size_t M, double* x,
                                          size_t L);

/* ---- models ----------------------------------------------------------- */

BMO_API bmo_status bmo_model_zero(size_t M, size_t D, size_t L, bmo_model** out);
/* control_points: |N^M_D| x L row-major, rows in canonical order. */
BMO_API bmo_status bmo_model_create(size_t M, size_t D, size_t L, const double* control_points, bmo_model** out);
BMO_API bmo_status bmo_model_from_json(const char* json, bmo_model** out);
/* meta_json may be NULL; otherwise it must be a JSON value stored under "meta". */
BMO_API bmo_status bmo_model_to_json(const bmo_model* model, const char* meta_json, char** out);
BMO_API void bmo_model_destroy(bmo_model* model);

BMO_API size_t bmo_model_num_objectives(const bmo_model* model);
BMO_API size_t bmo_model_degree(const bmo_model* model);
BMO_API size_t bmo_model_dimension(const bmo_model* model);
BMO_API size_t bmo_model_num_control_points(const bmo_model* model);
BMO_API bmo_status bmo_model_control_points(const bmo_model* model, double* out, size_t len);

BMO_API bmo_status bmo_model_evaluate(const bmo_model* model, const double* t, size_t M, double* x, size_t L);

/* Least-squares fit of a degree-D model to N pairs (ts: N x M, xs: N x L). */
BMO_API bmo_status bmo_model_fit(size_t M, size_t D, size_t L, size_t N, const double* ts, const double* xs,
                                 bmo_model** out);

/* ---- solver ----------------------------------------------------------- */

typedef enum bmo_algorithm {
  BMO_SURFACE_GD = 0, /* closed-form control-point update */
  BMO_GENERIC_GD = 1  /* generic step-and-refit loop with the gradient step rule */
} bmo_algorithm;

typedef struct bmo_solver_config {
  size_t samples;          /* N */
  size_t iterations;       /* K */
  size_t degree;           /* D */
  const char* schedule;    /* "harmonic" or "constant:<alpha>"; NULL = harmonic */
  uint64_t seed;
  size_t resample_retries;
  int record_weights;
  bmo_algorithm algorithm;
  const bmo_model* initial; /* NULL = zero control points */
} bmo_solver_config;

/* N=30, K=1000, D=3, harmonic schedule, seed 0, 5 retries, surface GD. */
BMO_API void bmo_solver_config_init(bmo_solver_config* config);

/* Validates the config against the problem without running anything. */
BMO_API bmo_status bmo_solver_config_check(const bmo_problem* problem, const bmo_solver_config* config);
BMO_API bmo_status bmo_solve(const bmo_problem* problem, const bmo_solver_config* config, bmo_run** out);
BMO_API void bmo_run_destroy(bmo_run* run);
/* A copy of the final model; destroy it separately. */
BMO_API bmo_status bmo_run_model(const bmo_run* run, bmo_model** out);
BMO_API bmo_status bmo_run_trace_json(const bmo_run* run, char** out);
/* Summary of the per-iteration bound checks in the run's trace, as JSON. */
BMO_API bmo_status bmo_run_lemma_json(const bmo_run* run, char** out);
BMO_API double bmo_run_wall_seconds(const bmo_run* run);

/* ---- metrics ---------------------------------------------------------- */

BMO_API bmo_status bmo_loss(const bmo_model* model, const bmo_problem* problem, const double* t, size_t M,
                            double* out);
BMO_API bmo_status bmo_mse(const bmo_model* model, const bmo_problem* problem, size_t n, uint64_t seed,
                           double* out);
/* X: nx x dim, Y: ny x dim, row-major. */
BMO_API bmo_status bmo_gd(const double* X, size_t nx, const double* Y, size_t ny, size_t dim, double* out);
BMO_API bmo_status bmo_igd(const double* X, size_t nx, const double* Y, size_t ny, size_t dim, double* out);

/* Model evaluated at n uniform weights: weights_out n x M, points_out n x L (either may be NULL). */
BMO_API bmo_status bmo_model_sample(const bmo_model* model, size_t n, uint64_t seed, double* weights_out,
                                    double* points_out);

typedef struct bmo_sweep_options {
  double tolerance;
  size_t max_steps;
  double initial_step;
  double decay;
  size_t threads;
} bmo_sweep_options;

/* tolerance 1e-8, max_steps 1e5, initial_step 0.1, decay 100, 1 thread. */
BMO_API void bmo_sweep_options_init(bmo_sweep_options* options);

/* Scalarization sweep over `count` weights (count x M row-major). points_out gets
 * count x L minimizers, converged_out (may be NULL) a 0/1 flag per weight. */
BMO_API bmo_status bmo_scalarization_sweep(const bmo_problem* problem, const double* weights, size_t count,
                                           const bmo_sweep_options* options, double* points_out,
                                           int* converged_out);

/* ---- diagnostics ------------------------------------------------------ */

/* JSON array of perturbation reports (surface GD only; config->algorithm is ignored). */
BMO_API bmo_status bmo_perturbation_experiment(const bmo_problem* problem, const bmo_solver_config* config,
                                               size_t k, size_t repeats, size_t threads, char** out_json);

/* JSON generalization-gap report for one training run. */
BMO_API bmo_status bmo_generalization_gap(const bmo_problem* problem, const bmo_solver_config* config,
                                          size_t holdout, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* BMO_BMO_H */
