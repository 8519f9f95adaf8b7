/* C interface to the augmented-Lagrangian solver library.
 *
 * All functions return MOPAL_OK (0) on success or a nonzero error code; the
 * message for the most recent failure on the calling thread is available via
 * mopal_last_error(). Handles are opaque and owned by the caller through the
 * matching _destroy function.
 */
#ifndef MOPAL_MOPAL_H
#define MOPAL_MOPAL_H

#ifdef __cplusplus
extern "C" {
#endif

enum {
  MOPAL_OK = 0,
  MOPAL_ERR_INVALID_ARGUMENT = 1,
  MOPAL_ERR_UNKNOWN_PROBLEM = 2,
  MOPAL_ERR_RUNTIME = 3,
};

enum {
  MOPAL_HESSIAN_EXACT = 0,
  MOPAL_HESSIAN_GAUSS_NEWTON = 1,
  MOPAL_HESSIAN_IDENTITY = 2,
};

enum {
  MOPAL_STATUS_CONVERGED = 0,
  MOPAL_STATUS_MAX_ITERS = 1,
  MOPAL_STATUS_LINESEARCH_FAIL = 2,
  MOPAL_STATUS_KKT_DEGENERATE = 3,
};

typedef struct mopal_problem mopal_problem;
typedef struct mopal_result mopal_result;

typedef struct mopal_settings {
  double tol_abs;
  double mu_init;
  double mu_factor;
  double mu_min;
  double inner_tol_init;
  double inner_tol_exponent;
  double feas_tol_factor;
  int max_outer;
  int max_inner_total;
  double dual_bound;
  int hessian_mode; /* MOPAL_HESSIAN_* */
  double armijo_c1;
  double backtrack;
  double alpha_min;
} mopal_settings;

typedef struct mopal_trace_row {
  int k;
  double mu;
  double prim;
  double dual;
  double comp;
  double merit;
  double alpha;
  int inner_iters;
} mopal_trace_row;

void mopal_settings_default(mopal_settings* out);

/* Message for the most recent failing call on this thread; never NULL. */
const char* mopal_last_error(void);

/* ---- built-in problem catalog ---- */

int mopal_catalog_size(void);
/* Name at position `index`, or NULL when out of range. */
const char* mopal_catalog_name(int index);

int mopal_problem_create(const char* name, mopal_problem** out);

/* ---- custom problems on R^n ----
 *
 * Jacobians and the Hessian are written row-major. The Hessian callback
 * receives the current constraint multipliers so it can include constraint
 * curvature; pass NULL to fall back to an identity model.
 */
typedef double (*mopal_cost_value_fn)(const double* x, int n, void* user);
typedef void (*mopal_cost_gradient_fn)(const double* x, int n, double* grad, void* user);
typedef void (*mopal_cost_hessian_fn)(const double* x, int n, const double* y, int ny,
                                      const double* z, int nz, double* hess, void* user);
typedef void (*mopal_constraint_value_fn)(const double* x, int n, double* value, void* user);
typedef void (*mopal_constraint_jacobian_fn)(const double* x, int n, double* jac, void* user);

int mopal_problem_create_custom(int n, mopal_cost_value_fn value,
                                mopal_cost_gradient_fn gradient,
                                mopal_cost_hessian_fn hessian_or_null, void* user,
                                mopal_problem** out);
/* is_equality != 0 adds rows of g(x) = 0, otherwise rows of h(x) <= 0.
 * Only valid on handles from mopal_problem_create_custom, before solving. */
int mopal_problem_add_constraint(mopal_problem* p, int is_equality, int dim,
                                 mopal_constraint_value_fn value,
                                 mopal_constraint_jacobian_fn jacobian, void* user);

void mopal_problem_destroy(mopal_problem* p);

/* ---- problem queries ---- */

int mopal_problem_dim(const mopal_problem* p);         /* length of a point */
int mopal_problem_tangent_dim(const mopal_problem* p); /* length of a step */
int mopal_problem_num_eq(const mopal_problem* p);
int mopal_problem_num_ineq(const mopal_problem* p);
/* Copies the default start into x (len must equal mopal_problem_dim). */
int mopal_problem_default_start(const mopal_problem* p, double* x, int len);

/* Finite-difference check of all derivative callbacks at x (NULL for the
 * default start). *pass is 1/0; *max_error the worst relative mismatch. */
int mopal_problem_check_derivatives(const mopal_problem* p, const double* x, int x_len,
                                    double tol, int* pass, double* max_error);

/* ---- solving ---- */

/* x0 NULL uses the default start; y0/z0 NULL start the duals at zero;
 * settings NULL uses defaults. On success *out owns the result. */
int mopal_solve(const mopal_problem* p, const double* x0, int x0_len, const double* y0,
                int y0_len, const double* z0, int z0_len, const mopal_settings* settings,
                mopal_result** out);

void mopal_result_destroy(mopal_result* r);

int mopal_result_status(const mopal_result* r);
const char* mopal_result_status_string(const mopal_result* r);
int mopal_result_x_size(const mopal_result* r);
int mopal_result_x(const mopal_result* r, double* out, int len);
int mopal_result_y_size(const mopal_result* r);
int mopal_result_y(const mopal_result* r, double* out, int len);
int mopal_result_z_size(const mopal_result* r);
int mopal_result_z(const mopal_result* r, double* out, int len);
int mopal_result_residuals(const mopal_result* r, double* prim, double* dual, double* comp);
int mopal_result_outer_iters(const mopal_result* r);
int mopal_result_inner_iters(const mopal_result* r);
double mopal_result_time_ms(const mopal_result* r);
int mopal_result_trace_size(const mopal_result* r);
int mopal_result_trace_row(const mopal_result* r, int index, mopal_trace_row* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MOPAL_MOPAL_H */
