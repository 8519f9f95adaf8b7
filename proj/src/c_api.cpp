#include "mopal/mopal.h"

#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "mopal/probset.hpp"
#include "mopal/solver.hpp"

namespace {

thread_local std::string g_last_error;

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return g_last_error.find("unknown problem") == 0 ? MOPAL_ERR_UNKNOWN_PROBLEM
                                                     : MOPAL_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MOPAL_ERR_RUNTIME;
  }
}

int fail(int code, const char* message) {
  g_last_error = message;
  return code;
}

mopal::SolverSettings toSettings(const mopal_settings& s) {
  mopal::SolverSettings out;
  out.tol_abs = s.tol_abs;
  out.mu_init = s.mu_init;
  out.mu_factor = s.mu_factor;
  out.mu_min = s.mu_min;
  out.inner_tol_init = s.inner_tol_init;
  out.inner_tol_exponent = s.inner_tol_exponent;
  out.feas_tol_factor = s.feas_tol_factor;
  out.max_outer = s.max_outer;
  out.max_inner_total = s.max_inner_total;
  out.dual_bound = s.dual_bound;
  switch (s.hessian_mode) {
    case MOPAL_HESSIAN_EXACT: out.hessian_mode = mopal::HessianMode::Exact; break;
    case MOPAL_HESSIAN_GAUSS_NEWTON: out.hessian_mode = mopal::HessianMode::GaussNewton; break;
    case MOPAL_HESSIAN_IDENTITY: out.hessian_mode = mopal::HessianMode::Identity; break;
    default: throw std::invalid_argument("settings: unknown hessian_mode");
  }
  out.linesearch.armijo_c1 = s.armijo_c1;
  out.linesearch.backtrack = s.backtrack;
  out.linesearch.alpha_min = s.alpha_min;
  return out;
}

int copyVector(const mopal::Vector& v, double* out, int len) {
  if (!out || len != v.size()) return fail(MOPAL_ERR_INVALID_ARGUMENT, "bad output buffer size");
  std::memcpy(out, v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
  return MOPAL_OK;
}

struct CustomConstraint {
  bool is_equality = false;
  int dim = 0;
  mopal_constraint_value_fn value = nullptr;
  mopal_constraint_jacobian_fn jacobian = nullptr;
  void* user = nullptr;
};

} // namespace

struct mopal_problem {
  // Catalog path
  std::shared_ptr<mopal::Problem> problem;
  mopal::Point x0;

  // Custom-problem builder state; materialized into `problem` on first use
  bool is_custom = false;
  int n = 0;
  mopal_cost_value_fn value_fn = nullptr;
  mopal_cost_gradient_fn gradient_fn = nullptr;
  mopal_cost_hessian_fn hessian_fn = nullptr;
  void* user = nullptr;
  std::vector<CustomConstraint> constraints;

  const mopal::Problem& get() const {
    if (!problem) const_cast<mopal_problem*>(this)->materialize();
    return *problem;
  }

  void materialize() {
    const int dim = n;
    auto* vf = value_fn;
    auto* gf = gradient_fn;
    auto* hf = hessian_fn;
    void* u = user;
    mopal::FunctionalCost::HessianFn hess;
    if (hf) {
      hess = [dim, hf, u](const mopal::Point& x, const mopal::Vector& y,
                          const mopal::Vector& z) {
        mopal::Matrix rm(dim, dim);
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> buf(dim, dim);
        hf(x.data(), dim, y.data(), static_cast<int>(y.size()), z.data(),
           static_cast<int>(z.size()), buf.data(), u);
        rm = buf;
        return rm;
      };
    }
    auto cost = std::make_shared<mopal::FunctionalCost>(
        [dim, vf, u](const mopal::Point& x) { return vf(x.data(), dim, u); },
        [dim, gf, u](const mopal::Point& x) {
          mopal::Tangent g(dim);
          gf(x.data(), dim, g.data(), u);
          return g;
        },
        std::move(hess));
    std::vector<std::shared_ptr<mopal::ConstraintBlock>> blocks;
    for (const CustomConstraint& c : constraints) {
      blocks.push_back(std::make_shared<mopal::FunctionalConstraint>(
          c.is_equality ? mopal::ConstraintKind::Equality : mopal::ConstraintKind::Inequality,
          c.dim,
          [c, dim](const mopal::Point& x) {
            mopal::Vector v(c.dim);
            c.value(x.data(), dim, v.data(), c.user);
            return v;
          },
          [c, dim](const mopal::Point& x) {
            Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> buf(c.dim,
                                                                                       dim);
            c.jacobian(x.data(), dim, buf.data(), c.user);
            return mopal::Matrix(buf);
          }));
    }
    problem = std::make_shared<mopal::Problem>(mopal::Manifold::euclidean(dim),
                                               std::move(cost), std::move(blocks));
  }
};

struct mopal_result {
  mopal::SolveResult result;
};

extern "C" {

void mopal_settings_default(mopal_settings* out) {
  if (!out) return;
  const mopal::SolverSettings d;
  out->tol_abs = d.tol_abs;
  out->mu_init = d.mu_init;
  out->mu_factor = d.mu_factor;
  out->mu_min = d.mu_min;
  out->inner_tol_init = d.inner_tol_init;
  out->inner_tol_exponent = d.inner_tol_exponent;
  out->feas_tol_factor = d.feas_tol_factor;
  out->max_outer = d.max_outer;
  out->max_inner_total = d.max_inner_total;
  out->dual_bound = d.dual_bound;
  out->hessian_mode = MOPAL_HESSIAN_EXACT;
  out->armijo_c1 = d.linesearch.armijo_c1;
  out->backtrack = d.linesearch.backtrack;
  out->alpha_min = d.linesearch.alpha_min;
}

const char* mopal_last_error(void) { return g_last_error.c_str(); }

int mopal_catalog_size(void) { return static_cast<int>(mopal::catalogNames().size()); }

const char* mopal_catalog_name(int index) {
  const auto& names = mopal::catalogNames();
  if (index < 0 || index >= static_cast<int>(names.size())) return nullptr;
  return names[static_cast<std::size_t>(index)].c_str();
}

int mopal_problem_create(const char* name, mopal_problem** out) {
  if (!name || !out) return fail(MOPAL_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    mopal::NamedProblem np = mopal::buildProblem(name);
    auto* handle = new mopal_problem;
    handle->problem = std::move(np.problem);
    handle->x0 = std::move(np.x0);
    *out = handle;
    return MOPAL_OK;
  });
}

int mopal_problem_create_custom(int n, mopal_cost_value_fn value,
                                mopal_cost_gradient_fn gradient,
                                mopal_cost_hessian_fn hessian_or_null, void* user,
                                mopal_problem** out) {
  if (!out || !value || !gradient) return fail(MOPAL_ERR_INVALID_ARGUMENT, "null argument");
  if (n <= 0) return fail(MOPAL_ERR_INVALID_ARGUMENT, "dimension must be positive");
  auto* handle = new mopal_problem;
  handle->is_custom = true;
  handle->n = n;
  handle->value_fn = value;
  handle->gradient_fn = gradient;
  handle->hessian_fn = hessian_or_null;
  handle->user = user;
  handle->x0 = mopal::Point::Zero(n);
  *out = handle;
  return MOPAL_OK;
}

int mopal_problem_add_constraint(mopal_problem* p, int is_equality, int dim,
                                 mopal_constraint_value_fn value,
                                 mopal_constraint_jacobian_fn jacobian, void* user) {
  if (!p || !value || !jacobian) return fail(MOPAL_ERR_INVALID_ARGUMENT, "null argument");
  if (!p->is_custom)
    return fail(MOPAL_ERR_INVALID_ARGUMENT, "constraints can only be added to custom problems");
  if (p->problem)
    return fail(MOPAL_ERR_INVALID_ARGUMENT, "problem already in use; add constraints first");
  if (dim <= 0) return fail(MOPAL_ERR_INVALID_ARGUMENT, "constraint dim must be positive");
  p->constraints.push_back({is_equality != 0, dim, value, jacobian, user});
  return MOPAL_OK;
}

void mopal_problem_destroy(mopal_problem* p) { delete p; }

int mopal_problem_dim(const mopal_problem* p) {
  return p ? p->get().manifold().ambientSize() : 0;
}

int mopal_problem_tangent_dim(const mopal_problem* p) { return p ? p->get().tangentSize() : 0; }

int mopal_problem_num_eq(const mopal_problem* p) { return p ? p->get().numEqualities() : 0; }

int mopal_problem_num_ineq(const mopal_problem* p) {
  return p ? p->get().numInequalities() : 0;
}

int mopal_problem_default_start(const mopal_problem* p, double* x, int len) {
  if (!p) return fail(MOPAL_ERR_INVALID_ARGUMENT, "null problem");
  return copyVector(p->x0, x, len);
}

int mopal_problem_check_derivatives(const mopal_problem* p, const double* x, int x_len,
                                    double tol, int* pass, double* max_error) {
  if (!p || !pass || !max_error) return fail(MOPAL_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    mopal::Point at = p->x0;
    if (x) {
      if (x_len != at.size()) throw std::invalid_argument("x length mismatch");
      at = Eigen::Map<const mopal::Vector>(x, x_len);
    }
    const mopal::DerivativeCheckReport report = p->get().checkDerivatives(at, 1e-6, tol);
    *pass = report.pass ? 1 : 0;
    *max_error = report.max_error;
    return MOPAL_OK;
  });
}

int mopal_solve(const mopal_problem* p, const double* x0, int x0_len, const double* y0,
                int y0_len, const double* z0, int z0_len, const mopal_settings* settings,
                mopal_result** out) {
  if (!p || !out) return fail(MOPAL_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const mopal::Problem& problem = p->get();
    mopal::Point start = p->x0;
    if (x0) {
      if (x0_len != start.size()) throw std::invalid_argument("x0 length mismatch");
      start = Eigen::Map<const mopal::Vector>(x0, x0_len);
    }
    mopal::Multipliers warm =
        mopal::Multipliers::zero(problem.numEqualities(), problem.numInequalities());
    if (y0) {
      if (y0_len != warm.y.size()) throw std::invalid_argument("y0 length mismatch");
      warm.y = Eigen::Map<const mopal::Vector>(y0, y0_len);
    }
    if (z0) {
      if (z0_len != warm.z.size()) throw std::invalid_argument("z0 length mismatch");
      warm.z = Eigen::Map<const mopal::Vector>(z0, z0_len);
    }
    mopal_settings def;
    mopal_settings_default(&def);
    const mopal::Solver solver(toSettings(settings ? *settings : def));
    auto* handle = new mopal_result;
    handle->result = solver.solve(problem, start, (y0 || z0) ? &warm : nullptr);
    *out = handle;
    return MOPAL_OK;
  });
}

void mopal_result_destroy(mopal_result* r) { delete r; }

int mopal_result_status(const mopal_result* r) {
  if (!r) return -1;
  switch (r->result.status) {
    case mopal::SolveStatus::Converged: return MOPAL_STATUS_CONVERGED;
    case mopal::SolveStatus::MaxIters: return MOPAL_STATUS_MAX_ITERS;
    case mopal::SolveStatus::LinesearchFail: return MOPAL_STATUS_LINESEARCH_FAIL;
    case mopal::SolveStatus::KktDegenerate: return MOPAL_STATUS_KKT_DEGENERATE;
  }
  return -1;
}

const char* mopal_result_status_string(const mopal_result* r) {
  return r ? mopal::toString(r->result.status) : "";
}

int mopal_result_x_size(const mopal_result* r) {
  return r ? static_cast<int>(r->result.x.size()) : 0;
}

int mopal_result_x(const mopal_result* r, double* out, int len) {
  if (!r) return fail(MOPAL_ERR_INVALID_ARGUMENT, "null result");
  return copyVector(r->result.x, out, len);
}

int mopal_result_y_size(const mopal_result* r) {
  return r ? static_cast<int>(r->result.mult.y.size()) : 0;
}

int mopal_result_y(const mopal_result* r, double* out, int len) {
  if (!r) return fail(MOPAL_ERR_INVALID_ARGUMENT, "null result");
  return copyVector(r->result.mult.y, out, len);
}

int mopal_result_z_size(const mopal_result* r) {
  return r ? static_cast<int>(r->result.mult.z.size()) : 0;
}

int mopal_result_z(const mopal_result* r, double* out, int len) {
  if (!r) return fail(MOPAL_ERR_INVALID_ARGUMENT, "null result");
  return copyVector(r->result.mult.z, out, len);
}

int mopal_result_residuals(const mopal_result* r, double* prim, double* dual, double* comp) {
  if (!r || !prim || !dual || !comp) return fail(MOPAL_ERR_INVALID_ARGUMENT, "null argument");
  *prim = r->result.prim_res;
  *dual = r->result.dual_res;
  *comp = r->result.comp_res;
  return MOPAL_OK;
}

int mopal_result_outer_iters(const mopal_result* r) { return r ? r->result.outer_iters : 0; }

int mopal_result_inner_iters(const mopal_result* r) { return r ? r->result.inner_iters : 0; }

double mopal_result_time_ms(const mopal_result* r) { return r ? r->result.time_ms : 0.0; }

int mopal_result_trace_size(const mopal_result* r) {
  return r ? static_cast<int>(r->result.trace.size()) : 0;
}

int mopal_result_trace_row(const mopal_result* r, int index, mopal_trace_row* out) {
  if (!r || !out) return fail(MOPAL_ERR_INVALID_ARGUMENT, "null argument");
  if (index < 0 || index >= static_cast<int>(r->result.trace.size()))
    return fail(MOPAL_ERR_INVALID_ARGUMENT, "trace index out of range");
  const mopal::TraceRow& row = r->result.trace[static_cast<std::size_t>(index)];
  out->k = row.k;
  out->mu = row.mu;
  out->prim = row.prim;
  out->dual = row.dual;
  out->comp = row.comp;
  out->merit = row.merit;
  out->alpha = row.alpha;
  out->inner_iters = row.inner_iters;
  return MOPAL_OK;
}

} // extern "C"
