#ifndef MOPAL_SOLVER_HPP
#define MOPAL_SOLVER_HPP

#include <functional>
#include <vector>

#include "mopal/linesearch.hpp"
#include "mopal/merit.hpp"
#include "mopal/problem.hpp"
#include "mopal/types.hpp"

namespace mopal {

enum class SolveStatus { Converged, MaxIters, LinesearchFail, KktDegenerate };

enum class HessianMode {
  Exact,        // Lagrangian-Hessian callback; falls back to Gauss-Newton, then identity
  GaussNewton,  // J^T J from the cost's residual structure; identity if absent
  Identity,
};

struct SolverSettings {
  double tol_abs = 1e-4;   // absolute tolerance on all three KKT residuals
  double mu_init = 1e-2;
  double mu_factor = 0.1;  // penalty shrink on rejected outer iterations
  double mu_min = 1e-9;
  double inner_tol_init = 1.0;      // omega0: inner tolerance scale
  double inner_tol_exponent = 1.0;  // omega resets to omega0 * mu^exponent
  double feas_tol_factor = 0.1;     // eta0: feasibility tolerance scale
  int max_outer = 50;
  int max_inner_total = 1000;  // inner-iteration budget for the whole solve
  double dual_bound = 1e6;     // clamp on accepted multiplier estimates
  HessianMode hessian_mode = HessianMode::Exact;
  LinesearchSettings linesearch;
};

/// One row per outer iteration.
struct TraceRow {
  int k = 0;
  double mu = 0.0;
  double prim = 0.0;
  double dual = 0.0;
  double comp = 0.0;
  double merit = 0.0;
  double alpha = 0.0;  // last accepted step length in this outer iteration
  int inner_iters = 0;
};

struct Residuals {
  double prim = 0.0;  // max(|g|_inf, |max(h,0)|_inf)
  double dual = 0.0;  // |grad f + gx^T y + hx^T z|_inf
  double comp = 0.0;  // |min(z, -h)|_inf elementwise

  double max() const { return std::max(prim, std::max(dual, comp)); }
};

struct SolveResult {
  SolveStatus status = SolveStatus::MaxIters;
  Point x;
  Multipliers mult;
  double prim_res = 0.0;
  double dual_res = 0.0;
  double comp_res = 0.0;
  std::vector<TraceRow> trace;
  int outer_iters = 0;
  int inner_iters = 0;
  double time_ms = 0.0;
};

const char* toString(SolveStatus status);

Residuals computeResiduals(const Problem& p, const Point& x, const Multipliers& mult);

/// Augmented-Lagrangian solver: inner loop minimizes the primal-dual merit
/// by inertia-corrected Newton steps with Armijo backtracking; the outer loop
/// accepts first-order multiplier updates when primal feasibility beats the
/// current threshold and tightens the penalty otherwise (LANCELOT-style
/// schedule).
class Solver {
public:
  using TraceSink = std::function<void(const TraceRow&)>;

  explicit Solver(SolverSettings settings = {});

  SolveResult solve(const Problem& p, const Point& x0,
                    const Multipliers* warm = nullptr) const;

  /// Optional callback invoked once per outer iteration, as rows are traced.
  void setTraceSink(TraceSink sink) { sink_ = std::move(sink); }

  const SolverSettings& settings() const { return settings_; }

private:
  SolverSettings settings_;
  TraceSink sink_;
};

} // namespace mopal

#endif
