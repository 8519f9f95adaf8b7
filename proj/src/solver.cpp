#include "mopal/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "mopal/kkt.hpp"

namespace mopal {

const char* toString(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIters: return "max_iters";
    case SolveStatus::LinesearchFail: return "linesearch_fail";
    case SolveStatus::KktDegenerate: return "kkt_degenerate";
  }
  return "unknown";
}

namespace {

double infNorm(const Vector& v) {
  return v.size() > 0 ? v.lpNorm<Eigen::Infinity>() : 0.0;
}

Residuals residualsFromParts(const Tangent& cost_grad, const Matrix& gx, const Matrix& hx,
                             const Vector& g, const Vector& h, const Multipliers& mult) {
  Residuals r;
  r.dual = infNorm(cost_grad + gx.transpose() * mult.y + hx.transpose() * mult.z);
  r.prim = std::max(infNorm(g), infNorm(h.cwiseMax(0.0)));
  r.comp = infNorm(mult.z.cwiseMin(-h));
  return r;
}

Matrix hessianModel(const Problem& p, const Point& x, const Multipliers& mult,
                    HessianMode mode) {
  const int nt = p.tangentSize();
  const Cost& cost = p.cost();
  if (mode == HessianMode::Exact && cost.hasHessian()) {
    Matrix H = cost.hessian(x, mult.y, mult.z);
    if (H.rows() != nt || H.cols() != nt)
      throw std::runtime_error("solver: hessian callback shape mismatch");
    return H;
  }
  if (mode != HessianMode::Identity && cost.hasResiduals()) {
    const Matrix J = cost.residualJacobian(x);
    return J.transpose() * J;
  }
  return Matrix::Identity(nt, nt);
}

Vector clampVector(const Vector& v, double lo, double hi) {
  return v.cwiseMax(lo).cwiseMin(hi);
}

void validateSettings(const SolverSettings& s) {
  const bool ok = s.tol_abs > 0.0 && s.mu_init > 0.0 && s.mu_factor > 0.0 &&
                  s.mu_factor < 1.0 && s.mu_min > 0.0 && s.inner_tol_init > 0.0 &&
                  s.inner_tol_exponent > 0.0 && s.feas_tol_factor > 0.0 && s.max_outer > 0 &&
                  s.max_inner_total > 0 && s.dual_bound > 0.0;
  if (!ok) throw std::invalid_argument("solver: invalid settings");
}

} // namespace

Residuals computeResiduals(const Problem& p, const Point& x, const Multipliers& mult) {
  if (mult.y.size() != p.numEqualities() || mult.z.size() != p.numInequalities())
    throw std::invalid_argument("residuals: multiplier size mismatch");
  const auto [g, h] = p.evalResiduals(x);
  const auto [gx, hx] = p.evalJacobians(x);
  return residualsFromParts(p.cost().gradient(x), gx, hx, g, h, mult);
}

Solver::Solver(SolverSettings settings) : settings_(std::move(settings)) {
  validateSettings(settings_);
}

SolveResult Solver::solve(const Problem& p, const Point& x0, const Multipliers* warm) const {
  const auto t_start = std::chrono::steady_clock::now();
  const SolverSettings& s = settings_;
  const int ne = p.numEqualities();
  const int ni = p.numInequalities();

  if (!p.manifold().isValid(x0, 1e-9))
    throw std::invalid_argument("solver: x0 is not a valid manifold point");
  if (warm && (warm->y.size() != ne || warm->z.size() != ni))
    throw std::invalid_argument("solver: warm-start multiplier size mismatch");

  SolveResult result;
  result.x = x0;
  result.mult = warm ? Multipliers{clampVector(warm->y, -s.dual_bound, s.dual_bound),
                                   clampVector(warm->z, 0.0, s.dual_bound)}
                     : Multipliers::zero(ne, ni);
  Multipliers est = result.mult;

  double mu = std::max(s.mu_init, s.mu_min);
  double omega = s.inner_tol_init * std::pow(mu, s.inner_tol_exponent);
  double eta = s.feas_tol_factor * std::pow(mu, 0.1);

  KktSolver kkt;
  int total_inner = 0;
  bool done = false;
  Residuals res;

  for (int k = 0; k < s.max_outer && !done; ++k) {
    int inner_count = 0;
    double alpha_last = 0.0;
    double merit = 0.0;
    bool ls_failed = false;
    Vector g, h;

    while (true) {
      const double f = p.cost().value(result.x);
      const Tangent cost_grad = p.cost().gradient(result.x);
      std::tie(g, h) = p.evalResiduals(result.x);
      const auto [gx, hx] = p.evalJacobians(result.x);

      res = residualsFromParts(cost_grad, gx, hx, g, h, result.mult);
      merit = pdalValue(f, g, h, result.mult, est, mu);
      if (res.max() <= s.tol_abs) {
        result.status = SolveStatus::Converged;
        done = true;
        break;
      }

      const MeritGradient grad =
          pdalGradient(cost_grad, gx, hx, g, h, result.mult, est, mu);
      if (grad.infNorm() <= omega) break;

      if (total_inner >= s.max_inner_total) {
        result.status = SolveStatus::MaxIters;
        done = true;
        break;
      }

      const Matrix H = hessianModel(p, result.x, result.mult, s.hessian_mode);
      KktSystem sys = assembleKkt(H, cost_grad, gx, hx, g, h, result.mult, est, mu);
      Step step;
      try {
        step = kkt.solve(sys);
      } catch (const KktDegenerateError&) {
        result.status = SolveStatus::KktDegenerate;
        done = true;
        break;
      }

      const LinesearchResult ls = search(p, result.x, result.mult, est, mu, step, s.linesearch);
      ++inner_count;
      ++total_inner;
      if (ls.status == LinesearchStatus::Failed) {
        ls_failed = true;
        break;
      }
      result.x = ls.x;
      result.mult = ls.mult;
      alpha_last = ls.alpha;
    }

    TraceRow row{k, mu, res.prim, res.dual, res.comp, merit, alpha_last, inner_count};
    result.trace.push_back(row);
    if (sink_) sink_(row);
    if (done) break;

    if (ls_failed) {
      if (mu <= s.mu_min) {
        result.status = SolveStatus::LinesearchFail;
        break;
      }
      mu = std::max(mu * s.mu_factor, s.mu_min);
      omega = s.inner_tol_init * std::pow(mu, s.inner_tol_exponent);
      eta = s.feas_tol_factor * std::pow(mu, 0.1);
    } else if (res.prim <= eta) {
      const Multipliers fo = firstOrderMultipliers(g, h, est, mu);
      est.y = clampVector(fo.y, -s.dual_bound, s.dual_bound);
      est.z = clampVector(fo.z, 0.0, s.dual_bound);
      result.mult = est;
      omega *= mu;
      eta *= std::pow(mu, 0.9);
    } else {
      mu = std::max(mu * s.mu_factor, s.mu_min);
      omega = s.inner_tol_init * std::pow(mu, s.inner_tol_exponent);
      eta = s.feas_tol_factor * std::pow(mu, 0.1);
    }
  }

  // Recompute at the returned iterate: multiplier acceptance at an outer
  // boundary changes the duals after `res` was last evaluated.
  res = computeResiduals(p, result.x, result.mult);
  result.prim_res = res.prim;
  result.dual_res = res.dual;
  result.comp_res = res.comp;
  result.outer_iters = static_cast<int>(result.trace.size());
  result.inner_iters = total_inner;
  result.time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
          .count();
  return result;
}

} // namespace mopal
