#include "mopal/kkt.hpp"

#include <lapacke.h>

#include <cmath>
#include <vector>

namespace mopal {

Vector Step::stacked() const {
  Vector s(dx.size() + dy.size() + dz.size());
  s << dx, dy, dz;
  return s;
}

KktSystem assembleKkt(const Matrix& H, const Tangent& cost_grad, const Matrix& gx,
                      const Matrix& hx, const Vector& g, const Vector& h,
                      const Multipliers& mult, const Multipliers& est, double mu) {
  const int nt = static_cast<int>(cost_grad.size());
  const int ne = static_cast<int>(g.size());
  const int ni = static_cast<int>(h.size());
  if (H.rows() != nt || H.cols() != nt) throw std::invalid_argument("assembleKkt: H shape");
  if (gx.rows() != ne || gx.cols() != nt) throw std::invalid_argument("assembleKkt: gx shape");
  if (hx.rows() != ni || hx.cols() != nt) throw std::invalid_argument("assembleKkt: hx shape");
  if (mult.y.size() != ne || mult.z.size() != ni || est.y.size() != ne || est.z.size() != ni)
    throw std::invalid_argument("assembleKkt: multiplier size");
  if (!(mu > 0.0)) throw std::invalid_argument("assembleKkt: mu must be positive");

  KktSystem sys;
  sys.nt = nt;
  sys.ne = ne;
  sys.ni = ni;
  sys.active = activeSet(h, est.z, mu);

  Matrix phx = hx;  // rows masked to the active set
  Vector pz = mult.z;
  for (int i = 0; i < ni; ++i)
    if (!sys.active(i)) {
      phx.row(i).setZero();
      pz(i) = 0.0;
    }

  const int n = sys.size();
  sys.mat = Matrix::Zero(n, n);
  sys.mat.topLeftCorner(nt, nt) = 0.5 * (H + H.transpose());
  sys.mat.block(nt, 0, ne, nt) = gx;
  sys.mat.block(0, nt, nt, ne) = gx.transpose();
  sys.mat.block(nt + ne, 0, ni, nt) = phx;
  sys.mat.block(0, nt + ne, nt, ni) = phx.transpose();
  sys.mat.bottomRightCorner(ne + ni, ne + ni).diagonal().setConstant(-mu);

  sys.rhs.resize(n);
  sys.rhs.head(nt) = -(cost_grad + gx.transpose() * mult.y + hx.transpose() * pz);
  sys.rhs.segment(nt, ne) = mu * (mult.y - est.y) - g;
  sys.rhs.tail(ni) = mu * mult.z - (h + mu * est.z).cwiseMax(0.0);
  return sys;
}

namespace {

// Signature of the block-diagonal D factor: 1x1 blocks by sign, 2x2 blocks
// by determinant/trace (Bunch-Kaufman 2x2 pivots are indefinite in exact
// arithmetic, classified here defensively).
Inertia factorInertia(const Matrix& fac, const std::vector<lapack_int>& ipiv) {
  Inertia in;
  const int n = static_cast<int>(fac.rows());
  auto count = [&in](double eig) {
    if (eig > 0.0)
      ++in.positive;
    else if (eig < 0.0)
      ++in.negative;
    else
      ++in.zero;
  };
  for (int k = 0; k < n; ++k) {
    if (ipiv[k] > 0) {
      count(fac(k, k));
    } else {
      const double a = fac(k, k), b = fac(k + 1, k), c = fac(k + 1, k + 1);
      const double det = a * c - b * b;
      const double tr = a + c;
      if (det < 0.0) {
        ++in.positive;
        ++in.negative;
      } else if (det > 0.0) {
        count(tr);
        count(tr);
      } else {
        count(tr);
        ++in.zero;
      }
      ++k;
    }
  }
  return in;
}

} // namespace

Step KktSolver::solve(KktSystem& sys) {
  const int n = sys.size();
  const Inertia target{sys.nt, sys.ne + sys.ni, 0};
  const double rhs_scale = 1.0 + (n > 0 ? sys.rhs.lpNorm<Eigen::Infinity>() : 0.0);

  double delta = 0.0;
  Matrix fac(n, n);
  Vector sol(n);
  std::vector<lapack_int> ipiv(static_cast<std::size_t>(std::max(n, 1)));

  while (true) {
    Matrix shifted = sys.mat;
    shifted.topLeftCorner(sys.nt, sys.nt).diagonal().array() += delta;
    bool ok = shifted.allFinite();
    if (!ok) {
      inertia_ = Inertia{0, 0, n};  // non-finite entries: nothing to factor
    } else {
      fac = shifted;
      const lapack_int info = LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', n, fac.data(),
                                             std::max(n, 1), ipiv.data());
      if (info == 0) {
        inertia_ = factorInertia(fac, ipiv);
        ok = inertia_ == target;
      } else if (info > 0) {
        inertia_ = Inertia{0, 0, 1};  // exactly singular D entry
        ok = false;
      } else {
        throw std::runtime_error("KKT solve: invalid argument to factorization");
      }
    }

    if (ok) {
      sol = sys.rhs;
      LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', n, 1, fac.data(), std::max(n, 1), ipiv.data(),
                     sol.data(), std::max(n, 1));
      Vector resid = sys.rhs - shifted * sol;
      Vector corr = resid;
      LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', n, 1, fac.data(), std::max(n, 1), ipiv.data(),
                     corr.data(), std::max(n, 1));
      sol += corr;
      resid = sys.rhs - shifted * sol;
      residual_ = n > 0 ? resid.lpNorm<Eigen::Infinity>() : 0.0;
      if (residual_ <= kResidualTol * rhs_scale) {
        sys.primal_reg = delta;
        if (delta > 0.0) last_success_reg_ = delta;
        Step step;
        step.dx = sol.head(sys.nt);
        step.dy = sol.segment(sys.nt, sys.ne);
        step.dz = sol.tail(sys.ni);
        return step;
      }
    }

    if (delta == 0.0)
      delta = last_success_reg_ > 0.0 ? std::max(kDeltaInit, kDeltaSeed * last_success_reg_)
                                      : kDeltaInit;
    else
      delta *= kDeltaGrowth;
    if (delta > kDeltaMax) throw KktDegenerateError(inertia_);
  }
}

} // namespace mopal
