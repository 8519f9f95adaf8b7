#ifndef MOPAL_KKT_HPP
#define MOPAL_KKT_HPP

#include <stdexcept>

#include "mopal/merit.hpp"
#include "mopal/types.hpp"

namespace mopal {

/// Signature (n+, n-, n0) of a symmetric factorization. A well-posed saddle
/// point system has (nt, ne+ni, 0).
struct Inertia {
  int positive = 0;
  int negative = 0;
  int zero = 0;

  bool operator==(const Inertia&) const = default;
};

/// Assembled symmetric saddle system
///   [ H      gx^T   (P hx)^T ] [dx]   [ -(grad f + gx^T y + hx^T Pz) ]
///   [ gx     -mu I     0     ] [dy] = [ mu (y - ye) - g              ]
///   [ P hx    0      -mu I   ] [dz]   [ mu z - max(h + mu ze, 0)     ]
/// where P masks rows outside the active set. Inactive rows carry only the
/// -mu diagonal, so their multipliers are driven to zero: z_i + dz_i = 0.
/// The dual right-hand blocks are the stationarity residuals of the
/// primal-dual merit, so its minimizers are exactly the fixed points.
struct KktSystem {
  Matrix mat;        // (nt+ne+ni)^2, symmetric by construction
  Vector rhs;
  ActiveSet active;  // ni
  double primal_reg = 0.0;  // inertia-correction shift applied to the H block
  int nt = 0;
  int ne = 0;
  int ni = 0;

  int size() const { return nt + ne + ni; }
};

/// Primal-dual Newton direction.
struct Step {
  Tangent dx;
  Vector dy;
  Vector dz;

  Vector stacked() const;
};

/// Raised when no primal shift up to delta_max produces the (nt, ne+ni, 0)
/// signature; carries the last signature seen.
class KktDegenerateError : public std::runtime_error {
public:
  explicit KktDegenerateError(Inertia last)
      : std::runtime_error("KKT degenerate"), inertia(last) {}
  Inertia inertia;
};

KktSystem assembleKkt(const Matrix& H, const Tangent& cost_grad, const Matrix& gx,
                      const Matrix& hx, const Vector& g, const Vector& h,
                      const Multipliers& mult, const Multipliers& est, double mu);

/// Solves an assembled system by dense Bunch-Kaufman factorization with
/// inertia correction: the H block is shifted by delta*I, delta escalating
/// geometrically, until the signature is (nt, ne+ni, 0) and one round of
/// iterative refinement meets |mat_shifted*s - rhs|_inf <= 1e-9*(1+|rhs|_inf).
/// sys.primal_reg records the final shift. Stateful: remembers the last
/// successful shift to seed the next correction.
class KktSolver {
public:
  Step solve(KktSystem& sys);

  const Inertia& lastInertia() const { return inertia_; }
  double lastResidual() const { return residual_; }

  static constexpr double kDeltaInit = 1e-10;
  static constexpr double kDeltaSeed = 1e-6;  // times last successful shift
  static constexpr double kDeltaGrowth = 8.0;
  static constexpr double kDeltaMax = 1e8;
  static constexpr double kResidualTol = 1e-9;

private:
  Inertia inertia_;
  double residual_ = 0.0;
  double last_success_reg_ = 0.0;
};

} // namespace mopal

#endif
