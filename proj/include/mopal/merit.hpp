#ifndef MOPAL_MERIT_HPP
#define MOPAL_MERIT_HPP

#include "mopal/types.hpp"

namespace mopal {

/// Lagrange multipliers (y for equalities, z >= 0 for inequalities).
struct Multipliers {
  Vector y;
  Vector z;

  static Multipliers zero(int ne, int ni) { return {Vector::Zero(ne), Vector::Zero(ni)}; }
};

using ActiveSet = Eigen::Array<bool, Eigen::Dynamic, 1>;

/// Row i is active iff h_i + mu * ze_i >= 0 (boundary rows count as active).
ActiveSet activeSet(const Vector& h, const Vector& ze, double mu);

/// Augmented Lagrangian
///   f + 1/(2mu) |g + mu*ye|^2 + 1/(2mu) |max(h + mu*ze, 0)|^2
/// evaluated from precomputed constraint values.
double alValue(double f, const Vector& g, const Vector& h, const Multipliers& est, double mu);

/// First-order multiplier update: y = ye + g/mu, z = max(ze + h/mu, 0).
/// These are the minimizers of the primal-dual merit in (y, z).
Multipliers firstOrderMultipliers(const Vector& g, const Vector& h, const Multipliers& est,
                                  double mu);

/// Primal-dual merit: the augmented Lagrangian plus proximity penalties
///   1/(2mu) |g + mu*(ye - y)|^2 + 1/(2mu) |max(h + mu*ze, 0) - mu*z|^2
/// tying the dual iterate (y, z) to the first-order update.
double pdalValue(double f, const Vector& g, const Vector& h, const Multipliers& mult,
                 const Multipliers& est, double mu);

struct MeritGradient {
  Tangent x;  // tangent-space gradient
  Vector y;
  Vector z;

  double squaredNorm() const { return x.squaredNorm() + y.squaredNorm() + z.squaredNorm(); }
  double infNorm() const;
};

/// Gradient of the primal-dual merit in (x, y, z). Inequality rows outside
/// the active set do not contribute to the x component.
MeritGradient pdalGradient(const Tangent& cost_grad, const Matrix& gx, const Matrix& hx,
                           const Vector& g, const Vector& h, const Multipliers& mult,
                           const Multipliers& est, double mu);

} // namespace mopal

#endif
