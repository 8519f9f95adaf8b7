#ifndef MOPAL_MANIFOLD_HPP
#define MOPAL_MANIFOLD_HPP

#include <random>
#include <vector>

#include "mopal/types.hpp"

namespace mopal {

/// Supported manifolds. Ambient representations:
///   Euclidean  n values
///   SO2        (cos, sin)
///   SE2        (x, y, cos, sin)
///   SO3        unit quaternion (qx, qy, qz, qw)
///   SE3        (x, y, z, qx, qy, qz, qw)
/// Tangent coordinates for SE2/SE3 are body-frame twists ordered
/// (linear, angular). Retraction is the group exponential,
/// integrate(x, v) = x * exp(v), and difference(x, y) = log(x^-1 * y).
enum class ManifoldKind { Euclidean, SO2, SE2, SO3, SE3, Product };

class Manifold {
public:
  static Manifold euclidean(int n);
  static Manifold so2();
  static Manifold se2();
  static Manifold so3();
  static Manifold se3();
  static Manifold product(std::vector<Manifold> parts);

  ManifoldKind kind() const { return kind_; }
  int ambientSize() const { return nrep_; }
  int tangentSize() const { return nt_; }
  const std::vector<Manifold>& parts() const { return parts_; }

  /// Group identity (zero vector for Euclidean).
  Point neutral() const;

  /// Valid random point; rotation parts are sampled uniformly.
  Point randomPoint(std::mt19937& rng) const;
  Point randomPoint(unsigned seed) const;

  /// x (+) v. Rotation blocks of the result are re-normalized.
  Point integrate(const Point& x, const Tangent& v) const;

  /// v with integrate(x, v) = y. On SO3/SE3 the quaternion sign is flipped
  /// to take the shorter geodesic; at rotation angle exactly pi the sign
  /// making the first nonzero axis component positive is chosen.
  Tangent difference(const Point& x, const Point& y) const;

  /// d(x (-) y)/dx (argno 0) or d(x (-) y)/dy (argno 1), nt x nt,
  /// derivatives taken through integrate-perturbations of the argument.
  Matrix differenceJacobian(const Point& x, const Point& y, int argno) const;

  /// True iff dimensions match and rotation blocks have unit norm within tol.
  bool isValid(const Point& x, double tol = 1e-12) const;

private:
  Manifold(ManifoldKind kind, int nrep, int nt) : kind_(kind), nrep_(nrep), nt_(nt) {}

  ManifoldKind kind_;
  int nrep_;
  int nt_;
  std::vector<Manifold> parts_;
};

} // namespace mopal

#endif
