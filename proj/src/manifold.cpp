#include "mopal/manifold.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace mopal {

namespace {

using Eigen::Matrix2d;
using Eigen::Matrix3d;
using Eigen::Vector2d;
using Eigen::Vector3d;
using Eigen::Vector4d;

// Below this angle the closed-form exp/log coefficients switch to their
// Taylor expansions.
constexpr double kSmallAngle = 1e-6;

Matrix3d skew(const Vector3d& w) {
  Matrix3d s;
  s << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  return s;
}

// ---- SO(2), representation (cos, sin) ----

Vector2d so2Compose(const Vector2d& a, const Vector2d& b) {
  return {a.x() * b.x() - a.y() * b.y(), a.y() * b.x() + a.x() * b.y()};
}

double so2Log(const Vector2d& r) { return std::atan2(r.y(), r.x()); }

Vector2d so2Exp(double w) { return {std::cos(w), std::sin(w)}; }

// ---- SE(2) translation factor V(w) with exp(v) = (V(w) * lin, rot(w)) ----

Matrix2d se2V(double w) {
  double a, b;
  if (std::abs(w) < kSmallAngle) {
    a = 1.0 - w * w / 6.0;
    b = w / 2.0 - w * w * w / 24.0;
  } else {
    a = std::sin(w) / w;
    b = (1.0 - std::cos(w)) / w;
  }
  Matrix2d v;
  v << a, -b, b, a;
  return v;
}

// ---- quaternions, stored (x, y, z, w) ----

Vector4d quatMul(const Vector4d& a, const Vector4d& b) {
  Vector4d q;
  q.x() = a.w() * b.x() + a.x() * b.w() + a.y() * b.z() - a.z() * b.y();
  q.y() = a.w() * b.y() - a.x() * b.z() + a.y() * b.w() + a.z() * b.x();
  q.z() = a.w() * b.z() + a.x() * b.y() - a.y() * b.x() + a.z() * b.w();
  q.w() = a.w() * b.w() - a.x() * b.x() - a.y() * b.y() - a.z() * b.z();
  return q;
}

Vector4d quatConj(const Vector4d& q) { return {-q.x(), -q.y(), -q.z(), q.w()}; }

Vector3d quatRotate(const Vector4d& q, const Vector3d& t) {
  Vector3d u = q.head<3>();
  return t + 2.0 * u.cross(u.cross(t) + q.w() * t);
}

Vector4d quatExp(const Vector3d& w) {
  double th = w.norm();
  double f = th < kSmallAngle ? 0.5 - th * th / 48.0 : std::sin(0.5 * th) / th;
  Vector4d q;
  q.head<3>() = f * w;
  q.w() = std::cos(0.5 * th);
  return q;
}

Vector3d quatLog(Vector4d q) {
  if (q.w() < 0.0) q = -q;  // shorter geodesic
  double n = q.head<3>().norm();
  if (q.w() == 0.0) {
    // angle exactly pi: pick the sign making the first nonzero axis
    // component positive
    for (int i = 0; i < 3; ++i) {
      if (q[i] != 0.0) {
        if (q[i] < 0.0) q.head<3>() = -q.head<3>();
        break;
      }
    }
  }
  double f = n < kSmallAngle * q.w()
                 ? (2.0 / q.w()) * (1.0 - n * n / (3.0 * q.w() * q.w()))
                 : 2.0 * std::atan2(n, q.w()) / n;
  return f * q.head<3>();
}

// ---- SE(3) translation factor V(w) ----

Matrix3d se3V(const Vector3d& w) {
  double th2 = w.squaredNorm();
  double th = std::sqrt(th2);
  double c1, c2;
  if (th < kSmallAngle) {
    c1 = 0.5 - th2 / 24.0;
    c2 = 1.0 / 6.0 - th2 / 120.0;
  } else {
    c1 = (1.0 - std::cos(th)) / th2;
    c2 = (th - std::sin(th)) / (th2 * th);
  }
  Matrix3d omega = skew(w);
  return Matrix3d::Identity() + c1 * omega + c2 * omega * omega;
}

// ---- adjoint operator ad_v of the Lie algebra, (linear, angular) order ----

Matrix adjointOp(ManifoldKind kind, const Tangent& v) {
  switch (kind) {
    case ManifoldKind::SE2: {
      Matrix ad = Matrix::Zero(3, 3);
      ad(0, 1) = -v[2];
      ad(0, 2) = v[1];
      ad(1, 0) = v[2];
      ad(1, 2) = -v[0];
      return ad;
    }
    case ManifoldKind::SO3:
      return skew(v.head<3>());
    case ManifoldKind::SE3: {
      Matrix ad = Matrix::Zero(6, 6);
      ad.topLeftCorner<3, 3>() = skew(v.tail<3>());
      ad.bottomRightCorner<3, 3>() = skew(v.tail<3>());
      ad.topRightCorner<3, 3>() = skew(v.head<3>());
      return ad;
    }
    default:
      return Matrix::Zero(v.size(), v.size());
  }
}

// phi(A) = sum_k A^k/(k+1)!, so that the left Jacobian of the exponential is
// Jl(v) = phi(ad_v). Evaluated by scaling, truncated Taylor and the doubling
// identity phi(2A) = (exp(A) + I) phi(A) / 2.
Matrix phi1(Matrix a) {
  const int n = static_cast<int>(a.rows());
  int doublings = 0;
  double nrm = a.cwiseAbs().rowwise().sum().maxCoeff();
  while (nrm > 0.25) {
    a *= 0.5;
    nrm *= 0.5;
    ++doublings;
  }
  Matrix term = Matrix::Identity(n, n);  // A^k / k!
  Matrix expa = term;
  Matrix phi = term;
  for (int k = 1; k <= 13; ++k) {
    term = term * a / static_cast<double>(k);
    expa += term;
    phi += term / static_cast<double>(k + 1);
  }
  const Matrix id = Matrix::Identity(n, n);
  for (int i = 0; i < doublings; ++i) {
    phi = 0.5 * (expa + id) * phi;
    expa = expa * expa;
  }
  return phi;
}

void normalizeBlock(Point& x, int start, int len) {
  x.segment(start, len) /= x.segment(start, len).norm();
}

}  // namespace

Manifold Manifold::euclidean(int n) {
  if (n < 0) throw std::invalid_argument("manifold: negative dimension");
  return Manifold(ManifoldKind::Euclidean, n, n);
}

Manifold Manifold::so2() { return Manifold(ManifoldKind::SO2, 2, 1); }
Manifold Manifold::se2() { return Manifold(ManifoldKind::SE2, 4, 3); }
Manifold Manifold::so3() { return Manifold(ManifoldKind::SO3, 4, 3); }
Manifold Manifold::se3() { return Manifold(ManifoldKind::SE3, 7, 6); }

Manifold Manifold::product(std::vector<Manifold> parts) {
  int nrep = 0, nt = 0;
  for (const Manifold& m : parts) {
    nrep += m.ambientSize();
    nt += m.tangentSize();
  }
  Manifold p(ManifoldKind::Product, nrep, nt);
  p.parts_ = std::move(parts);
  return p;
}

Point Manifold::neutral() const {
  Point x = Point::Zero(nrep_);
  switch (kind_) {
    case ManifoldKind::Euclidean:
      break;
    case ManifoldKind::SO2:
      x[0] = 1.0;
      break;
    case ManifoldKind::SE2:
      x[2] = 1.0;
      break;
    case ManifoldKind::SO3:
      x[3] = 1.0;
      break;
    case ManifoldKind::SE3:
      x[6] = 1.0;
      break;
    case ManifoldKind::Product: {
      int off = 0;
      for (const Manifold& m : parts_) {
        x.segment(off, m.ambientSize()) = m.neutral();
        off += m.ambientSize();
      }
      break;
    }
  }
  return x;
}

Point Manifold::randomPoint(std::mt19937& rng) const {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  Point x(nrep_);
  switch (kind_) {
    case ManifoldKind::Euclidean:
      for (int i = 0; i < nrep_; ++i) x[i] = gauss(rng);
      break;
    case ManifoldKind::SO2:
      x.head<2>() = so2Exp(angle(rng));
      break;
    case ManifoldKind::SE2:
      x[0] = gauss(rng);
      x[1] = gauss(rng);
      x.segment<2>(2) = so2Exp(angle(rng));
      break;
    case ManifoldKind::SO3:
      for (int i = 0; i < 4; ++i) x[i] = gauss(rng);
      x /= x.norm();  // uniform on the unit sphere = uniform rotation
      break;
    case ManifoldKind::SE3:
      for (int i = 0; i < 7; ++i) x[i] = gauss(rng);
      normalizeBlock(x, 3, 4);
      break;
    case ManifoldKind::Product: {
      int off = 0;
      for (const Manifold& m : parts_) {
        x.segment(off, m.ambientSize()) = m.randomPoint(rng);
        off += m.ambientSize();
      }
      break;
    }
  }
  return x;
}

Point Manifold::randomPoint(unsigned seed) const {
  std::mt19937 rng(seed);
  return randomPoint(rng);
}

Point Manifold::integrate(const Point& x, const Tangent& v) const {
  if (x.size() != nrep_ || v.size() != nt_)
    throw std::invalid_argument("manifold: integrate dimension mismatch");
  Point out(nrep_);
  switch (kind_) {
    case ManifoldKind::Euclidean:
      out = x + v;
      break;
    case ManifoldKind::SO2:
      out = so2Compose(x.head<2>(), so2Exp(v[0]));
      normalizeBlock(out, 0, 2);
      break;
    case ManifoldKind::SE2: {
      Vector2d lin = se2V(v[2]) * v.head<2>();
      Matrix2d rx;
      rx << x[2], -x[3], x[3], x[2];
      out.head<2>() = x.head<2>() + rx * lin;
      out.segment<2>(2) = so2Compose(x.segment<2>(2), so2Exp(v[2]));
      normalizeBlock(out, 2, 2);
      break;
    }
    case ManifoldKind::SO3:
      out = quatMul(x.head<4>(), quatExp(v.head<3>()));
      normalizeBlock(out, 0, 4);
      break;
    case ManifoldKind::SE3: {
      Vector3d lin = se3V(v.tail<3>()) * v.head<3>();
      out.head<3>() = x.head<3>() + quatRotate(x.segment<4>(3), lin);
      out.segment<4>(3) = quatMul(x.segment<4>(3), quatExp(v.tail<3>()));
      normalizeBlock(out, 3, 4);
      break;
    }
    case ManifoldKind::Product: {
      int roff = 0, toff = 0;
      for (const Manifold& m : parts_) {
        out.segment(roff, m.ambientSize()) =
            m.integrate(x.segment(roff, m.ambientSize()), v.segment(toff, m.tangentSize()));
        roff += m.ambientSize();
        toff += m.tangentSize();
      }
      break;
    }
  }
  return out;
}

Tangent Manifold::difference(const Point& x, const Point& y) const {
  if (x.size() != nrep_ || y.size() != nrep_)
    throw std::invalid_argument("manifold: difference dimension mismatch");
  Tangent v(nt_);
  switch (kind_) {
    case ManifoldKind::Euclidean:
      v = y - x;
      break;
    case ManifoldKind::SO2:
      v[0] = so2Log(so2Compose({x[0], -x[1]}, y.head<2>()));
      break;
    case ManifoldKind::SE2: {
      Matrix2d rxt;
      rxt << x[2], x[3], -x[3], x[2];
      Vector2d t = rxt * (y.head<2>() - x.head<2>());
      double w = so2Log(so2Compose({x[2], -x[3]}, y.segment<2>(2)));
      Matrix2d vw = se2V(w);
      v.head<2>() = vw.inverse() * t;
      v[2] = w;
      break;
    }
    case ManifoldKind::SO3:
      v = quatLog(quatMul(quatConj(x.head<4>()), y.head<4>()));
      break;
    case ManifoldKind::SE3: {
      Vector4d qinv = quatConj(x.segment<4>(3));
      Vector3d t = quatRotate(qinv, Vector3d(y.head<3>() - x.head<3>()));
      Vector3d w = quatLog(quatMul(qinv, y.segment<4>(3)));
      v.head<3>() = se3V(w).inverse() * t;
      v.tail<3>() = w;
      break;
    }
    case ManifoldKind::Product: {
      int roff = 0, toff = 0;
      for (const Manifold& m : parts_) {
        v.segment(toff, m.tangentSize()) =
            m.difference(x.segment(roff, m.ambientSize()), y.segment(roff, m.ambientSize()));
        roff += m.ambientSize();
        toff += m.tangentSize();
      }
      break;
    }
  }
  return v;
}

Matrix Manifold::differenceJacobian(const Point& x, const Point& y, int argno) const {
  if (argno != 0 && argno != 1)
    throw std::invalid_argument("manifold: argno must be 0 or 1");
  if (kind_ == ManifoldKind::Euclidean) {
    Matrix jac = Matrix::Identity(nt_, nt_);
    if (argno == 0) jac = -jac;
    return jac;
  }
  if (kind_ == ManifoldKind::Product) {
    Matrix jac = Matrix::Zero(nt_, nt_);
    int roff = 0, toff = 0;
    for (const Manifold& m : parts_) {
      jac.block(toff, toff, m.tangentSize(), m.tangentSize()) = m.differenceJacobian(
          x.segment(roff, m.ambientSize()), y.segment(roff, m.ambientSize()), argno);
      roff += m.ambientSize();
      toff += m.tangentSize();
    }
    return jac;
  }
  // d log(exp(v) exp(td))/dt = Jr^{-1}(v) d and
  // d log(exp(-td) exp(v))/dt = -Jl^{-1}(v) d, with Jl(v) = phi(ad_v) and
  // Jr(v) = Jl(-v).
  const Tangent v = difference(x, y);
  const Matrix jl = phi1(adjointOp(kind_, argno == 1 ? Tangent(-v) : v));
  Matrix inv = jl.partialPivLu().solve(Matrix::Identity(nt_, nt_));
  return argno == 0 ? Matrix(-inv) : inv;
}

bool Manifold::isValid(const Point& x, double tol) const {
  if (x.size() != nrep_ || !x.allFinite()) return false;
  auto unit = [&](int start, int len) {
    return std::abs(x.segment(start, len).norm() - 1.0) <= tol;
  };
  switch (kind_) {
    case ManifoldKind::Euclidean:
      return true;
    case ManifoldKind::SO2:
      return unit(0, 2);
    case ManifoldKind::SE2:
      return unit(2, 2);
    case ManifoldKind::SO3:
      return unit(0, 4);
    case ManifoldKind::SE3:
      return unit(3, 4);
    case ManifoldKind::Product: {
      int off = 0;
      for (const Manifold& m : parts_) {
        if (!m.isValid(x.segment(off, m.ambientSize()), tol)) return false;
        off += m.ambientSize();
      }
      return true;
    }
  }
  return false;
}

} // namespace mopal
