#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <mopal/manifold.hpp>

using namespace mopal;

namespace {

// Series-based matrix exponential (scaling and squaring), independent of the
// closed forms used by the library.
Matrix expmRef(Matrix a) {
  int squarings = 0;
  while (a.norm() > 0.25) {
    a *= 0.5;
    ++squarings;
  }
  Matrix result = Matrix::Identity(a.rows(), a.cols());
  Matrix term = result;
  for (int k = 1; k <= 24; ++k) {
    term = Matrix(term * a / static_cast<double>(k));
    result += term;
  }
  for (int i = 0; i < squarings; ++i) result = Matrix(result * result);
  return result;
}

Matrix skew3(const Vector& w) {
  Matrix s = Matrix::Zero(3, 3);
  s(0, 1) = -w(2);
  s(0, 2) = w(1);
  s(1, 0) = w(2);
  s(1, 2) = -w(0);
  s(2, 0) = -w(1);
  s(2, 1) = w(0);
  return s;
}

Matrix quatToRot(double qx, double qy, double qz, double qw) {
  Matrix r(3, 3);
  r << 1 - 2 * (qy * qy + qz * qz), 2 * (qx * qy - qz * qw), 2 * (qx * qz + qy * qw),
      2 * (qx * qy + qz * qw), 1 - 2 * (qx * qx + qz * qz), 2 * (qy * qz - qx * qw),
      2 * (qx * qz - qy * qw), 2 * (qy * qz + qx * qw), 1 - 2 * (qx * qx + qy * qy);
  return r;
}

// Homogeneous-matrix embedding of a point (sign-invariant for quaternions).
Matrix homogeneous(const Manifold& m, const Point& x) {
  switch (m.kind()) {
    case ManifoldKind::SO2: {
      Matrix g(2, 2);
      g << x(0), -x(1), x(1), x(0);
      return g;
    }
    case ManifoldKind::SE2: {
      Matrix g = Matrix::Identity(3, 3);
      g(0, 0) = x(2);
      g(0, 1) = -x(3);
      g(1, 0) = x(3);
      g(1, 1) = x(2);
      g(0, 2) = x(0);
      g(1, 2) = x(1);
      return g;
    }
    case ManifoldKind::SO3:
      return quatToRot(x(0), x(1), x(2), x(3));
    case ManifoldKind::SE3: {
      Matrix g = Matrix::Identity(4, 4);
      g.block(0, 0, 3, 3) = quatToRot(x(3), x(4), x(5), x(6));
      g.block(0, 3, 3, 1) = x.head(3);
      return g;
    }
    default:
      throw std::logic_error("no homogeneous form");
  }
}

// Matrix generator of a tangent vector (linear components before angular).
Matrix twist(const Manifold& m, const Tangent& v) {
  switch (m.kind()) {
    case ManifoldKind::SO2: {
      Matrix a = Matrix::Zero(2, 2);
      a(0, 1) = -v(0);
      a(1, 0) = v(0);
      return a;
    }
    case ManifoldKind::SE2: {
      Matrix a = Matrix::Zero(3, 3);
      a(0, 1) = -v(2);
      a(1, 0) = v(2);
      a(0, 2) = v(0);
      a(1, 2) = v(1);
      return a;
    }
    case ManifoldKind::SO3:
      return skew3(v);
    case ManifoldKind::SE3: {
      Matrix a = Matrix::Zero(4, 4);
      a.block(0, 0, 3, 3) = skew3(v.tail(3));
      a.block(0, 3, 3, 1) = v.head(3);
      return a;
    }
    default:
      throw std::logic_error("no twist form");
  }
}

Tangent randomTangent(const Manifold& m, std::mt19937& rng, double max_norm) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Tangent v(m.tangentSize());
  for (int i = 0; i < v.size(); ++i) v(i) = gauss(rng);
  const double n = v.norm();
  if (n > 0.0) v *= max_norm * std::uniform_real_distribution<double>(0.05, 1.0)(rng) / n;
  return v;
}

std::vector<Manifold> groupManifolds() {
  return {Manifold::so2(), Manifold::se2(), Manifold::so3(), Manifold::se3()};
}

std::vector<Manifold> allManifolds() {
  auto ms = groupManifolds();
  ms.push_back(Manifold::euclidean(4));
  ms.push_back(Manifold::product({Manifold::se2(), Manifold::euclidean(2), Manifold::so3()}));
  return ms;
}

} // namespace

TEST_CASE("integrate matches the series matrix exponential") {
  std::mt19937 rng(42);
  for (const Manifold& m : groupManifolds()) {
    for (int trial = 0; trial < 50; ++trial) {
      const Point x = m.randomPoint(rng);
      // Mix moderate and tiny steps so the small-angle branches are hit too.
      const double scale = (trial % 5 == 0) ? 1e-8 : 2.0;
      const Tangent v = randomTangent(m, rng, scale);
      const Point y = m.integrate(x, v);
      REQUIRE(m.isValid(y, 1e-9));
      const Matrix lhs = homogeneous(m, y);
      const Matrix rhs = homogeneous(m, x) * expmRef(twist(m, v));
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-11);
    }
  }
}

TEST_CASE("planar quarter-turn step from the identity") {
  const Manifold m = Manifold::se2();
  Tangent v(3);
  v << 1.0, 0.0, M_PI / 2.0;
  const Point y = m.integrate(m.neutral(), v);
  // Closed form: translation V(theta) * (1, 0) with theta = pi/2.
  CHECK(y(0) == doctest::Approx(2.0 / M_PI).epsilon(1e-12));
  CHECK(y(1) == doctest::Approx(2.0 / M_PI).epsilon(1e-12));
  CHECK(y(2) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(y(3) == doctest::Approx(1.0).epsilon(1e-12));
  const Matrix rhs = expmRef(twist(m, v));
  CHECK((homogeneous(m, y) - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("difference inverts integrate") {
  std::mt19937 rng(7);
  for (const Manifold& m : allManifolds()) {
    for (int trial = 0; trial < 100; ++trial) {
      const Point x = m.randomPoint(rng);
      const Tangent v = randomTangent(m, rng, 0.9);
      const Tangent u = m.difference(x, m.integrate(x, v));
      CHECK((u - v).cwiseAbs().maxCoeff() < 1e-9);

      const Point y = m.randomPoint(rng);
      const Point y2 = m.integrate(x, m.difference(x, y));
      CHECK(m.difference(y, y2).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("differenceJacobian matches central finite differences") {
  std::mt19937 rng(11);
  const double step = 1e-6;
  for (const Manifold& m : allManifolds()) {
    const int nt = m.tangentSize();
    for (int trial = 0; trial < 10; ++trial) {
      const Point x = m.randomPoint(rng);
      // Stay well away from the cut locus so the log is smooth.
      const Point y = m.integrate(x, randomTangent(m, rng, 2.0));
      for (int argno = 0; argno < 2; ++argno) {
        const Matrix jac = m.differenceJacobian(x, y, argno);
        Matrix fd(nt, nt);
        for (int j = 0; j < nt; ++j) {
          Tangent e = Tangent::Zero(nt);
          e(j) = step;
          const Point xp = argno == 0 ? m.integrate(x, e) : x;
          const Point yp = argno == 1 ? m.integrate(y, e) : y;
          e(j) = -step;
          const Point xm = argno == 0 ? m.integrate(x, e) : x;
          const Point ym = argno == 1 ? m.integrate(y, e) : y;
          fd.col(j) = (m.difference(xp, yp) - m.difference(xm, ym)) / (2.0 * step);
        }
        const double denom = std::max(1.0, jac.cwiseAbs().maxCoeff());
        CHECK((fd - jac).cwiseAbs().maxCoeff() / denom < 1e-5);
      }
    }
  }
}

TEST_CASE("product manifold concatenates its parts") {
  const Manifold a = Manifold::se2();
  const Manifold b = Manifold::euclidean(2);
  const Manifold c = Manifold::so3();
  const Manifold m = Manifold::product({a, b, c});

  CHECK(m.kind() == ManifoldKind::Product);
  CHECK(m.ambientSize() == a.ambientSize() + b.ambientSize() + c.ambientSize());
  CHECK(m.tangentSize() == a.tangentSize() + b.tangentSize() + c.tangentSize());
  REQUIRE(m.parts().size() == 3);

  std::mt19937 rng(3);
  const Point xa = a.randomPoint(rng), xb = b.randomPoint(rng), xc = c.randomPoint(rng);
  Point x(m.ambientSize());
  x << xa, xb, xc;
  REQUIRE(m.isValid(x));

  const Tangent va = randomTangent(a, rng, 1.0);
  const Tangent vb = randomTangent(b, rng, 1.0);
  const Tangent vc = randomTangent(c, rng, 1.0);
  Tangent v(m.tangentSize());
  v << va, vb, vc;

  const Point y = m.integrate(x, v);
  CHECK((y.segment(0, 4) - a.integrate(xa, va)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((y.segment(4, 2) - b.integrate(xb, vb)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((y.segment(6, 4) - c.integrate(xc, vc)).cwiseAbs().maxCoeff() < 1e-15);

  const Tangent d = m.difference(x, y);
  CHECK((d.segment(0, 3) - a.difference(xa, y.segment(0, 4))).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((d.segment(3, 2) - b.difference(xb, y.segment(4, 2))).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((d.segment(5, 3) - c.difference(xc, y.segment(6, 4))).cwiseAbs().maxCoeff() < 1e-15);

  // Block-diagonal Jacobian: parts on the diagonal, zeros elsewhere.
  const Matrix jac = m.differenceJacobian(x, y, 1);
  Matrix expect = Matrix::Zero(8, 8);
  expect.block(0, 0, 3, 3) = a.differenceJacobian(xa, y.segment(0, 4), 1);
  expect.block(3, 3, 2, 2) = b.differenceJacobian(xb, y.segment(4, 2), 1);
  expect.block(5, 5, 3, 3) = c.differenceJacobian(xc, y.segment(6, 4), 1);
  CHECK((jac - expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("neutral elements") {
  CHECK(Manifold::euclidean(3).neutral().isZero(0.0));

  Vector so2(2), se2(4), so3(4), se3(7);
  so2 << 1, 0;
  se2 << 0, 0, 1, 0;
  so3 << 0, 0, 0, 1;
  se3 << 0, 0, 0, 0, 0, 0, 1;
  CHECK(Manifold::so2().neutral() == so2);
  CHECK(Manifold::se2().neutral() == se2);
  CHECK(Manifold::so3().neutral() == so3);
  CHECK(Manifold::se3().neutral() == se3);

  for (const Manifold& m : allManifolds()) {
    const Point e = m.neutral();
    CHECK(m.isValid(e));
    CHECK((m.integrate(e, Tangent::Zero(m.tangentSize())) - e).cwiseAbs().maxCoeff() == 0.0);
    const Point x = m.randomPoint(99u);
    CHECK(m.difference(x, x).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("randomPoint produces valid points and respects seeding") {
  for (const Manifold& m : allManifolds()) {
    for (unsigned seed = 0; seed < 200; ++seed) {
      CHECK(m.isValid(m.randomPoint(seed)));
    }
    CHECK(m.randomPoint(5u) == m.randomPoint(5u));
    std::mt19937 rng(1);
    const Point p1 = m.randomPoint(rng);
    const Point p2 = m.randomPoint(rng);
    CHECK(p1 != p2);  // the generator advances between draws
  }
}

TEST_CASE("quaternion sign does not affect difference") {
  std::mt19937 rng(21);
  const Manifold so3 = Manifold::so3();
  const Manifold se3 = Manifold::se3();
  for (int trial = 0; trial < 25; ++trial) {
    {
      const Point x = so3.randomPoint(rng);
      const Point y = so3.randomPoint(rng);
      const Point yneg = -y;
      CHECK((so3.difference(x, y) - so3.difference(x, yneg)).cwiseAbs().maxCoeff() == 0.0);
    }
    {
      const Point x = se3.randomPoint(rng);
      Point y = se3.randomPoint(rng);
      Point yneg = y;
      yneg.tail(4) = -y.tail(4);
      CHECK((se3.difference(x, y) - se3.difference(x, yneg)).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("half-turn logs are deterministic") {
  const Manifold m = Manifold::so3();
  const Point e = m.neutral();

  Point y(4);
  y << 1, 0, 0, 0;  // half turn about +x: w = 0, both signs represent it
  Tangent v = m.difference(e, y);
  CHECK(v(0) == doctest::Approx(M_PI).epsilon(1e-14));
  CHECK(v.tail(2).cwiseAbs().maxCoeff() == 0.0);
  CHECK((m.difference(e, Point(-y)) - v).cwiseAbs().maxCoeff() == 0.0);

  Point z(4);
  z << 0, 0, -1, 0;  // half turn about -z; canonical sign has the axis positive
  v = m.difference(e, z);
  CHECK(v(2) == doctest::Approx(M_PI).epsilon(1e-14));
  CHECK(v.head(2).cwiseAbs().maxCoeff() == 0.0);
  CHECK((m.difference(e, Point(-z)) - v).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("argument validation") {
  const Manifold m = Manifold::se2();
  CHECK_THROWS_AS(Manifold::euclidean(-1), std::invalid_argument);
  CHECK_THROWS_AS(m.integrate(Vector::Zero(3), Vector::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(m.integrate(m.neutral(), Vector::Zero(2)), std::invalid_argument);
  CHECK_THROWS_AS(m.difference(m.neutral(), Vector::Zero(5)), std::invalid_argument);
  CHECK_THROWS_AS(m.differenceJacobian(m.neutral(), m.neutral(), 2), std::invalid_argument);

  Vector bad(4);
  bad << 0, 0, 2, 0;  // rotation block is not unit norm
  CHECK_FALSE(m.isValid(bad));
  CHECK(m.isValid(m.neutral()));
  CHECK_FALSE(Manifold::so3().isValid(Vector::Zero(4)));
  CHECK_FALSE(m.isValid(Vector::Zero(9)));
}
