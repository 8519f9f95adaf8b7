#include <doctest.h>

#include <random>
#include <stdexcept>

#include <mopal/merit.hpp>

using namespace mopal;

namespace {

struct Instance {
  Matrix q, a, c;
  Vector lin, b, d;
  Vector x;
  Multipliers mult, est;
  double mu = 0.0;

  double f() const { return 0.5 * x.dot(q * x) + lin.dot(x); }
  Tangent fgrad() const { return q * x + lin; }
  Vector g() const { return a * x - b; }
  Vector h() const { return c * x - d; }
};

Instance randomInstance(std::mt19937& rng, int n, int ne, int ni) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto mat = [&](int r, int cc) {
    Matrix m(r, cc);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < cc; ++j) m(i, j) = gauss(rng);
    return m;
  };
  auto vec = [&](int r) {
    Vector v(r);
    for (int i = 0; i < r; ++i) v(i) = gauss(rng);
    return v;
  };

  Instance inst;
  const Matrix base = mat(n, n);
  inst.q = base.transpose() * base;
  inst.lin = vec(n);
  inst.a = mat(ne, n);
  inst.b = vec(ne);
  inst.c = mat(ni, n);
  inst.d = vec(ni);
  inst.x = vec(n);
  inst.mult = {vec(ne), vec(ni).cwiseAbs()};
  inst.est = {vec(ne), vec(ni).cwiseAbs()};
  inst.mu = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
  return inst;
}

} // namespace

TEST_CASE("augmented Lagrangian value, equalities only") {
  Vector g(1), h(0);
  g << 2.0;
  const Multipliers est{Vector::Constant(1, 1.0), Vector(0)};
  // f + |g + mu*ye|^2 / (2 mu) = 0 + (2 + 0.5)^2 / 1 = 6.25
  CHECK(alValue(0.0, g, h, est, 0.5) == doctest::Approx(6.25).epsilon(1e-15));
}

TEST_CASE("augmented Lagrangian clamps inactive inequalities") {
  Vector g(0), h(1);
  const Multipliers est{Vector(0), Vector::Constant(1, 0.2)};

  h << 0.3;  // active: h + mu*ze = 0.32
  CHECK(alValue(1.0, g, h, est, 0.1) == doctest::Approx(1.0 + 0.32 * 0.32 / 0.2));

  h << -1.0;  // inactive: h + mu*ze = -0.98 clamps to zero
  CHECK(alValue(1.0, g, h, est, 0.1) == doctest::Approx(1.0));
}

TEST_CASE("first-order multiplier update") {
  Vector g(2), h(3);
  g << 0.4, -0.2;
  h << 1.0, -5.0, 0.0;
  Multipliers est{Vector(2), Vector(3)};
  est.y << 1.0, 2.0;
  est.z << 0.5, 0.25, 0.0;

  const Multipliers fo = firstOrderMultipliers(g, h, est, 0.5);
  CHECK(fo.y(0) == doctest::Approx(1.8));   // 1 + 0.4/0.5
  CHECK(fo.y(1) == doctest::Approx(1.6));   // 2 - 0.2/0.5
  CHECK(fo.z(0) == doctest::Approx(2.5));   // 0.5 + 1/0.5
  CHECK(fo.z(1) == doctest::Approx(0.0));   // clamped at zero
  CHECK(fo.z(2) == doctest::Approx(0.0));
  CHECK((fo.z.array() >= 0.0).all());
}

TEST_CASE("active set includes the boundary") {
  Vector h(3), ze(3);
  h << -0.05, -0.051, 0.2;
  ze << 0.5, 0.5, 0.0;
  const ActiveSet active = activeSet(h, ze, 0.1);
  CHECK(active(0));        // h + mu*ze = 0 exactly
  CHECK_FALSE(active(1));  // h + mu*ze = -0.001
  CHECK(active(2));
}

TEST_CASE("primal-dual merit dominates the augmented Lagrangian") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Instance inst = randomInstance(rng, 4, 2, 3);
    const double al = alValue(inst.f(), inst.g(), inst.h(), inst.est, inst.mu);
    const double pdal =
        pdalValue(inst.f(), inst.g(), inst.h(), inst.mult, inst.est, inst.mu);
    CHECK(pdal >= al - 1e-14);

    // The proximity terms vanish exactly at the first-order update.
    const Multipliers fo = firstOrderMultipliers(inst.g(), inst.h(), inst.est, inst.mu);
    const double pdal_fo = pdalValue(inst.f(), inst.g(), inst.h(), fo, inst.est, inst.mu);
    CHECK(pdal_fo == doctest::Approx(al).epsilon(1e-13));
  }
}

TEST_CASE("dual gradient blocks vanish at the first-order update") {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const Instance inst = randomInstance(rng, 4, 2, 3);
    const Multipliers fo = firstOrderMultipliers(inst.g(), inst.h(), inst.est, inst.mu);
    const MeritGradient grad = pdalGradient(inst.fgrad(), inst.a, inst.c, inst.g(), inst.h(),
                                            fo, inst.est, inst.mu);
    CHECK(grad.y.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(grad.z.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("merit gradient matches finite differences") {
  std::mt19937 rng(13);
  const double step = 1e-7;
  int tested = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Instance inst = randomInstance(rng, 4, 2, 3);
    // Skip instances near the max(., 0) kink, where the merit is not smooth.
    const Vector shifted = inst.h() + inst.mu * inst.est.z;
    if (shifted.cwiseAbs().minCoeff() < 1e-3) continue;
    ++tested;

    const MeritGradient grad = pdalGradient(inst.fgrad(), inst.a, inst.c, inst.g(), inst.h(),
                                            inst.mult, inst.est, inst.mu);
    auto value = [&](const Vector& x, const Multipliers& mult) {
      const double f = 0.5 * x.dot(inst.q * x) + inst.lin.dot(x);
      return pdalValue(f, inst.a * x - inst.b, inst.c * x - inst.d, mult, inst.est, inst.mu);
    };

    for (int j = 0; j < inst.x.size(); ++j) {
      Vector xp = inst.x, xm = inst.x;
      xp(j) += step;
      xm(j) -= step;
      const double fd = (value(xp, inst.mult) - value(xm, inst.mult)) / (2.0 * step);
      CHECK(grad.x(j) == doctest::Approx(fd).epsilon(1e-5));
    }
    for (int j = 0; j < inst.mult.y.size(); ++j) {
      Multipliers mp = inst.mult, mm = inst.mult;
      mp.y(j) += step;
      mm.y(j) -= step;
      const double fd = (value(inst.x, mp) - value(inst.x, mm)) / (2.0 * step);
      CHECK(grad.y(j) == doctest::Approx(fd).epsilon(1e-5));
    }
    for (int j = 0; j < inst.mult.z.size(); ++j) {
      Multipliers mp = inst.mult, mm = inst.mult;
      mp.z(j) += step;
      mm.z(j) -= step;
      const double fd = (value(inst.x, mp) - value(inst.x, mm)) / (2.0 * step);
      CHECK(grad.z(j) == doctest::Approx(fd).epsilon(1e-5));
    }
  }
  CHECK(tested > 30);  // the kink filter must leave a meaningful sample
}

TEST_CASE("gradient norms") {
  MeritGradient grad;
  grad.x = Vector::Constant(2, -3.0);
  grad.y = Vector::Constant(1, 4.0);
  grad.z = Vector(0);
  CHECK(grad.squaredNorm() == doctest::Approx(9.0 + 9.0 + 16.0));
  CHECK(grad.infNorm() == doctest::Approx(4.0));
}

TEST_CASE("input validation") {
  Vector g(1), h(1);
  g << 1.0;
  h << -1.0;
  const Multipliers ok{Vector::Zero(1), Vector::Zero(1)};
  const Multipliers bad{Vector::Zero(2), Vector::Zero(1)};

  CHECK_THROWS_AS(alValue(0.0, g, h, ok, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(alValue(0.0, g, h, ok, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(alValue(0.0, g, h, bad, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(firstOrderMultipliers(g, h, bad, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(pdalValue(0.0, g, h, ok, bad, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(pdalValue(0.0, g, h, bad, ok, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(activeSet(h, Vector::Zero(2), 0.1), std::invalid_argument);
  CHECK_THROWS_AS(pdalGradient(Vector::Zero(2), Matrix::Zero(1, 2), Matrix::Zero(1, 3), g, h,
                               ok, ok, 0.1),
                  std::invalid_argument);
}
