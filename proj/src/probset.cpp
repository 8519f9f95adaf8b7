#include "mopal/probset.hpp"

#include <Eigen/LU>

#include <sstream>
#include <stdexcept>

namespace mopal {

namespace {

// ---------------------------------------------------------------------------
// Barycenter problems: min over x of 0.5 * sum_i |x (-) p_i|^2. Gradients are
// exact (log-map Jacobians); the Gauss-Newton model J^T J backs the solver.

Problem makeBarycenter(Manifold manifold, std::vector<Point> poses) {
  const int nt = manifold.tangentSize();
  const int m = static_cast<int>(poses.size());
  auto res = [manifold, poses, nt, m](const Point& x) {
    Vector r(m * nt);
    for (int i = 0; i < m; ++i) r.segment(i * nt, nt) = manifold.difference(x, poses[i]);
    return r;
  };
  auto jac = [manifold, poses, nt, m](const Point& x) {
    Matrix J(m * nt, nt);
    for (int i = 0; i < m; ++i)
      J.middleRows(i * nt, nt) = manifold.differenceJacobian(x, poses[i], 0);
    return J;
  };
  auto cost = std::make_shared<ResidualCost>(std::move(res), std::move(jac));
  return Problem(std::move(manifold), std::move(cost));
}

// Pose triple whose barycenter sits at (0.4, -0.3, theta = 0.7): the
// geodesic residuals at the optimum sum to zero by construction.
NamedProblem makeSe2Barycenter() {
  const Manifold se2 = Manifold::se2();
  std::vector<Point> poses(3, Point(4));
  poses[0] << 0.76246875223380073, -0.13338945652634379, 0.36235775447667362,
      0.93203908596722629;
  poses[1] << -0.3755105935150026, -0.50991227636291647, 0.76484218728448949,
      0.6442176872376898;
  poses[2] << 0.79701940844606511, -0.26103515867278948, 0.98006657784124129,
      0.19866933079506285;

  OracleSolution oracle;
  oracle.x = Point(4);
  oracle.x << 0.4, -0.3, 0.7648421872844885, 0.64421768723769102;
  oracle.mult = Multipliers::zero(0, 0);
  oracle.note = "poses constructed so the log-map residuals sum to zero at the optimum";

  NamedProblem np;
  np.name = "se2-barycenter-3";
  np.problem = std::make_shared<Problem>(makeBarycenter(se2, std::move(poses)));
  np.x0 = se2.neutral();
  np.oracle = std::move(oracle);
  return np;
}

NamedProblem makeSo3Barycenter() {
  const Manifold so3 = Manifold::so3();
  std::vector<Point> poses(3, Point(4));
  poses[0] << -0.0012571213769568279, -0.3052947823033319, 0.28014763859539721,
      0.91011582566925375;
  poses[1] << -0.26294806777596497, -0.57349527186913907, 0.034782626480188289,
      0.77508170904219409;
  poses[2] << -0.49354834387342339, -0.62216640308314874, 0.49117742962856548,
      0.35785993315521297;

  OracleSolution oracle;
  oracle.x = Point(4);
  oracle.x << -0.27515897829640312, -0.54304351703692522, 0.29394346104696467,
      0.73687754544074557;
  oracle.mult = Multipliers::zero(0, 0);
  oracle.note = "fixed-point iteration on the mean update, converged to 1e-15";

  NamedProblem np;
  np.name = "so3-barycenter-3";
  np.problem = std::make_shared<Problem>(makeBarycenter(so3, std::move(poses)));
  np.x0 = so3.neutral();
  np.oracle = std::move(oracle);
  return np;
}

// ---------------------------------------------------------------------------
// Convex QP with one equality: min 0.5 x^T Q x + q^T x  s.t.  a^T x = b.

NamedProblem makeEqQp2() {
  Matrix Q(2, 2);
  Q << 2.0, 0.5, 0.5, 1.0;
  Vector q(2);
  q << -1.0, 1.0;
  Vector a(2);
  a << 1.0, 1.0;
  const double b = 1.0;

  auto cost = std::make_shared<FunctionalCost>(
      [Q, q](const Point& x) { return 0.5 * x.dot(Q * x) + q.dot(x); },
      [Q, q](const Point& x) -> Tangent { return Q * x + q; },
      [Q](const Point&, const Vector&, const Vector&) { return Q; });
  auto eq = std::make_shared<FunctionalConstraint>(
      ConstraintKind::Equality, 1,
      [a, b](const Point& x) { return Vector::Constant(1, a.dot(x) - b); },
      [a](const Point&) -> Matrix { return a.transpose(); });

  OracleSolution oracle;
  oracle.x = Point(2);
  oracle.x << 1.25, -0.25;  // exact: (5/4, -1/4), y = -11/8
  oracle.mult = Multipliers::zero(1, 0);
  oracle.mult.y << -1.375;
  oracle.note = "closed-form solution of the 3x3 optimality system";

  NamedProblem np;
  np.name = "eq-qp-2";
  np.problem = std::make_shared<Problem>(
      Manifold::euclidean(2), std::move(cost),
      std::vector<std::shared_ptr<ConstraintBlock>>{std::move(eq)});
  np.x0 = Point::Zero(2);
  np.oracle = std::move(oracle);
  return np;
}

// min 0.5 (x-2)^2  s.t.  x <= 1: active bound with multiplier 1.
NamedProblem makeIneqQp1() {
  auto cost = std::make_shared<FunctionalCost>(
      [](const Point& x) { return 0.5 * (x(0) - 2.0) * (x(0) - 2.0); },
      [](const Point& x) { return Tangent::Constant(1, x(0) - 2.0); },
      [](const Point&, const Vector&, const Vector&) { return Matrix::Identity(1, 1); });
  auto ineq = std::make_shared<FunctionalConstraint>(
      ConstraintKind::Inequality, 1,
      [](const Point& x) { return Vector::Constant(1, x(0) - 1.0); },
      [](const Point&) { return Matrix::Identity(1, 1); });

  OracleSolution oracle;
  oracle.x = Point::Constant(1, 1.0);
  oracle.mult = Multipliers::zero(0, 1);
  oracle.mult.z << 1.0;
  oracle.note = "stationarity by hand: (x-2) + z = 0 on the active bound";

  NamedProblem np;
  np.name = "ineq-qp-1";
  np.problem = std::make_shared<Problem>(
      Manifold::euclidean(1), std::move(cost),
      std::vector<std::shared_ptr<ConstraintBlock>>{std::move(ineq)});
  np.x0 = Point::Zero(1);
  np.oracle = std::move(oracle);
  return np;
}

// min 0.5 x^2  s.t.  x <= 0: weakly active constraint, zero multiplier.
NamedProblem makeIneqQpDegenerate() {
  auto cost = std::make_shared<FunctionalCost>(
      [](const Point& x) { return 0.5 * x(0) * x(0); },
      [](const Point& x) -> Tangent { return x; },
      [](const Point&, const Vector&, const Vector&) { return Matrix::Identity(1, 1); });
  auto ineq = std::make_shared<FunctionalConstraint>(
      ConstraintKind::Inequality, 1, [](const Point& x) -> Vector { return x; },
      [](const Point&) { return Matrix::Identity(1, 1); });

  OracleSolution oracle;
  oracle.x = Point::Zero(1);
  oracle.mult = Multipliers::zero(0, 1);
  oracle.note = "unconstrained minimum lies on the boundary, so z = 0";

  NamedProblem np;
  np.name = "ineq-qp-degenerate";
  np.problem = std::make_shared<Problem>(
      Manifold::euclidean(1), std::move(cost),
      std::vector<std::shared_ptr<ConstraintBlock>>{std::move(ineq)});
  np.x0 = Point::Constant(1, 1.0);
  np.oracle = std::move(oracle);
  return np;
}

// Rosenbrock valley restricted to the unit disk: the unconstrained minimum
// (1, 1) is outside, so the solution sits on the circle.
NamedProblem makeRosenbrockBall() {
  auto cost = std::make_shared<FunctionalCost>(
      [](const Point& x) {
        const double a = 1.0 - x(0), b = x(1) - x(0) * x(0);
        return a * a + 100.0 * b * b;
      },
      [](const Point& x) {
        Tangent g(2);
        const double b = x(1) - x(0) * x(0);
        g(0) = -2.0 * (1.0 - x(0)) - 400.0 * x(0) * b;
        g(1) = 200.0 * b;
        return g;
      },
      [](const Point& x, const Vector&, const Vector& z) {
        Matrix H(2, 2);
        H(0, 0) = 2.0 - 400.0 * x(1) + 1200.0 * x(0) * x(0);
        H(0, 1) = H(1, 0) = -400.0 * x(0);
        H(1, 1) = 200.0;
        H.diagonal().array() += 2.0 * z(0);  // curvature of the disk constraint
        return H;
      });
  auto ineq = std::make_shared<FunctionalConstraint>(
      ConstraintKind::Inequality, 1,
      [](const Point& x) { return Vector::Constant(1, x.squaredNorm() - 1.0); },
      [](const Point& x) -> Matrix { return 2.0 * x.transpose(); });

  OracleSolution oracle;
  oracle.x = Point(2);
  oracle.x << 0.78641515416842778, 0.61769831252339347;  // angle 0.6658125173641715
  oracle.mult = Multipliers::zero(0, 1);
  oracle.mult.z << 0.12149655699928839;
  oracle.note = "boundary angle found by scan and polished by bisection on the tangent slope";

  NamedProblem np;
  np.name = "rosenbrock-ball";
  np.problem = std::make_shared<Problem>(
      Manifold::euclidean(2), std::move(cost),
      std::vector<std::shared_ptr<ConstraintBlock>>{std::move(ineq)});
  np.x0 = Point::Zero(2);
  np.oracle = std::move(oracle);
  return np;
}

// ---------------------------------------------------------------------------
// Direct-transcription double integrator: decision variables
// (p_1..p_N, v_1..v_N, u_0..u_{N-1}), dynamics as equalities, control bounds
// as inequalities, and a target beyond reach so the bounds saturate.

namespace di {

constexpr int kN = 20;
constexpr double kDt = 0.03;
constexpr double kUmax = 10.0;
constexpr double kWp = 400.0;
constexpr double kWv = 20.0;
constexpr double kRho = 1e-2;
constexpr double kPref = 2.0;
constexpr int kDim = 3 * kN;

inline int ip(int k) { return k - 1; }          // p_k, k = 1..N
inline int iv(int k) { return kN + k - 1; }     // v_k, k = 1..N
inline int iu(int k) { return 2 * kN + k; }     // u_k, k = 0..N-1

// Saturated bound rows at the optimum: u_k = +umax for k <= 12 (rows k) and
// u_k = -umax for k >= 14 (rows N + k).
std::vector<int> activeBounds() {
  std::vector<int> act;
  for (int k = 0; k <= 12; ++k) act.push_back(k);
  for (int k = 14; k < kN; ++k) act.push_back(kN + k);
  return act;
}

Matrix dynamicsMatrix() {
  Matrix A = Matrix::Zero(2 * kN, kDim);
  for (int k = 0; k < kN; ++k) {
    A(2 * k, ip(k + 1)) = 1.0;
    A(2 * k + 1, iv(k + 1)) = 1.0;
    A(2 * k + 1, iu(k)) = -kDt;
    if (k >= 1) {
      A(2 * k, ip(k)) = -1.0;
      A(2 * k, iv(k)) = -kDt;
      A(2 * k + 1, iv(k)) = -1.0;
    }
  }
  return A;
}

Matrix boundsMatrix() {
  Matrix C = Matrix::Zero(2 * kN, kDim);
  for (int k = 0; k < kN; ++k) {
    C(k, iu(k)) = 1.0;
    C(kN + k, iu(k)) = -1.0;
  }
  return C;
}

Matrix costHessian() {
  Matrix Q = Matrix::Zero(kDim, kDim);
  Q(ip(kN), ip(kN)) = kWp;
  Q(iv(kN), iv(kN)) = kWv;
  for (int k = 0; k < kN; ++k) Q(iu(k), iu(k)) = kRho;
  return Q;
}

Vector costLinear() {
  Vector q = Vector::Zero(kDim);
  q(ip(kN)) = -kWp * kPref;
  return q;
}

// Reference solution: equality-constrained solve with the saturated bounds
// frozen, i.e. [Q A^T Ca^T; A 0 0; Ca 0 0] (x, y, za) = (-q, 0, umax...).
OracleSolution makeOracle(const Matrix& A, const Matrix& C) {
  const std::vector<int> act = activeBounds();
  const int na = static_cast<int>(act.size());
  const int m = kDim + 2 * kN + na;

  Matrix K = Matrix::Zero(m, m);
  K.topLeftCorner(kDim, kDim) = costHessian();
  K.block(kDim, 0, 2 * kN, kDim) = A;
  K.block(0, kDim, kDim, 2 * kN) = A.transpose();
  Vector rhs = Vector::Zero(m);
  rhs.head(kDim) = -costLinear();
  for (int i = 0; i < na; ++i) {
    K.row(kDim + 2 * kN + i).head(kDim) = C.row(act[i]);
    K.col(kDim + 2 * kN + i).head(kDim) = C.row(act[i]).transpose();
    rhs(kDim + 2 * kN + i) = kUmax;
  }
  const Vector sol = K.partialPivLu().solve(rhs);

  OracleSolution oracle;
  oracle.x = sol.head(kDim);
  oracle.mult = Multipliers::zero(2 * kN, 2 * kN);
  oracle.mult.y = sol.segment(kDim, 2 * kN);
  for (int i = 0; i < na; ++i) oracle.mult.z(act[i]) = sol(kDim + 2 * kN + i);
  oracle.note = "reduced optimality system solved with the saturated bounds frozen";
  return oracle;
}

} // namespace di

NamedProblem makeDoubleIntegrator() {
  using namespace di;
  const Matrix A = dynamicsMatrix();
  const Matrix C = boundsMatrix();
  const Matrix Q = costHessian();
  const Vector q = costLinear();

  auto cost = std::make_shared<FunctionalCost>(
      [Q, q](const Point& x) {
        const double c0 = 0.5 * kWp * kPref * kPref;  // completes the square
        return 0.5 * x.dot(Q * x) + q.dot(x) + c0;
      },
      [Q, q](const Point& x) -> Tangent { return Q * x + q; },
      [Q](const Point&, const Vector&, const Vector&) { return Q; });
  auto dyn = std::make_shared<FunctionalConstraint>(
      ConstraintKind::Equality, 2 * kN, [A](const Point& x) -> Vector { return A * x; },
      [A](const Point&) { return A; });
  auto bounds = std::make_shared<FunctionalConstraint>(
      ConstraintKind::Inequality, 2 * kN,
      [C](const Point& x) -> Vector { return (C * x).array() - kUmax; },
      [C](const Point&) { return C; });

  NamedProblem np;
  np.name = "double-integrator-oc";
  np.problem = std::make_shared<Problem>(
      Manifold::euclidean(kDim), std::move(cost),
      std::vector<std::shared_ptr<ConstraintBlock>>{std::move(dyn), std::move(bounds)});
  np.x0 = Point::Zero(kDim);
  np.oracle = makeOracle(A, C);
  return np;
}

} // namespace

const std::vector<std::string>& catalogNames() {
  static const std::vector<std::string> names = {
      "se2-barycenter-3",  "eq-qp-2",         "ineq-qp-1", "ineq-qp-degenerate",
      "rosenbrock-ball",   "double-integrator-oc", "so3-barycenter-3"};
  return names;
}

NamedProblem buildProblem(const std::string& name) {
  if (name == "se2-barycenter-3") return makeSe2Barycenter();
  if (name == "eq-qp-2") return makeEqQp2();
  if (name == "ineq-qp-1") return makeIneqQp1();
  if (name == "ineq-qp-degenerate") return makeIneqQpDegenerate();
  if (name == "rosenbrock-ball") return makeRosenbrockBall();
  if (name == "double-integrator-oc") return makeDoubleIntegrator();
  if (name == "so3-barycenter-3") return makeSo3Barycenter();

  std::ostringstream msg;
  msg << "unknown problem '" << name << "'; catalog:";
  for (const auto& n : catalogNames()) msg << "\n  " << n;
  throw std::invalid_argument(msg.str());
}

} // namespace mopal
