#ifndef MOPAL_PROBLEM_HPP
#define MOPAL_PROBLEM_HPP

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mopal/manifold.hpp"
#include "mopal/types.hpp"

namespace mopal {

/// Objective on a manifold. `hessian` is the Lagrangian-Hessian model
/// H ~ grad^2 L(x, y, z) in tangent coordinates; callers fall back to a
/// Gauss-Newton or identity model when it is unavailable.
class Cost {
public:
  virtual ~Cost() = default;
  virtual double value(const Point& x) const = 0;
  virtual Tangent gradient(const Point& x) const = 0;

  virtual bool hasHessian() const { return false; }
  virtual Matrix hessian(const Point& /*x*/, const Vector& /*y*/, const Vector& /*z*/) const {
    throw std::logic_error("cost: no hessian callback");
  }

  /// Least-squares structure: value = 0.5 * |r(x)|^2 with J = dr/dx; enables
  /// the Gauss-Newton model J^T J.
  virtual bool hasResiduals() const { return false; }
  virtual Vector residuals(const Point& /*x*/) const {
    throw std::logic_error("cost: no residual structure");
  }
  virtual Matrix residualJacobian(const Point& /*x*/) const {
    throw std::logic_error("cost: no residual structure");
  }
};

class FunctionalCost final : public Cost {
public:
  using ValueFn = std::function<double(const Point&)>;
  using GradientFn = std::function<Tangent(const Point&)>;
  using HessianFn = std::function<Matrix(const Point&, const Vector&, const Vector&)>;

  FunctionalCost(ValueFn value, GradientFn gradient, HessianFn hessian = nullptr)
      : value_(std::move(value)), gradient_(std::move(gradient)), hessian_(std::move(hessian)) {}

  double value(const Point& x) const override { return value_(x); }
  Tangent gradient(const Point& x) const override { return gradient_(x); }
  bool hasHessian() const override { return static_cast<bool>(hessian_); }
  Matrix hessian(const Point& x, const Vector& y, const Vector& z) const override {
    if (!hessian_) return Cost::hessian(x, y, z);
    return hessian_(x, y, z);
  }

private:
  ValueFn value_;
  GradientFn gradient_;
  HessianFn hessian_;
};

/// Cost of the form 0.5 * |r(x)|^2 defined by its residual callbacks.
class ResidualCost final : public Cost {
public:
  using ResidualFn = std::function<Vector(const Point&)>;
  using JacobianFn = std::function<Matrix(const Point&)>;

  ResidualCost(ResidualFn res, JacobianFn jac) : res_(std::move(res)), jac_(std::move(jac)) {}

  double value(const Point& x) const override { return 0.5 * res_(x).squaredNorm(); }
  Tangent gradient(const Point& x) const override { return jac_(x).transpose() * res_(x); }
  bool hasResiduals() const override { return true; }
  Vector residuals(const Point& x) const override { return res_(x); }
  Matrix residualJacobian(const Point& x) const override { return jac_(x); }

private:
  ResidualFn res_;
  JacobianFn jac_;
};

enum class ConstraintKind { Equality, Inequality };

/// One block of constraints: g(x) = 0 (Equality) or h(x) <= 0 (Inequality).
class ConstraintBlock {
public:
  ConstraintBlock(ConstraintKind kind, int dim) : kind_(kind), dim_(dim) {}
  virtual ~ConstraintBlock() = default;

  ConstraintKind kind() const { return kind_; }
  int dim() const { return dim_; }

  virtual Vector value(const Point& x) const = 0;
  virtual Matrix jacobian(const Point& x) const = 0;  // dim x nt

private:
  ConstraintKind kind_;
  int dim_;
};

class FunctionalConstraint final : public ConstraintBlock {
public:
  using ValueFn = std::function<Vector(const Point&)>;
  using JacobianFn = std::function<Matrix(const Point&)>;

  FunctionalConstraint(ConstraintKind kind, int dim, ValueFn value, JacobianFn jacobian)
      : ConstraintBlock(kind, dim), value_(std::move(value)), jacobian_(std::move(jacobian)) {}

  Vector value(const Point& x) const override { return value_(x); }
  Matrix jacobian(const Point& x) const override { return jacobian_(x); }

private:
  ValueFn value_;
  JacobianFn jacobian_;
};

struct DerivativeCheckItem {
  std::string label;
  double max_error = 0.0;  // |fd - analytic| / max(1, |analytic|), worst entry
  bool pass = true;
};

struct DerivativeCheckReport {
  std::vector<DerivativeCheckItem> items;
  double max_error = 0.0;
  bool pass = true;
};

/// Immutable problem data: cost, ordered constraint blocks, manifold.
class Problem {
public:
  Problem(Manifold manifold, std::shared_ptr<Cost> cost,
          std::vector<std::shared_ptr<ConstraintBlock>> blocks = {});

  const Manifold& manifold() const { return manifold_; }
  const Cost& cost() const { return *cost_; }
  const std::vector<std::shared_ptr<ConstraintBlock>>& blocks() const { return blocks_; }

  int tangentSize() const { return manifold_.tangentSize(); }
  int numEqualities() const { return ne_; }
  int numInequalities() const { return ni_; }

  /// Stacked (g, h) in block order; callback failures are rethrown with the
  /// block index attached.
  std::pair<Vector, Vector> evalResiduals(const Point& x) const;

  /// Stacked Jacobians (ne x nt, ni x nt) in block order.
  std::pair<Matrix, Matrix> evalJacobians(const Point& x) const;

  /// Central finite differences of all first-derivative callbacks through
  /// integrate; an item passes iff its mixed relative error <= tol.
  DerivativeCheckReport checkDerivatives(const Point& x, double step = 1e-6,
                                         double tol = 1e-4) const;

private:
  Manifold manifold_;
  std::shared_ptr<Cost> cost_;
  std::vector<std::shared_ptr<ConstraintBlock>> blocks_;
  int ne_ = 0;
  int ni_ = 0;
};

} // namespace mopal

#endif
