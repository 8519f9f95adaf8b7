#include "mopal/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace mopal {

Problem::Problem(Manifold manifold, std::shared_ptr<Cost> cost,
                 std::vector<std::shared_ptr<ConstraintBlock>> blocks)
    : manifold_(std::move(manifold)), cost_(std::move(cost)), blocks_(std::move(blocks)) {
  if (!cost_) throw std::invalid_argument("problem: null cost");
  for (const auto& blk : blocks_) {
    if (!blk) throw std::invalid_argument("problem: null constraint block");
    if (blk->dim() <= 0) throw std::invalid_argument("problem: constraint block with dim <= 0");
    (blk->kind() == ConstraintKind::Equality ? ne_ : ni_) += blk->dim();
  }
}

std::pair<Vector, Vector> Problem::evalResiduals(const Point& x) const {
  Vector g(ne_), h(ni_);
  int ie = 0, ii = 0;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto& blk = *blocks_[b];
    Vector v;
    try {
      v = blk.value(x);
    } catch (const std::exception& e) {
      throw std::runtime_error("constraint block " + std::to_string(b) + ": " + e.what());
    }
    if (v.size() != blk.dim())
      throw std::runtime_error("constraint block " + std::to_string(b) +
                               ": value size mismatch");
    if (blk.kind() == ConstraintKind::Equality) {
      g.segment(ie, blk.dim()) = v;
      ie += blk.dim();
    } else {
      h.segment(ii, blk.dim()) = v;
      ii += blk.dim();
    }
  }
  return {std::move(g), std::move(h)};
}

std::pair<Matrix, Matrix> Problem::evalJacobians(const Point& x) const {
  const int nt = manifold_.tangentSize();
  Matrix gx(ne_, nt), hx(ni_, nt);
  int ie = 0, ii = 0;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto& blk = *blocks_[b];
    Matrix J;
    try {
      J = blk.jacobian(x);
    } catch (const std::exception& e) {
      throw std::runtime_error("constraint block " + std::to_string(b) + ": " + e.what());
    }
    if (J.rows() != blk.dim() || J.cols() != nt)
      throw std::runtime_error("constraint block " + std::to_string(b) +
                               ": jacobian shape mismatch");
    if (blk.kind() == ConstraintKind::Equality) {
      gx.middleRows(ie, blk.dim()) = J;
      ie += blk.dim();
    } else {
      hx.middleRows(ii, blk.dim()) = J;
      ii += blk.dim();
    }
  }
  return {std::move(gx), std::move(hx)};
}

namespace {

double mixedRelError(const Matrix& fd, const Matrix& analytic) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < fd.rows(); ++i)
    for (Eigen::Index j = 0; j < fd.cols(); ++j) {
      const double denom = std::max(1.0, std::abs(analytic(i, j)));
      worst = std::max(worst, std::abs(fd(i, j) - analytic(i, j)) / denom);
    }
  return worst;
}

} // namespace

DerivativeCheckReport Problem::checkDerivatives(const Point& x, double step, double tol) const {
  const int nt = manifold_.tangentSize();
  DerivativeCheckReport report;

  auto directional = [&](const std::function<Vector(const Point&)>& fn, int outdim) {
    Matrix fd(outdim, nt);
    Tangent dir = Tangent::Zero(nt);
    for (int j = 0; j < nt; ++j) {
      dir(j) = step;
      const Vector plus = fn(manifold_.integrate(x, dir));
      dir(j) = -step;
      const Vector minus = fn(manifold_.integrate(x, dir));
      dir(j) = 0.0;
      fd.col(j) = (plus - minus) / (2.0 * step);
    }
    return fd;
  };

  auto push = [&](std::string label, const Matrix& fd, const Matrix& analytic) {
    DerivativeCheckItem item;
    item.label = std::move(label);
    item.max_error = mixedRelError(fd, analytic);
    item.pass = item.max_error <= tol;
    report.max_error = std::max(report.max_error, item.max_error);
    report.pass = report.pass && item.pass;
    report.items.push_back(std::move(item));
  };

  {
    auto scalar = [&](const Point& p) { return Vector::Constant(1, cost_->value(p)); };
    const Matrix fd = directional(scalar, 1);
    push("cost gradient", fd, cost_->gradient(x).transpose());
  }

  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto& blk = *blocks_[b];
    auto value = [&](const Point& p) { return blk.value(p); };
    const Matrix fd = directional(value, blk.dim());
    const char* kind = blk.kind() == ConstraintKind::Equality ? "equality" : "inequality";
    push(std::string(kind) + " block " + std::to_string(b) + " jacobian", fd, blk.jacobian(x));
  }

  return report;
}

} // namespace mopal
