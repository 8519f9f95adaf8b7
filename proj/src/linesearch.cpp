#include "mopal/linesearch.hpp"

#include <stdexcept>

namespace mopal {

LinesearchResult search(const Problem& p, const Point& x, const Multipliers& mult,
                        const Multipliers& est, double mu, const Step& step,
                        const LinesearchSettings& settings) {
  if (!(settings.armijo_c1 > 0.0 && settings.armijo_c1 < 1.0))
    throw std::invalid_argument("linesearch: armijo_c1 must be in (0,1)");
  if (!(settings.backtrack > 0.0 && settings.backtrack < 1.0))
    throw std::invalid_argument("linesearch: backtrack must be in (0,1)");

  const double f0 = p.cost().value(x);
  const auto [g0, h0] = p.evalResiduals(x);
  const auto [gx, hx] = p.evalJacobians(x);
  const MeritGradient grad = pdalGradient(p.cost().gradient(x), gx, hx, g0, h0, mult, est, mu);

  LinesearchResult result;
  result.slope = grad.x.dot(step.dx) + grad.y.dot(step.dy) + grad.z.dot(step.dz);
  if (!(result.slope < 0.0))
    throw std::invalid_argument("linesearch: step is not a descent direction");

  const double merit0 = pdalValue(f0, g0, h0, mult, est, mu);

  for (double alpha = 1.0; alpha >= settings.alpha_min; alpha *= settings.backtrack) {
    const Point xt = p.manifold().integrate(x, alpha * step.dx);
    const Multipliers mt{mult.y + alpha * step.dy, mult.z + alpha * step.dz};
    const auto [gt, ht] = p.evalResiduals(xt);
    const double merit_t = pdalValue(p.cost().value(xt), gt, ht, mt, est, mu);
    ++result.evaluations;
    if (merit_t <= merit0 + settings.armijo_c1 * alpha * result.slope) {
      result.status = LinesearchStatus::Accepted;
      result.alpha = alpha;
      result.x = xt;
      result.mult = mt;
      result.merit = merit_t;
      return result;
    }
  }

  result.status = LinesearchStatus::Failed;
  result.alpha = 0.0;
  result.x = x;
  result.mult = mult;
  result.merit = merit0;
  return result;
}

} // namespace mopal
