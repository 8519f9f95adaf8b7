#ifndef MOPAL_LINESEARCH_HPP
#define MOPAL_LINESEARCH_HPP

#include "mopal/kkt.hpp"
#include "mopal/merit.hpp"
#include "mopal/problem.hpp"
#include "mopal/types.hpp"

namespace mopal {

struct LinesearchSettings {
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;  // step-size shrink factor, in (0, 1)
  double alpha_min = 1e-10;
};

enum class LinesearchStatus {
  Accepted,
  Failed,  // no alpha >= alpha_min satisfied the Armijo condition
};

struct LinesearchResult {
  LinesearchStatus status = LinesearchStatus::Failed;
  double alpha = 0.0;
  Point x;            // accepted point (input x on failure)
  Multipliers mult;   // accepted duals (input duals on failure)
  double merit = 0.0; // merit at the returned iterate
  double slope = 0.0; // directional derivative at alpha = 0
  int evaluations = 0;
};

/// Armijo backtracking on the primal-dual merit along the monolithic step:
/// primals move through the retraction, duals by the same alpha. Accepts the
/// largest alpha in {1, b, b^2, ...} with
///   merit(alpha) <= merit(0) + c1 * alpha * slope.
/// Throws std::invalid_argument when the step is not a descent direction
/// (slope >= 0).
LinesearchResult search(const Problem& p, const Point& x, const Multipliers& mult,
                        const Multipliers& est, double mu, const Step& step,
                        const LinesearchSettings& settings = {});

} // namespace mopal

#endif
