#include "mopal/merit.hpp"

#include <stdexcept>

namespace mopal {

namespace {

void checkSizes(const Vector& g, const Vector& h, const Multipliers& m, const char* who) {
  if (m.y.size() != g.size() || m.z.size() != h.size())
    throw std::invalid_argument(std::string(who) + ": multiplier size mismatch");
}

void checkMu(double mu, const char* who) {
  if (!(mu > 0.0)) throw std::invalid_argument(std::string(who) + ": mu must be positive");
}

} // namespace

ActiveSet activeSet(const Vector& h, const Vector& ze, double mu) {
  checkMu(mu, "activeSet");
  if (ze.size() != h.size()) throw std::invalid_argument("activeSet: size mismatch");
  return (h.array() + mu * ze.array()) >= 0.0;
}

double alValue(double f, const Vector& g, const Vector& h, const Multipliers& est, double mu) {
  checkMu(mu, "alValue");
  checkSizes(g, h, est, "alValue");
  const Vector ge = g + mu * est.y;
  const Vector he = (h + mu * est.z).cwiseMax(0.0);
  return f + (ge.squaredNorm() + he.squaredNorm()) / (2.0 * mu);
}

Multipliers firstOrderMultipliers(const Vector& g, const Vector& h, const Multipliers& est,
                                  double mu) {
  checkMu(mu, "firstOrderMultipliers");
  checkSizes(g, h, est, "firstOrderMultipliers");
  return {est.y + g / mu, (est.z + h / mu).cwiseMax(0.0)};
}

double pdalValue(double f, const Vector& g, const Vector& h, const Multipliers& mult,
                 const Multipliers& est, double mu) {
  checkMu(mu, "pdalValue");
  checkSizes(g, h, mult, "pdalValue");
  checkSizes(g, h, est, "pdalValue");
  const Vector gy = g + mu * (est.y - mult.y);
  const Vector hz = (h + mu * est.z).cwiseMax(0.0) - mu * mult.z;
  return alValue(f, g, h, est, mu) + (gy.squaredNorm() + hz.squaredNorm()) / (2.0 * mu);
}

double MeritGradient::infNorm() const {
  double n = 0.0;
  if (x.size() > 0) n = std::max(n, x.lpNorm<Eigen::Infinity>());
  if (y.size() > 0) n = std::max(n, y.lpNorm<Eigen::Infinity>());
  if (z.size() > 0) n = std::max(n, z.lpNorm<Eigen::Infinity>());
  return n;
}

MeritGradient pdalGradient(const Tangent& cost_grad, const Matrix& gx, const Matrix& hx,
                           const Vector& g, const Vector& h, const Multipliers& mult,
                           const Multipliers& est, double mu) {
  checkMu(mu, "pdalGradient");
  checkSizes(g, h, mult, "pdalGradient");
  checkSizes(g, h, est, "pdalGradient");
  if (gx.rows() != g.size() || hx.rows() != h.size() || gx.cols() != cost_grad.size() ||
      hx.cols() != cost_grad.size())
    throw std::invalid_argument("pdalGradient: jacobian shape mismatch");

  const Multipliers fo = firstOrderMultipliers(g, h, est, mu);
  const ActiveSet active = activeSet(h, est.z, mu);

  MeritGradient grad;
  grad.y = mu * (mult.y - est.y) - g;            // zero iff y = ye + g/mu
  grad.z = mu * mult.z - (h + mu * est.z).cwiseMax(0.0);

  Vector w = 2.0 * fo.z - mult.z;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (!active(i)) w(i) = 0.0;
  grad.x = cost_grad + gx.transpose() * (2.0 * fo.y - mult.y) + hx.transpose() * w;
  return grad;
}

} // namespace mopal
