#ifndef MOPAL_TYPES_HPP
#define MOPAL_TYPES_HPP

#include <Eigen/Core>

namespace mopal {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A point on a manifold, stored in its ambient representation (length nrep,
// may exceed the tangent dimension nt).
using Point = Eigen::VectorXd;

// A coordinate vector in the tangent space at some point (length nt).
// Gradients, Newton steps and constraint Jacobian row-spaces all live here.
using Tangent = Eigen::VectorXd;

} // namespace mopal

#endif
