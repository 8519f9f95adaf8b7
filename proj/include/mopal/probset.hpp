#ifndef MOPAL_PROBSET_HPP
#define MOPAL_PROBSET_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mopal/merit.hpp"
#include "mopal/problem.hpp"

namespace mopal {

/// Reference solution for a catalog entry, precise enough that the KKT
/// residuals at (x, mult) are below 1e-8.
struct OracleSolution {
  Point x;
  Multipliers mult;
  std::string note;  // how the reference was obtained
};

struct NamedProblem {
  std::string name;
  std::shared_ptr<Problem> problem;
  Point x0;
  std::optional<OracleSolution> oracle;
};

/// Catalog names in canonical order.
const std::vector<std::string>& catalogNames();

/// Builds a catalog entry; unknown names raise std::invalid_argument with
/// the full catalog listing in the message.
NamedProblem buildProblem(const std::string& name);

} // namespace mopal

#endif
