#pragma once

#include <vector>

namespace symdens::detail {

enum class Relation { equal, at_least, at_most };

struct LinearConstraint {
  std::vector<double> coefficients;
  Relation relation = Relation::equal;
  double rhs = 0.0;
};

// Whether some x >= 0 satisfies every constraint (Phase I simplex with
// Bland's rule on a dense tableau).
bool feasible(const std::vector<LinearConstraint>& constraints, std::size_t variables, double tol = 1e-9);

}  // namespace symdens::detail
