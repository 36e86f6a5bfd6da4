#include "linear_feasibility.hpp"

#include <algorithm>
#include <cmath>

#include "symdens/errors.hpp"

namespace symdens::detail {

bool feasible(const std::vector<LinearConstraint>& constraints, std::size_t variables, double tol) {
  const std::size_t m = constraints.size();
  if (m == 0) return true;
  std::size_t slacks = 0;
  for (const auto& c : constraints) {
    if (c.coefficients.size() != variables) throw DomainError("constraint width mismatch");
    if (c.relation != Relation::equal) ++slacks;
  }
  // Columns: original, slack/surplus, artificial, then the right-hand side.
  const std::size_t cols = variables + slacks + m;
  std::vector<std::vector<double>> tab(m + 1, std::vector<double>(cols + 1, 0.0));
  std::vector<std::size_t> basis(m);
  std::size_t slack = variables;
  for (std::size_t r = 0; r < m; ++r) {
    const auto& c = constraints[r];
    std::vector<double>& row = tab[r];
    for (std::size_t k = 0; k < variables; ++k) row[k] = c.coefficients[k];
    if (c.relation == Relation::at_most) row[slack++] = 1.0;
    if (c.relation == Relation::at_least) row[slack++] = -1.0;
    row[cols] = c.rhs;
    if (row[cols] < 0.0) {
      for (double& v : row) v = -v;
    }
    row[variables + slacks + r] = 1.0;
    basis[r] = variables + slacks + r;
  }
  // Objective row holds reduced costs of sum(artificials).
  std::vector<double>& obj = tab[m];
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t k = 0; k <= cols; ++k) {
      if (k < variables + slacks || k == cols) obj[k] -= tab[r][k];
    }
  }

  const std::size_t max_pivots = 50 * (m + cols) + 1000;
  for (std::size_t pivot = 0; pivot < max_pivots; ++pivot) {
    std::size_t enter = cols;
    for (std::size_t k = 0; k < cols; ++k) {
      if (obj[k] < -tol) {
        enter = k;
        break;
      }
    }
    if (enter == cols) break;
    std::size_t leave = m;
    double best = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (tab[r][enter] > tol) {
        const double ratio = tab[r][cols] / tab[r][enter];
        if (leave == m || ratio < best - tol || (std::abs(ratio - best) <= tol && basis[r] < basis[leave])) {
          leave = r;
          best = ratio;
        }
      }
    }
    if (leave == m) break;  // unbounded direction cannot occur in Phase I
    const double scale = tab[leave][enter];
    for (double& v : tab[leave]) v /= scale;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == leave) continue;
      const double factor = tab[r][enter];
      if (factor == 0.0) continue;
      for (std::size_t k = 0; k <= cols; ++k) tab[r][k] -= factor * tab[leave][k];
    }
    basis[leave] = enter;
  }
  double rhs_scale = 1.0;
  for (const auto& c : constraints) rhs_scale = std::max(rhs_scale, std::abs(c.rhs));
  return -obj[cols] <= tol * rhs_scale * static_cast<double>(m);
}

}  // namespace symdens::detail
