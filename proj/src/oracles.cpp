#include "symdens/oracles.hpp"

#include <algorithm>
#include <cstdint>

#include "symdens/errors.hpp"

namespace symdens {

namespace {

// One exhaustive peel over the live part of the instance.
DensestSubset brute_peel(const Instance& instance, Side ground, const std::vector<bool>& live_ground,
                         const std::vector<bool>& live_aux) {
  const Side aux = other(ground);
  std::vector<std::size_t> members;
  for (std::size_t j = 0; j < instance.size(ground); ++j) {
    if (live_ground[j]) members.push_back(j);
  }
  std::vector<std::size_t> position(instance.size(ground), 0);
  for (std::size_t k = 0; k < members.size(); ++k) position[members[k]] = k;

  // Neighborhood of each live aux vertex as a bitmask over `members`.
  std::vector<std::pair<std::size_t, std::uint32_t>> aux_masks;
  DensestSubset lonely;
  for (std::size_t e = 0; e < instance.size(aux); ++e) {
    if (!live_aux[e]) continue;
    std::uint32_t mask = 0;
    for (std::size_t k : instance.incident(aux, e)) {
      const std::size_t j = instance.endpoint(k, ground);
      if (live_ground[j]) mask |= std::uint32_t{1} << position[j];
    }
    if (mask == 0) {
      lonely.closed.push_back(e);
    } else {
      aux_masks.emplace_back(e, mask);
    }
  }
  if (!lonely.closed.empty()) {
    lonely.density = kInfinity;  // the empty set with isolated aux vertices
    return lonely;
  }

  const std::uint32_t full = members.empty() ? 0 : static_cast<std::uint32_t>((std::uint64_t{1} << members.size()) - 1);
  auto density_of = [&](std::uint32_t s) {
    double ws = 0.0, wf = 0.0;
    for (std::size_t k = 0; k < members.size(); ++k) {
      if (s >> k & 1U) ws += instance.weight(ground, members[k]);
    }
    for (const auto& [e, m] : aux_masks) {
      if ((m & ~s) == 0) wf += instance.weight(aux, e);
    }
    return safe_ratio(wf, ws);
  };
  double best = 0.0;
  for (std::uint32_t s = 0; s <= full; ++s) {
    best = std::max(best, density_of(s));
    if (s == full) break;
  }
  std::uint32_t chosen = 0;
  for (std::uint32_t s = 0; s <= full; ++s) {
    if (density_of(s) >= best * (1.0 - 1e-12)) chosen |= s;
    if (s == full) break;
  }
  DensestSubset out;
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (chosen >> k & 1U) out.ground.push_back(members[k]);
  }
  for (const auto& [e, m] : aux_masks) {
    if ((m & ~chosen) == 0) out.closed.push_back(e);
  }
  std::sort(out.closed.begin(), out.closed.end());
  out.density = density_of(chosen);
  return out;
}

void check_ground(const Instance& instance, Side ground, const OracleBudget& budget) {
  const std::size_t limit = std::min<std::size_t>(budget.max_ground_vertices, 24);
  if (instance.size(ground) > limit) {
    throw BudgetError("brute force limited to " + std::to_string(limit) + " ground vertices, got " +
                      std::to_string(instance.size(ground)));
  }
}

}  // namespace

DensestSubset brute_densest(const Instance& instance, Side ground, const OracleBudget& budget) {
  check_ground(instance, ground, budget);
  return brute_peel(instance, ground, std::vector<bool>(instance.size(ground), true),
                    std::vector<bool>(instance.size(other(ground)), true));
}

DensityDecomposition brute_decomposition(const Instance& instance, Side ground, const OracleBudget& budget) {
  check_ground(instance, ground, budget);
  const Side aux = other(ground);
  std::vector<bool> live_ground(instance.size(ground), true);
  std::vector<bool> live_aux(instance.size(aux), true);
  std::vector<Level> levels;
  for (;;) {
    const bool any = std::find(live_ground.begin(), live_ground.end(), true) != live_ground.end() ||
                     std::find(live_aux.begin(), live_aux.end(), true) != live_aux.end();
    if (!any) break;
    DensestSubset peel = brute_peel(instance, ground, live_ground, live_aux);
    for (std::size_t j : peel.ground) live_ground[j] = false;
    for (std::size_t e : peel.closed) live_aux[e] = false;
    Level level;
    (ground == Side::zero ? level.side0 : level.side1) = std::move(peel.ground);
    (ground == Side::zero ? level.side1 : level.side0) = std::move(peel.closed);
    level.density = peel.density;
    levels.push_back(std::move(level));
  }
  return detail::assemble_decomposition(instance, ground, std::move(levels));
}

double brute_hockey_stick(std::span<const double> p, std::span<const double> q, double gamma,
                          const OracleBudget& budget) {
  if (p.size() != q.size()) throw DomainError("distributions have different supports");
  const std::size_t limit = std::min<std::size_t>(budget.max_atoms, 26);
  if (p.size() > limit) {
    throw BudgetError("brute force limited to " + std::to_string(limit) + " atoms, got " + std::to_string(p.size()));
  }
  const std::uint64_t count = std::uint64_t{1} << p.size();
  double best = 0.0;
  for (std::uint64_t s = 0; s < count; ++s) {
    double value = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (s >> k & 1U) value += q[k] - gamma * p[k];
    }
    best = std::max(best, value);
  }
  return best;
}

}  // namespace symdens
