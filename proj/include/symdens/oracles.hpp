#pragma once

#include <cstddef>
#include <span>

#include "symdens/decomposition.hpp"
#include "symdens/instance.hpp"

namespace symdens {

// Exhaustive enumeration refuses inputs beyond these sizes.
struct OracleBudget {
  std::size_t max_ground_vertices = 12;
  std::size_t max_atoms = 20;
};

// Maximal densest subset by scanning every subset of the ground side.
DensestSubset brute_densest(const Instance& instance, Side ground, const OracleBudget& budget = {});

// Decomposition by repeated exhaustive peeling.
DensityDecomposition brute_decomposition(const Instance& instance, Side ground, const OracleBudget& budget = {});

// max over subsets S of Q(S) - gamma * P(S).
double brute_hockey_stick(std::span<const double> p, std::span<const double> q, double gamma,
                          const OracleBudget& budget = {});

}  // namespace symdens
