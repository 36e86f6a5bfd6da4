#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "symdens/instance.hpp"

namespace symdens {

struct DensestSubset {
  std::vector<std::size_t> ground;  // sorted indices on the ground side
  std::vector<std::size_t> closed;  // closed neighborhood on the other side
  double density = 0.0;             // w(closed) / w(ground), 0/0 = 0, x/0 = inf
};

// Unique maximal densest subset of the ground side.
DensestSubset maximal_densest_subset(const Instance& instance, Side ground);

struct Level {
  std::vector<std::size_t> side0;
  std::vector<std::size_t> side1;
  // Density of the ground-side vertices of the level.
  double density = 0.0;
  friend bool operator==(const Level&, const Level&) = default;
};

struct DensityDecomposition {
  Side ground = Side::one;
  std::vector<Level> levels;
  std::array<std::vector<double>, 2> rho_star;
  std::array<std::vector<double>, 2> payload_star;

  const std::vector<double>& density(Side s) const { return rho_star[index_of(s)]; }
  const std::vector<double>& payload(Side s) const { return payload_star[index_of(s)]; }
  friend bool operator==(const DensityDecomposition&, const DensityDecomposition&) = default;
};

DensityDecomposition density_decomposition(const Instance& instance, Side ground);

// Locally maximin refinement from the given side whose induced densities
// equal the decomposition densities.
Refinement exact_maximin_refinement(const Instance& instance, Side source);

// Level lists of the two ground sides are reverses of each other with
// reciprocal densities.
bool same_levels_reversed(const DensityDecomposition& a, const DensityDecomposition& b,
                          double rel_tol = kRelTol);

bool verify_symmetry(const Instance& instance);

namespace detail {

// Merges equal-density neighbors and fills the per-vertex vectors for a
// peeled level list.
DensityDecomposition assemble_decomposition(const Instance& instance, Side ground, std::vector<Level> levels);

}  // namespace detail

}  // namespace symdens
