#pragma once

#include <vector>

#include "symdens/decomposition.hpp"
#include "symdens/instance.hpp"

namespace symdens {

// Vertex capacities are c0 * w(i) on side 0 and c1 * w(j) on side 1.
struct CapacityPair {
  double c0 = 1.0;
  double c1 = 1.0;
  double of(Side s) const { return s == Side::zero ? c0 : c1; }
};

void validate_capacity(const CapacityPair& c);

struct FractionalMatching {
  std::vector<double> values;  // indexed by edge
  double total_weight = 0.0;
};

// Edge-wise min(c0 * alpha0, c1 * alpha1).
FractionalMatching meet_matching(const Instance& instance, const RefinementPair& pair, const CapacityPair& c);

double optimal_matching_value(const DensityDecomposition& decomp, const CapacityPair& c);

// Independent optimum of the capacitated matching LP by maximum flow.
FractionalMatching maxflow_matching_oracle(const Instance& instance, const CapacityPair& c);

// True when the matching respects every vertex capacity up to `slack`.
bool is_feasible_matching(const Instance& instance, const FractionalMatching& m, const CapacityPair& c,
                          double slack = 1e-9);

struct DualCertificate {
  std::vector<int> label0;  // 0/1 per side-0 vertex
  std::vector<int> label1;  // 0/1 per side-1 vertex
  double objective = 0.0;
};

// 0/1 vertex cover read off the decomposition; feasibility is checked before
// returning. Needs the instance for edges and weights.
DualCertificate dual_certificate(const Instance& instance, const DensityDecomposition& decomp,
                                 const CapacityPair& c);

// 15-point grid: (2^k, 1) for k in [-6, 6], then (0, 1) and (1, 0).
std::vector<CapacityPair> default_capacity_grid();

struct ApproximationSample {
  CapacityPair c;
  double weight = 0.0;
  double optimum = 0.0;
  double ratio = 1.0;  // 1 when the optimum is 0
};

struct ApproximationReport {
  double guarantee = 1.0;  // (1 - tau) / (1 + tau)
  double worst_ratio = 1.0;
  bool holds = true;
  std::vector<ApproximationSample> samples;
};

ApproximationReport check_universal_approximation(const Instance& instance, const DensityDecomposition& decomp,
                                                  const RefinementPair& pair, double tau_claimed,
                                                  const std::vector<CapacityPair>& c_samples);

}  // namespace symdens
