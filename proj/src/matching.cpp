#include "symdens/matching.hpp"

#include <algorithm>
#include <cmath>

#include "symdens/errors.hpp"
#include "symdens/maxflow.hpp"

namespace symdens {

void validate_capacity(const CapacityPair& c) {
  if (!(c.c0 >= 0.0) || !(c.c1 >= 0.0) || !std::isfinite(c.c0) || !std::isfinite(c.c1)) {
    throw DomainError("capacities must be finite and nonnegative");
  }
  if (c.c0 == 0.0 && c.c1 == 0.0) throw DomainError("capacities must not both be zero");
}

FractionalMatching meet_matching(const Instance& instance, const RefinementPair& pair, const CapacityPair& c) {
  validate_capacity(c);
  if (pair.alpha0.source != Side::zero || pair.alpha1.source != Side::one) {
    throw InputError("refinement pair has mismatched source sides");
  }
  validate_refinement(instance, pair.alpha0);
  validate_refinement(instance, pair.alpha1);
  FractionalMatching m;
  m.values.resize(instance.edge_count());
  KahanSum total;
  for (std::size_t e = 0; e < m.values.size(); ++e) {
    m.values[e] = std::min(c.c0 * pair.alpha0.values[e], c.c1 * pair.alpha1.values[e]);
    total.add(m.values[e]);
  }
  m.total_weight = total.value();
  return m;
}

double optimal_matching_value(const DensityDecomposition& decomp, const CapacityPair& c) {
  validate_capacity(c);
  const Side g = decomp.ground;
  const auto& rho = decomp.density(g);
  const auto& payload = decomp.payload(g);
  KahanSum total;
  for (std::size_t j = 0; j < rho.size(); ++j) {
    if (payload[j] == 0.0) continue;
    total.add(std::min(c.of(g) / rho[j], c.of(other(g))) * payload[j]);
  }
  return total.value();
}

FractionalMatching maxflow_matching_oracle(const Instance& instance, const CapacityPair& c) {
  validate_capacity(c);
  const std::size_t n0 = instance.size(Side::zero);
  const std::size_t n1 = instance.size(Side::one);
  FlowNetwork net(n0 + n1 + 2);
  const std::size_t source = n0 + n1, sink = n0 + n1 + 1;
  for (std::size_t i = 0; i < n0; ++i) net.add_arc(source, i, c.c0 * instance.weight(Side::zero, i));
  for (std::size_t j = 0; j < n1; ++j) net.add_arc(n0 + j, sink, c.c1 * instance.weight(Side::one, j));
  std::vector<std::size_t> handles;
  for (const Edge& e : instance.edges()) handles.push_back(net.add_arc(e.v0, n0 + e.v1, kInfinity));
  FractionalMatching m;
  m.total_weight = net.solve(source, sink);
  for (std::size_t h : handles) m.values.push_back(std::max(0.0, net.flow(h)));
  return m;
}

bool is_feasible_matching(const Instance& instance, const FractionalMatching& m, const CapacityPair& c,
                          double slack) {
  if (m.values.size() != instance.edge_count()) return false;
  for (double x : m.values) {
    if (x < -slack) return false;
  }
  for (Side s : {Side::zero, Side::one}) {
    for (std::size_t v = 0; v < instance.size(s); ++v) {
      KahanSum load;
      for (std::size_t e : instance.incident(s, v)) load.add(m.values[e]);
      if (load.value() > c.of(s) * instance.weight(s, v) + slack) return false;
    }
  }
  return true;
}

DualCertificate dual_certificate(const Instance& instance, const DensityDecomposition& decomp,
                                 const CapacityPair& c) {
  validate_capacity(c);
  DualCertificate cert;
  cert.label0.assign(instance.size(Side::zero), 0);
  cert.label1.assign(instance.size(Side::one), 0);
  for (const Level& level : decomp.levels) {
    KahanSum w0, w1;
    for (std::size_t i : level.side0) w0.add(instance.weight(Side::zero, i));
    for (std::size_t j : level.side1) w1.add(instance.weight(Side::one, j));
    // Ties go to the side-1 cover.
    const bool cover_side1 = c.c1 * w1.value() <= c.c0 * w0.value();
    for (std::size_t i : level.side0) cert.label0[i] = cover_side1 ? 0 : 1;
    for (std::size_t j : level.side1) cert.label1[j] = cover_side1 ? 1 : 0;
  }
  for (const Edge& e : instance.edges()) {
    if (cert.label0[e.v0] + cert.label1[e.v1] < 1) {
      throw Error("dual certificate infeasible on edge ('" + instance.id(Side::zero, e.v0) + "', '" +
                  instance.id(Side::one, e.v1) + "')");
    }
  }
  KahanSum objective;
  for (std::size_t i = 0; i < cert.label0.size(); ++i) {
    if (cert.label0[i]) objective.add(c.c0 * instance.weight(Side::zero, i));
  }
  for (std::size_t j = 0; j < cert.label1.size(); ++j) {
    if (cert.label1[j]) objective.add(c.c1 * instance.weight(Side::one, j));
  }
  cert.objective = objective.value();
  return cert;
}

std::vector<CapacityPair> default_capacity_grid() {
  std::vector<CapacityPair> grid;
  for (int k = -6; k <= 6; ++k) grid.push_back({std::ldexp(1.0, k), 1.0});
  grid.push_back({0.0, 1.0});
  grid.push_back({1.0, 0.0});
  return grid;
}

ApproximationReport check_universal_approximation(const Instance& instance, const DensityDecomposition& decomp,
                                                  const RefinementPair& pair, double tau_claimed,
                                                  const std::vector<CapacityPair>& c_samples) {
  if (!(tau_claimed >= 0.0) || tau_claimed >= 1.0) throw DomainError("tau must lie in [0, 1)");
  ApproximationReport report;
  report.guarantee = (1.0 - tau_claimed) / (1.0 + tau_claimed);
  for (const CapacityPair& c : c_samples) {
    ApproximationSample sample{c, meet_matching(instance, pair, c).total_weight, optimal_matching_value(decomp, c),
                               1.0};
    if (sample.optimum > 0.0) sample.ratio = sample.weight / sample.optimum;
    report.worst_ratio = std::min(report.worst_ratio, sample.ratio);
    if (sample.ratio < report.guarantee - kRelTol) report.holds = false;
    report.samples.push_back(sample);
  }
  return report;
}

}  // namespace symdens
