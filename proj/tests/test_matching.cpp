#include <doctest.h>

#include "support.hpp"
#include "symdens/decomposition.hpp"
#include "symdens/errors.hpp"
#include "symdens/matching.hpp"

using namespace symdens;
using symdens::test::near_rel;

namespace {

RefinementPair maximin_pair(const Instance& g) {
  const Refinement alpha0 = exact_maximin_refinement(g, Side::zero);
  return {alpha0, proportional_response(g, alpha0)};
}

}  // namespace

TEST_CASE("meet matching of identical refinements") {
  Rng rng(41);
  const Instance g = transportation_instance(rng, 4, 5);
  const RefinementPair pair = maximin_pair(g);
  const FractionalMatching m = meet_matching(g, pair, {1.0, 1.0});
  CHECK(near_rel(m.total_weight, g.total_weight(Side::zero), 1e-12));
  CHECK(meet_matching(g, pair, {0.0, 1.0}).total_weight == 0.0);
}

TEST_CASE("counterexample matching values") {
  const Instance g = counterexample_instance(0.25);
  const DensityDecomposition d = density_decomposition(g, Side::one);
  const CapacityPair unit{1.0, 1.0};
  CHECK(near_rel(meet_matching(g, maximin_pair(g), unit).total_weight, 3.25, 1e-12));
  CHECK(near_rel(optimal_matching_value(d, unit), 3.25, 1e-12));
  CHECK(near_rel(maxflow_matching_oracle(g, unit).total_weight, 3.25, 1e-12));
  CHECK(near_rel(test::ref_matching_value(g, 1.0, 1.0), 3.25, 1e-12));
  CHECK(optimal_matching_value(d, {0.0, 1.0}) == 0.0);
}

TEST_CASE("dual certificate on the counterexample") {
  const Instance g = counterexample_instance(0.25);
  const DensityDecomposition d = density_decomposition(g, Side::one);
  const DualCertificate cert = dual_certificate(g, d, {1.0, 1.0});
  CHECK(cert.label0 == std::vector<int>{0, 1, 1});
  CHECK(cert.label1 == std::vector<int>{1, 1, 0});
  CHECK(near_rel(cert.objective, 3.25, 1e-12));
  CHECK(dual_certificate(g, d, {0.0, 1.0}).objective == 0.0);
}

TEST_CASE("one edge matching") {
  const Instance g = test::single_edge(2.0, 3.0);
  const DensityDecomposition d = density_decomposition(g, Side::one);
  CHECK(maxflow_matching_oracle(g, {1.0, 1.0}).total_weight == 2.0);
  for (const CapacityPair& c : default_capacity_grid()) {
    const DualCertificate cert = dual_certificate(g, d, c);
    CHECK(cert.label0[0] + cert.label1[0] == 1);
    CHECK(near_rel(cert.objective, std::min(c.c0 * 2.0, c.c1 * 3.0), 1e-12));
  }
}

TEST_CASE("capacity validation") {
  CHECK_THROWS_AS(validate_capacity({0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(validate_capacity({-1.0, 1.0}), DomainError);
  CHECK(default_capacity_grid().size() == 15);
}

TEST_CASE("strong duality on random instances") {
  Rng rng(42);
  for (const Instance& g : test::random_instances(43, 60)) {
    const DensityDecomposition d = density_decomposition(g, Side::one);
    const RefinementPair pair = maximin_pair(g);
    std::vector<CapacityPair> grid = default_capacity_grid();
    grid.push_back({uniform(rng, 0.0, 3.0), uniform(rng, 0.01, 3.0)});
    for (const CapacityPair& c : grid) {
      const double ref = test::ref_matching_value(g, c.c0, c.c1);
      const FractionalMatching meet = meet_matching(g, pair, c);
      const FractionalMatching flow = maxflow_matching_oracle(g, c);
      CHECK(is_feasible_matching(g, meet, c));
      CHECK(is_feasible_matching(g, flow, c));
      CHECK(near_rel(meet.total_weight, ref, 1e-9));
      CHECK(near_rel(flow.total_weight, ref, 1e-9));
      CHECK(near_rel(optimal_matching_value(d, c), ref, 1e-9));
      CHECK(near_rel(dual_certificate(g, d, c).objective, ref, 1e-9));
    }
  }
}

TEST_CASE("matching optimum is monotone and homogeneous") {
  for (const Instance& g : test::random_instances(44, 30)) {
    const DensityDecomposition d = density_decomposition(g, Side::one);
    double last = 0.0;
    for (double c0 = 0.0; c0 <= 4.0; c0 += 0.25) {
      const double v = optimal_matching_value(d, {c0, 1.0});
      CHECK(v >= last - 1e-12);
      last = v;
      CHECK(near_rel(optimal_matching_value(d, {3.0 * c0, 3.0}), 3.0 * v, 1e-12));
    }
  }
}

TEST_CASE("universal approximation for certified pairs") {
  const Instance g = counterexample_instance(0.25);
  const DensityDecomposition d = density_decomposition(g, Side::one);
  const ApproximationReport exact = check_universal_approximation(g, d, maximin_pair(g), 0.0, default_capacity_grid());
  CHECK(exact.holds);
  CHECK(near_rel(exact.worst_ratio, 1.0, 1e-9));

  const Refinement mistaken = counterexample_mistaken_refinement(g, 0.25);
  const RefinementPair pair{mistaken, proportional_response(g, mistaken)};
  const ApproximationReport report = check_universal_approximation(g, d, pair, 0.25, default_capacity_grid());
  CHECK(report.holds);
  CHECK(report.guarantee == doctest::Approx(0.6));
  CHECK(report.worst_ratio >= 0.6 - 1e-9);
}

TEST_CASE("response error does not transfer on the counterexample") {
  for (double tau : {0.1, 0.25, 0.4}) {
    const Instance g = counterexample_instance(tau);
    const DensityDecomposition d = density_decomposition(g, Side::one);
    const Refinement mistaken = counterexample_mistaken_refinement(g, tau);
    const double forward = multiplicative_error(g, Side::one, payload_of(g, mistaken).density, d.density(Side::one));
    CHECK(near_rel(forward, tau, 1e-12));
    const PayloadVector back = payload_of(g, proportional_response(g, mistaken));
    const double err_i2 = std::abs(back.density[1] - d.density(Side::zero)[1]) / d.density(Side::zero)[1];
    CHECK(near_rel(err_i2, 1.0 - tau, 1e-9));
  }
}
