#include <doctest.h>

#include "support.hpp"
#include "symdens/decomposition.hpp"
#include "symdens/matching.hpp"

using namespace symdens;
using symdens::test::near_rel;

namespace {

using Ids = std::vector<std::size_t>;

}  // namespace

TEST_CASE("maximal densest subset of the counterexample") {
  const Instance g = counterexample_instance(0.25);
  const DensestSubset s = maximal_densest_subset(g, Side::one);
  CHECK(s.ground == Ids{0, 1});
  CHECK(s.closed == Ids{0});
  CHECK(near_rel(s.density, 1.0, 1e-12));
}

TEST_CASE("maximal densest subset of one edge") {
  const DensestSubset s = maximal_densest_subset(test::single_edge(2.0, 5.0), Side::one);
  CHECK(s.ground == Ids{0});
  CHECK(near_rel(s.density, 0.4, 1e-12));
}

TEST_CASE("maximal densest subset conventions at the boundary") {
  const Instance lonely({{"a", 2}}, {{"x", 1}}, {});
  const DensestSubset inf = maximal_densest_subset(lonely, Side::one);
  CHECK(inf.ground.empty());
  CHECK(inf.density == kInfinity);
  const DensestSubset zero = maximal_densest_subset(lonely, Side::zero);
  CHECK(zero.ground.empty());
  CHECK(zero.density == kInfinity);
  const Instance empty_ground({{"a", 2}}, {}, {});
  CHECK(maximal_densest_subset(empty_ground, Side::one).ground.empty());
}

TEST_CASE("maximal densest subset agrees with subset enumeration") {
  for (const Instance& g : test::random_instances(21, 80, {10, 10})) {
    for (Side ground : {Side::zero, Side::one}) {
      const DensestSubset s = maximal_densest_subset(g, ground);
      const test::RefDensest ref = test::ref_densest(g, ground);
      CHECK(s.ground == ref.members);
      CHECK(near_rel(s.density, ref.density, 1e-9));
    }
  }
}

TEST_CASE("decomposition of the counterexample") {
  const Instance g = counterexample_instance(0.25);
  const DensityDecomposition d = density_decomposition(g, Side::one);
  REQUIRE(d.levels.size() == 2);
  CHECK(d.levels[0].side0 == Ids{0});
  CHECK(d.levels[0].side1 == Ids{0, 1});
  CHECK(near_rel(d.levels[0].density, 1.0, 1e-12));
  CHECK(d.levels[1].side0 == Ids{1, 2});
  CHECK(d.levels[1].side1 == Ids{2});
  CHECK(near_rel(d.levels[1].density, 0.3125, 1e-12));
  CHECK(near_rel(d.density(Side::one)[2], 0.25 * 1.25, 1e-12));
  CHECK(near_rel(d.density(Side::zero)[1], 3.2, 1e-12));
  CHECK(near_rel(d.payload(Side::one)[2], 1.25, 1e-12));
}

TEST_CASE("decomposition of isolated vertices only") {
  const Instance g({{"a", 1}, {"b", 2}}, {{"x", 1}}, {});
  const DensityDecomposition d = density_decomposition(g, Side::one);
  REQUIRE(d.levels.size() == 2);
  CHECK(d.levels[0].side0 == Ids{0, 1});
  CHECK(d.levels[0].side1.empty());
  CHECK(d.levels[0].density == kInfinity);
  CHECK(d.levels[1].side0.empty());
  CHECK(d.levels[1].side1 == Ids{0});
  CHECK(d.levels[1].density == 0.0);
  CHECK(d.density(Side::one)[0] == 0.0);
}

TEST_CASE("decomposition invariants on random instances") {
  for (const Instance& g : test::random_instances(22, 80, {10, 10})) {
    for (Side ground : {Side::zero, Side::one}) {
      const DensityDecomposition d = density_decomposition(g, ground);
      std::vector<int> level0(g.size(Side::zero), -1), level1(g.size(Side::one), -1);
      for (std::size_t l = 0; l < d.levels.size(); ++l) {
        if (l > 0) CHECK(d.levels[l].density < d.levels[l - 1].density);
        for (std::size_t i : d.levels[l].side0) level0[i] = static_cast<int>(l);
        for (std::size_t j : d.levels[l].side1) level1[j] = static_cast<int>(l);
      }
      for (int l : level0) CHECK(l >= 0);
      for (int l : level1) CHECK(l >= 0);
      // Edges never run from the aux side of a level to a later ground level.
      for (const Edge& e : g.edges()) {
        if (ground == Side::one) CHECK(level1[e.v1] <= level0[e.v0]);
        if (ground == Side::zero) CHECK(level0[e.v0] <= level1[e.v1]);
      }
      for (const Edge& e : g.edges()) {
        if (level0[e.v0] == level1[e.v1]) {
          CHECK(near_rel(d.density(Side::zero)[e.v0] * d.density(Side::one)[e.v1], 1.0, 1e-9));
        }
      }
    }
  }
}

TEST_CASE("decomposition densities agree with recursive subset enumeration") {
  for (const Instance& g : test::random_instances(23, 60, {9, 9})) {
    const Side ground = Side::one;
    const DensityDecomposition d = density_decomposition(g, ground);
    std::vector<bool> gone_g(g.size(ground), false), gone_a(g.size(Side::zero), false);
    std::vector<double> expected(g.size(ground), 0.0);
    for (std::size_t round = 0; round <= g.size(ground); ++round) {
      bool any = false;
      for (bool b : gone_g) any = any || !b;
      if (!any) break;
      const test::RefDensest s = test::ref_densest(g, ground, gone_g, gone_a);
      for (std::size_t v : s.members) {
        expected[v] = s.density;
        gone_g[v] = true;
      }
      for (std::size_t a = 0; a < g.size(Side::zero); ++a) {
        bool inside = true;
        for (std::size_t e : g.incident(Side::zero, a)) inside = inside && gone_g[g.endpoint(e, ground)];
        if (inside) gone_a[a] = true;
      }
    }
    for (std::size_t v = 0; v < g.size(ground); ++v) {
      if (std::isinf(expected[v])) continue;
      CHECK(near_rel(d.density(ground)[v], expected[v], 1e-9));
    }
  }
}

TEST_CASE("exact maximin refinement reproduces the decomposition densities") {
  const Instance g = counterexample_instance(0.25);
  const Refinement alpha = exact_maximin_refinement(g, Side::zero);
  const PayloadVector p = payload_of(g, alpha);
  CHECK(near_rel(p.density[0], 1.0, 1e-12));
  CHECK(near_rel(p.density[1], 1.0, 1e-12));
  CHECK(near_rel(p.density[2], 0.3125, 1e-12));
  CHECK(alpha.values[*g.find_edge(1, 1)] == 0.0);

  const Refinement one = exact_maximin_refinement(test::single_edge(3.0, 2.0), Side::zero);
  CHECK(one.values[0] == 3.0);

  std::vector<VertexSpec> left, right;
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < 4; ++k) {
    left.push_back({"l" + std::to_string(k), 1.0});
    right.push_back({"r" + std::to_string(k), 1.0});
  }
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) edges.push_back({i, j});
  }
  const Instance complete(left, right, edges);
  for (double d : payload_of(complete, exact_maximin_refinement(complete, Side::zero)).density) {
    CHECK(near_rel(d, 1.0, 1e-12));
  }
}

TEST_CASE("exact maximin refinement from either side on random instances") {
  for (const Instance& g : test::random_instances(24, 80)) {
    for (Side s : {Side::zero, Side::one}) {
      const Refinement alpha = exact_maximin_refinement(g, s);
      validate_refinement(g, alpha);
      CHECK(is_locally_maximin(g, alpha).ok);
      const DensityDecomposition d = density_decomposition(g, other(s));
      const PayloadVector p = payload_of(g, alpha);
      for (std::size_t v = 0; v < g.size(other(s)); ++v) CHECK(near_rel(p.density[v], d.density(other(s))[v], 1e-9));
    }
  }
}

TEST_CASE("symmetry of the decomposition") {
  CHECK(verify_symmetry(counterexample_instance(0.25)));
  CHECK(verify_symmetry(test::single_edge(2.0, 3.0)));
  for (const Instance& g : test::random_instances(25, 50)) CHECK(verify_symmetry(g));
}

TEST_CASE("densest subset and matching optimum agree with reference computations") {
  for (const Instance& g : test::random_instances(26, 30, {8, 8, 1, 0.5, false})) {
    const DensestSubset s = maximal_densest_subset(g, Side::one);
    double ws = 0.0, wf = 0.0;
    for (std::size_t j : s.ground) ws += g.weight(Side::one, j);
    for (std::size_t i : s.closed) wf += g.weight(Side::zero, i);
    CHECK(near_rel(s.density, wf / ws, 1e-12));
    const DensityDecomposition d = density_decomposition(g, Side::one);
    const double lp = optimal_matching_value(d, {1.0, 1.0});
    CHECK(near_rel(lp, test::ref_matching_value(g, 1.0, 1.0), 1e-9));
  }
}
