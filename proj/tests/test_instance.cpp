#include <doctest.h>

#include "support.hpp"
#include "symdens/decomposition.hpp"
#include "symdens/errors.hpp"
#include "symdens/io.hpp"

using namespace symdens;
using symdens::test::near;

namespace {

const char* kCounterexampleJson = R"({"side0":[{"id":"i1","w":2},{"id":"i2","w":0.25},{"id":"i3","w":1}],
  "side1":[{"id":"j1","w":1},{"id":"j2","w":1},{"id":"j3","w":4}],
  "edges":[["i1","j1"],["i1","j2"],["i2","j2"],["i2","j3"],["i3","j3"]]})";

}  // namespace

TEST_CASE("load_instance reads the counterexample file") {
  const Instance g = load_instance(kCounterexampleJson);
  CHECK(g.size(Side::zero) == 3);
  CHECK(g.size(Side::one) == 3);
  CHECK(g.edge_count() == 5);
  CHECK(g == counterexample_instance(0.25));
}

TEST_CASE("load_instance accepts the minimal instance") {
  const Instance g = load_instance(R"({"side0":[{"id":"a","w":1}],"side1":[{"id":"b","w":1}],"edges":[["a","b"]]})");
  CHECK(g.edge_count() == 1);
  CHECK(g.total_weight(Side::zero) == 1.0);
}

TEST_CASE("load_instance rejects invalid documents") {
  CHECK_THROWS_WITH_AS(load_instance(R"({"side0":[{"id":"a","w":0}],"side1":[{"id":"b","w":1}],"edges":[]})"),
                       doctest::Contains("non-positive weight"), InputError);
  CHECK_THROWS_AS(load_instance(R"({"side0":[{"id":"a","w":1}],"side1":[{"id":"b","w":1}],"edges":[["a","x"]]})"),
                  InputError);
  CHECK_THROWS_AS(
      load_instance(R"({"side0":[{"id":"a","w":1}],"side1":[{"id":"b","w":1}],"edges":[["a","b"],["a","b"]]})"),
      InputError);
  CHECK_THROWS_AS(load_instance(R"({"side0":[{"id":"a","w":1}],"side1":[{"id":"a","w":1}],"edges":[]})"), InputError);
  CHECK_THROWS_AS(load_instance("{not json"), InputError);
  CHECK_THROWS_AS(load_instance(R"({"side0":[]})"), InputError);
}

TEST_CASE("isolated vertices are retained and flagged") {
  const Instance g({{"a", 1}, {"b", 2}}, {{"x", 1}, {"y", 1}}, {{0, 0}});
  CHECK(g.isolated(Side::zero, 1));
  CHECK(g.isolated(Side::one, 1));
  CHECK(g.has_isolated());
}

TEST_CASE("payload_of on the counterexample refinement") {
  const Instance g = counterexample_instance(0.25);
  const PayloadVector p = payload_of(g, counterexample_mistaken_refinement(g, 0.25));
  CHECK(p.side == Side::one);
  CHECK(near(p.density[0], 1.0, 1e-15));
  CHECK(near(p.density[1], 1.25, 1e-15));
  CHECK(near(p.density[2], 0.25, 1e-15));
}

TEST_CASE("payload_of on small instances") {
  const Instance edge = test::single_edge();
  const PayloadVector p = payload_of(edge, Refinement{Side::zero, {1.0}});
  CHECK(p.payload[0] == 1.0);
  CHECK(p.density[0] == 1.0);

  const Instance star({{"i", 3}}, {{"a", 1}, {"b", 1}, {"c", 1}}, {{0, 0}, {0, 1}, {0, 2}});
  const PayloadVector q = payload_of(star, Refinement{Side::zero, {1.0, 1.0, 1.0}});
  for (double d : q.density) CHECK(d == 1.0);
}

TEST_CASE("payload_of rejects a refinement with a wrong row sum") {
  const Instance g = counterexample_instance(0.25);
  Refinement bad = counterexample_mistaken_refinement(g, 0.25);
  bad.values[0] = 0.5;
  CHECK_THROWS_AS(payload_of(g, bad), RefinementError);
  bad.values[0] = -1.0;
  CHECK_THROWS_AS(payload_of(g, bad), RefinementError);
}

TEST_CASE("proportional_response misleads i2 on the counterexample") {
  const Instance g = counterexample_instance(0.25);
  const Refinement back = proportional_response(g, counterexample_mistaken_refinement(g, 0.25));
  CHECK(back.source == Side::one);
  CHECK(near(back.values[*g.find_edge(1, 1)], 0.2, 1e-15));
  const PayloadVector p = payload_of(g, back);
  CHECK(near(p.density[1], 0.8, 1e-15));
}

TEST_CASE("proportional_response on one edge returns the whole weight") {
  const Instance g = test::single_edge(1.0, 3.0);
  const Refinement back = proportional_response(g, Refinement{Side::zero, {1.0}});
  CHECK(back.values[0] == 3.0);
}

TEST_CASE("proportional_response refuses zero-payload receivers") {
  const Instance g({{"a", 1}}, {{"x", 1}, {"y", 1}}, {{0, 0}, {0, 1}});
  CHECK_THROWS_AS(proportional_response(g, Refinement{Side::zero, {1.0, 0.0}}), ZeroPayloadError);
}

TEST_CASE("is_locally_maximin on the counterexample") {
  const Instance g = counterexample_instance(0.25);
  CHECK(is_locally_maximin(g, exact_maximin_refinement(g, Side::zero)).ok);
  const MaximinReport bad = is_locally_maximin(g, counterexample_mistaken_refinement(g, 0.25));
  REQUIRE_FALSE(bad.ok);
  // i1 also feeds j2 while j1 is cheaper; i2 is the one starving j3.
  REQUIRE(bad.violations.size() == 2);
  CHECK(bad.violations[1].sender == 1);
  CHECK(bad.violations[1].receiver == 1);
  CHECK(bad.violations[1].min_neighbor == 2);
  CHECK(is_locally_maximin(test::single_edge(), Refinement{Side::zero, {1.0}}).ok);
}

TEST_CASE("multiplicative_error examples") {
  const std::vector<double> exact{1.0, 1.0, 0.3125};
  CHECK(multiplicative_error(exact, exact) == 0.0);
  CHECK(near(multiplicative_error(std::vector<double>{1.0, 1.25, 0.25}, exact), 0.25, 1e-15));
  CHECK(multiplicative_error(std::vector<double>{2.0, 2.0, 0.625}, exact) == 1.0);
  CHECK_THROWS_AS(multiplicative_error(std::vector<double>{1.0}, exact), InputError);
}

TEST_CASE("response properties on random refinements") {
  Rng rng(7);
  for (const Instance& g : test::random_instances(11, 60)) {
    for (Side s : {Side::zero, Side::one}) {
      const Refinement alpha = random_refinement(rng, g, s);
      validate_refinement(g, alpha);
      const PayloadVector p = payload_of(g, alpha);
      bool positive = true;
      for (std::size_t v = 0; v < g.size(other(s)); ++v) {
        positive = positive && (g.isolated(other(s), v) || p.payload[v] > 0.0);
      }
      if (!positive) continue;
      const Refinement back = proportional_response(g, alpha);
      CHECK_NOTHROW(validate_refinement(g, back));
      for (std::size_t e = 0; e < g.edge_count(); ++e) {
        if (alpha.values[e] == 0.0) CHECK(back.values[e] == 0.0);
      }
    }
  }
}

TEST_CASE("involution and reciprocity on maximin refinements") {
  for (const Instance& g : test::random_instances(12, 60, {8, 8, 1, 0.4, false})) {
    const Refinement alpha = exact_maximin_refinement(g, Side::zero);
    REQUIRE(is_locally_maximin(g, alpha).ok);
    const Refinement back = proportional_response(g, alpha);
    const Refinement again = proportional_response(g, back);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      CHECK(test::near_rel(again.values[e], alpha.values[e], 1e-9));
    }
    const PayloadVector r1 = payload_of(g, alpha);
    const PayloadVector r0 = payload_of(g, back);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      if (alpha.values[e] <= 0.0) continue;
      const Edge& ed = g.edges()[e];
      CHECK(test::near_rel(r0.density[ed.v0] * r1.density[ed.v1], 1.0, 1e-9));
    }
  }
}

TEST_CASE("scaled instances and normalization") {
  const Instance g = counterexample_instance(0.25);
  const DistributionInstance d = DistributionInstance::normalize(g);
  CHECK(near(d.instance().total_weight(Side::zero), 1.0, 1e-12));
  CHECK(near(d.instance().total_weight(Side::one), 1.0, 1e-12));
  CHECK(d.factor(Side::zero) == 3.25);
  CHECK(d.factor(Side::one) == 6.0);
  CHECK_THROWS_AS(g.scaled(0.0, 1.0), InputError);
}
