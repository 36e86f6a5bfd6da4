#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "symdens/instance.hpp"
#include "symdens/market.hpp"
#include "symdens/power.hpp"

namespace symdens {

// Three-by-three instance with weights (2, tau, 1) and (1, 1, 1/tau) on the
// path i1-j1, i1-j2, i2-j2, i2-j3, i3-j3.
Instance counterexample_instance(double tau);

// Side-0 refinement of the counterexample with multiplicative error tau on
// side 1 whose proportional response misleads i2.
Refinement counterexample_mistaken_refinement(const Instance& instance, double tau);

// Atom probabilities of the reference power curve.
std::vector<double> reference_distribution_p();
std::vector<double> reference_distribution_q();

// Uniform draws built from raw engine output so results do not depend on the
// standard library's distribution implementations.
using Rng = std::mt19937_64;
double uniform01(Rng& rng);
double uniform(Rng& rng, double lo, double hi);
std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi);  // inclusive

struct RandomInstanceOptions {
  std::size_t max_side0 = 12;
  std::size_t max_side1 = 12;
  std::size_t min_side = 1;
  double edge_probability = 0.4;
  bool allow_isolated = true;
};

// Weights are small integers or continuous draws, chosen per instance.
Instance random_instance(Rng& rng, const RandomInstanceOptions& options = {});

// Instance whose weights are the marginals of a random transport plan on its
// edge set, so every vertex has density 1.
Instance transportation_instance(Rng& rng, std::size_t side0, std::size_t side1);

// Random refinement from one side spread over each sender's edges.
Refinement random_refinement(Rng& rng, const Instance& instance, Side source);

// Probability vector with a few zero atoms.
std::vector<double> random_distribution(Rng& rng, std::size_t atoms);

PowerFunction random_curve(Rng& rng, std::size_t atoms);

FisherMarket random_fisher_market(Rng& rng, std::size_t buyers, std::size_t sellers);

}  // namespace symdens
