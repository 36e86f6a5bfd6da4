#include "symdens/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "symdens/numeric.hpp"

namespace symdens {

namespace {

std::vector<VertexSpec> named(char prefix, const std::vector<double>& weights) {
  std::vector<VertexSpec> out;
  for (std::size_t k = 0; k < weights.size(); ++k) out.push_back({prefix + std::to_string(k + 1), weights[k]});
  return out;
}

double random_weight(Rng& rng, bool integer) {
  if (integer) return static_cast<double>(uniform_index(rng, 1, 5));
  return uniform(rng, 0.1, 3.0);
}

}  // namespace

Instance counterexample_instance(double tau) {
  return Instance(named('i', {2.0, tau, 1.0}), named('j', {1.0, 1.0, 1.0 / tau}),
                  {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}});
}

Refinement counterexample_mistaken_refinement(const Instance& instance, double tau) {
  Refinement alpha{Side::zero, std::vector<double>(instance.edge_count(), 0.0)};
  alpha.values[*instance.find_edge(0, 0)] = 1.0;
  alpha.values[*instance.find_edge(0, 1)] = 1.0;
  alpha.values[*instance.find_edge(1, 1)] = tau;
  alpha.values[*instance.find_edge(2, 2)] = 1.0;
  return alpha;
}

std::vector<double> reference_distribution_p() { return {0.0, 0.1, 0.14, 0.11, 0.41, 0.24}; }
std::vector<double> reference_distribution_q() { return {0.15, 0.3, 0.2, 0.1, 0.25, 0.0}; }

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

Instance random_instance(Rng& rng, const RandomInstanceOptions& options) {
  const std::size_t n0 = uniform_index(rng, options.min_side, options.max_side0);
  const std::size_t n1 = uniform_index(rng, options.min_side, options.max_side1);
  const bool integer = uniform01(rng) < 0.5;
  std::vector<double> w0(n0), w1(n1);
  for (double& w : w0) w = random_weight(rng, integer);
  for (double& w : w1) w = random_weight(rng, integer);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      if (uniform01(rng) < options.edge_probability) edges.push_back({i, j});
    }
  }
  if (!options.allow_isolated) {
    std::vector<bool> hit0(n0, false), hit1(n1, false);
    for (const Edge& e : edges) hit0[e.v0] = hit1[e.v1] = true;
    for (std::size_t i = 0; i < n0; ++i) {
      if (!hit0[i]) {
        const std::size_t j = uniform_index(rng, 0, n1 - 1);
        edges.push_back({i, j});
        hit1[j] = true;
      }
    }
    for (std::size_t j = 0; j < n1; ++j) {
      if (!hit1[j]) edges.push_back({uniform_index(rng, 0, n0 - 1), j});
    }
  }
  return Instance(named('i', w0), named('j', w1), std::move(edges));
}

Instance transportation_instance(Rng& rng, std::size_t side0, std::size_t side1) {
  std::vector<double> w0(side0, 0.0), w1(side1, 0.0);
  std::vector<Edge> edges;
  auto place = [&](std::size_t i, std::size_t j) {
    const double mass = uniform(rng, 0.1, 2.0);
    w0[i] += mass;
    w1[j] += mass;
    edges.push_back({i, j});
  };
  // A spanning path keeps every vertex covered; extra edges come on top.
  for (std::size_t k = 0; k < std::max(side0, side1); ++k) place(std::min(k, side0 - 1), std::min(k, side1 - 1));
  for (std::size_t i = 0; i < side0; ++i) {
    for (std::size_t j = 0; j < side1; ++j) {
      const bool used = std::min(i, side1 - 1) == j || std::min(j, side0 - 1) == i;
      if (!used && uniform01(rng) < 0.3) place(i, j);
    }
  }
  return Instance(named('i', w0), named('j', w1), std::move(edges));
}

Refinement random_refinement(Rng& rng, const Instance& instance, Side source) {
  Refinement alpha{source, std::vector<double>(instance.edge_count(), 0.0)};
  for (std::size_t v = 0; v < instance.size(source); ++v) {
    const auto& inc = instance.incident(source, v);
    if (inc.empty()) continue;
    KahanSum total;
    std::vector<double> draw(inc.size());
    for (double& d : draw) {
      d = uniform01(rng) < 0.2 ? 0.0 : uniform(rng, 0.01, 1.0);
      total.add(d);
    }
    if (total.value() == 0.0) {
      draw.front() = 1.0;
      total = KahanSum{};
      total.add(1.0);
    }
    for (std::size_t k = 0; k < inc.size(); ++k) alpha.values[inc[k]] = instance.weight(source, v) * draw[k] / total.value();
  }
  return alpha;
}

std::vector<double> random_distribution(Rng& rng, std::size_t atoms) {
  std::vector<double> p(atoms);
  KahanSum total;
  for (double& x : p) {
    x = uniform01(rng) < 0.15 ? 0.0 : uniform(rng, 0.01, 1.0);
    total.add(x);
  }
  if (total.value() == 0.0) {
    p.front() = 1.0;
    return p;
  }
  for (double& x : p) x /= total.value();
  return p;
}

PowerFunction random_curve(Rng& rng, std::size_t atoms) {
  const auto p = random_distribution(rng, atoms);
  const auto q = random_distribution(rng, atoms);
  return power_function(p, q);
}

FisherMarket random_fisher_market(Rng& rng, std::size_t buyers, std::size_t sellers) {
  FisherMarket m;
  m.valuation = DenseMatrix(buyers, sellers);
  for (std::size_t i = 0; i < buyers; ++i) {
    m.buyers.push_back("b" + std::to_string(i + 1));
    m.budgets.push_back(uniform(rng, 0.5, 3.0));
  }
  for (std::size_t j = 0; j < sellers; ++j) m.sellers.push_back("s" + std::to_string(j + 1));
  for (std::size_t i = 0; i < buyers; ++i) {
    for (std::size_t j = 0; j < sellers; ++j) {
      if (uniform01(rng) < 0.7) m.valuation(i, j) = uniform(rng, 0.1, 5.0);
    }
  }
  // Every buyer values some good and every good has some buyer.
  for (std::size_t i = 0; i < buyers; ++i) {
    bool any = false;
    for (std::size_t j = 0; j < sellers; ++j) any = any || m.valuation(i, j) > 0.0;
    if (!any) m.valuation(i, uniform_index(rng, 0, sellers - 1)) = uniform(rng, 0.1, 5.0);
  }
  for (std::size_t j = 0; j < sellers; ++j) {
    bool any = false;
    for (std::size_t i = 0; i < buyers; ++i) any = any || m.valuation(i, j) > 0.0;
    if (!any) m.valuation(uniform_index(rng, 0, buyers - 1), j) = uniform(rng, 0.1, 5.0);
  }
  return m;
}

}  // namespace symdens
