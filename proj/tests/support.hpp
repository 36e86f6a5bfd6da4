#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <vector>

#include "symdens/decomposition.hpp"
#include "symdens/fixtures.hpp"
#include "symdens/instance.hpp"

namespace symdens::test {

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline bool near_rel(double a, double b, double rel) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

// Subset enumeration written against the raw edge list, independent of the
// library's oracle module.
struct RefDensest {
  std::vector<std::size_t> members;
  double density = 0.0;
};

inline RefDensest ref_densest(const Instance& g, Side ground, const std::vector<bool>& removed_ground = {},
                              const std::vector<bool>& removed_aux = {}) {
  const Side aux = other(ground);
  const std::size_t n = g.size(ground);
  auto gone_g = [&](std::size_t v) { return !removed_ground.empty() && removed_ground[v]; };
  auto gone_a = [&](std::size_t v) { return !removed_aux.empty() && removed_aux[v]; };
  std::vector<double> ratio(std::size_t{1} << n, 0.0);
  double best = -1.0;
  for (std::size_t mask = 0; mask < ratio.size(); ++mask) {
    bool skip = false;
    double ws = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      if (mask >> v & 1) {
        skip = skip || gone_g(v);
        ws += g.weight(ground, v);
      }
    }
    if (skip) {
      ratio[mask] = -1.0;
      continue;
    }
    double wf = 0.0;
    for (std::size_t a = 0; a < g.size(aux); ++a) {
      if (gone_a(a)) continue;
      bool inside = true;
      for (const Edge& e : g.edges()) {
        const std::size_t av = aux == Side::zero ? e.v0 : e.v1;
        const std::size_t gv = aux == Side::zero ? e.v1 : e.v0;
        if (av == a && !gone_g(gv) && !(mask >> gv & 1)) inside = false;
      }
      if (inside) wf += g.weight(aux, a);
    }
    ratio[mask] = ws == 0.0 ? (wf == 0.0 ? 0.0 : std::numeric_limits<double>::infinity()) : wf / ws;
    best = std::max(best, ratio[mask]);
  }
  RefDensest out;
  out.density = best;
  std::size_t uni = 0;
  for (std::size_t mask = 0; mask < ratio.size(); ++mask) {
    if (ratio[mask] >= 0.0 && (ratio[mask] == best || (std::isfinite(best) && ratio[mask] >= best * (1 - 1e-12)))) {
      uni |= mask;
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (uni >> v & 1) out.members.push_back(v);
  }
  return out;
}

// Edmonds-Karp on a dense capacity matrix.
inline double ref_max_flow(std::vector<std::vector<double>> cap, std::size_t s, std::size_t t) {
  const std::size_t n = cap.size();
  double total = 0.0;
  for (;;) {
    std::vector<std::size_t> parent(n, n);
    parent[s] = s;
    std::deque<std::size_t> queue{s};
    while (!queue.empty() && parent[t] == n) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t v = 0; v < n; ++v) {
        if (parent[v] == n && cap[u][v] > 1e-15) {
          parent[v] = u;
          queue.push_back(v);
        }
      }
    }
    if (parent[t] == n) return total;
    double push = std::numeric_limits<double>::infinity();
    for (std::size_t v = t; v != s; v = parent[v]) push = std::min(push, cap[parent[v]][v]);
    for (std::size_t v = t; v != s; v = parent[v]) {
      cap[parent[v]][v] -= push;
      cap[v][parent[v]] += push;
    }
    total += push;
  }
}

// Capacitated matching value computed by the reference flow.
inline double ref_matching_value(const Instance& g, double c0, double c1) {
  const std::size_t n0 = g.size(Side::zero), n1 = g.size(Side::one);
  const std::size_t s = n0 + n1, t = s + 1;
  std::vector<std::vector<double>> cap(t + 1, std::vector<double>(t + 1, 0.0));
  for (std::size_t i = 0; i < n0; ++i) cap[s][i] = c0 * g.weight(Side::zero, i);
  for (std::size_t j = 0; j < n1; ++j) cap[n0 + j][t] = c1 * g.weight(Side::one, j);
  for (const Edge& e : g.edges()) cap[e.v0][n0 + e.v1] = 1e300;
  return ref_max_flow(std::move(cap), s, t);
}

inline std::vector<Instance> random_instances(std::uint64_t seed, std::size_t count, RandomInstanceOptions options = {}) {
  Rng rng(seed);
  std::vector<Instance> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(random_instance(rng, options));
  return out;
}

inline Instance single_edge(double w0 = 1.0, double w1 = 1.0) {
  return Instance({{"i", w0}}, {{"j", w1}}, {{0, 0}});
}

}  // namespace symdens::test
