#include "symdens/decomposition.hpp"

#include <algorithm>
#include <cmath>

#include "symdens/errors.hpp"
#include "symdens/maxflow.hpp"

namespace symdens {

namespace {

double weight_of(const Instance& instance, Side s, const std::vector<std::size_t>& set) {
  KahanSum sum;
  for (std::size_t v : set) sum.add(instance.weight(s, v));
  return sum.value();
}

// Peeling state: which vertices of each side are still present.
struct Residue {
  const Instance& instance;
  Side ground;
  std::vector<bool> alive_ground;
  std::vector<bool> alive_aux;

  Side aux() const { return other(ground); }

  std::size_t live_degree(Side s, std::size_t v) const {
    const std::vector<bool>& opposite = s == ground ? alive_aux : alive_ground;
    std::size_t d = 0;
    for (std::size_t e : instance.incident(s, v)) d += opposite[instance.endpoint(e, other(s))] ? 1 : 0;
    return d;
  }

  // Aux vertices whose live neighbors all lie in `in_set`.
  std::vector<std::size_t> closed_neighborhood(const std::vector<bool>& in_set) const {
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < instance.size(aux()); ++e) {
      if (!alive_aux[e]) continue;
      bool any = false, all = true;
      for (std::size_t k : instance.incident(aux(), e)) {
        const std::size_t j = instance.endpoint(k, ground);
        if (!alive_ground[j]) continue;
        any = true;
        if (!in_set[j]) {
          all = false;
          break;
        }
      }
      if (any && all) out.push_back(e);
    }
    return out;
  }

  DensestSubset densest() const {
    const Instance& g = instance;
    DensestSubset out;
    std::vector<std::size_t> lonely_aux;
    for (std::size_t e = 0; e < g.size(aux()); ++e) {
      if (alive_aux[e] && live_degree(aux(), e) == 0) lonely_aux.push_back(e);
    }
    if (!lonely_aux.empty()) {
      out.closed = std::move(lonely_aux);
      out.density = kInfinity;
      return out;
    }
    std::vector<std::size_t> candidates;
    for (std::size_t j = 0; j < g.size(ground); ++j) {
      if (alive_ground[j] && live_degree(ground, j) > 0) candidates.push_back(j);
    }
    if (candidates.empty()) {
      // No live aux vertex: every nonempty set has density 0.
      for (std::size_t j = 0; j < g.size(ground); ++j) {
        if (alive_ground[j]) out.ground.push_back(j);
      }
      out.density = 0.0;
      return out;
    }

    std::vector<std::size_t> aux_nodes;
    for (std::size_t e = 0; e < g.size(aux()); ++e) {
      if (alive_aux[e]) aux_nodes.push_back(e);
    }
    double scale = 0.0;
    for (std::size_t e : aux_nodes) scale += g.weight(aux(), e);
    for (std::size_t j : candidates) scale += g.weight(ground, j);

    std::vector<bool> chosen(g.size(ground), false);
    for (std::size_t j : candidates) chosen[j] = true;
    std::vector<std::size_t> best = candidates;
    double rate = weight_of(g, aux(), closed_neighborhood(chosen)) / weight_of(g, ground, best);

    // Dinkelbach iteration on the parametric cut w(F[S]) - rate * w(S).
    for (int round = 0; round < 256; ++round) {
      const std::size_t source = 0, sink = 1;
      std::vector<std::size_t> node_of_aux(g.size(aux())), node_of_ground(g.size(ground));
      std::size_t next = 2;
      for (std::size_t e : aux_nodes) node_of_aux[e] = next++;
      for (std::size_t j : candidates) node_of_ground[j] = next++;
      FlowNetwork net(next);
      for (std::size_t e : aux_nodes) {
        net.add_arc(source, node_of_aux[e], g.weight(aux(), e));
        for (std::size_t k : g.incident(aux(), e)) {
          const std::size_t j = g.endpoint(k, ground);
          if (alive_ground[j]) net.add_arc(node_of_aux[e], node_of_ground[j], kInfinity);
        }
      }
      for (std::size_t j : candidates) net.add_arc(node_of_ground[j], sink, rate * g.weight(ground, j));
      net.solve(source, sink);
      const std::vector<bool> side = net.maximal_source_side();

      std::vector<bool> in_cut(g.size(ground), false);
      std::vector<std::size_t> cut;
      for (std::size_t j : candidates) {
        if (side[node_of_ground[j]]) {
          in_cut[j] = true;
          cut.push_back(j);
        }
      }
      if (cut.empty()) break;
      const double w_cut = weight_of(g, ground, cut);
      const double w_closed = weight_of(g, aux(), closed_neighborhood(in_cut));
      const double gain = w_closed - rate * w_cut;
      best = std::move(cut);
      if (gain <= 1e-12 * scale) break;
      rate = w_closed / w_cut;
    }

    std::vector<bool> in_best(g.size(ground), false);
    for (std::size_t j : best) in_best[j] = true;
    out.ground = best;
    out.closed = closed_neighborhood(in_best);
    out.density = weight_of(g, aux(), out.closed) / weight_of(g, ground, out.ground);
    return out;
  }
};

void assign(Level& level, Side s, std::vector<std::size_t> set) {
  std::sort(set.begin(), set.end());
  (s == Side::zero ? level.side0 : level.side1) = std::move(set);
}

const std::vector<std::size_t>& members(const Level& level, Side s) {
  return s == Side::zero ? level.side0 : level.side1;
}

double reciprocal(double d) {
  if (d == 0.0) return kInfinity;
  if (std::isinf(d)) return 0.0;
  return 1.0 / d;
}

}  // namespace

namespace detail {

DensityDecomposition assemble_decomposition(const Instance& instance, Side ground, std::vector<Level> levels) {
  const Side aux = other(ground);
  DensityDecomposition out;
  out.ground = ground;

  // Merge neighbors whose densities agree up to rounding.
  for (Level& level : levels) {
    if (!out.levels.empty()) {
      Level& last = out.levels.back();
      if (std::isfinite(level.density) && std::isfinite(last.density) &&
          approx_equal(last.density, level.density, kRelTol)) {
        for (Side s : {Side::zero, Side::one}) {
          std::vector<std::size_t> merged = members(last, s);
          const auto& extra = members(level, s);
          merged.insert(merged.end(), extra.begin(), extra.end());
          assign(last, s, std::move(merged));
        }
        last.density = weight_of(instance, aux, members(last, aux)) / weight_of(instance, ground, members(last, ground));
        continue;
      }
    }
    out.levels.push_back(std::move(level));
  }

  for (Side s : {Side::zero, Side::one}) {
    out.rho_star[index_of(s)].assign(instance.size(s), 0.0);
    out.payload_star[index_of(s)].assign(instance.size(s), 0.0);
  }
  for (const Level& level : out.levels) {
    const bool lonely = members(level, aux).empty() || members(level, ground).empty();
    for (std::size_t j : members(level, ground)) {
      out.rho_star[index_of(ground)][j] = lonely ? 0.0 : level.density;
    }
    for (std::size_t e : members(level, aux)) {
      out.rho_star[index_of(aux)][e] = lonely ? 0.0 : reciprocal(level.density);
    }
  }
  for (Side s : {Side::zero, Side::one}) {
    for (std::size_t v = 0; v < instance.size(s); ++v) {
      out.payload_star[index_of(s)][v] = out.rho_star[index_of(s)][v] * instance.weight(s, v);
    }
  }
  return out;
}

}  // namespace detail

DensestSubset maximal_densest_subset(const Instance& instance, Side ground) {
  Residue residue{instance, ground, std::vector<bool>(instance.size(ground), true),
                  std::vector<bool>(instance.size(other(ground)), true)};
  return residue.densest();
}

DensityDecomposition density_decomposition(const Instance& instance, Side ground) {
  const Side aux = other(ground);
  Residue residue{instance, ground, std::vector<bool>(instance.size(ground), true),
                  std::vector<bool>(instance.size(aux), true)};
  std::vector<std::size_t> lonely_ground;
  for (std::size_t j = 0; j < instance.size(ground); ++j) {
    if (instance.isolated(ground, j)) {
      lonely_ground.push_back(j);
      residue.alive_ground[j] = false;
    }
  }
  std::vector<Level> levels;
  for (;;) {
    bool any = false;
    for (std::size_t e = 0; e < instance.size(aux) && !any; ++e) any = residue.alive_aux[e];
    for (std::size_t j = 0; j < instance.size(ground) && !any; ++j) any = residue.alive_ground[j];
    if (!any) break;
    DensestSubset peel = residue.densest();
    for (std::size_t j : peel.ground) residue.alive_ground[j] = false;
    for (std::size_t e : peel.closed) residue.alive_aux[e] = false;
    Level level;
    assign(level, ground, std::move(peel.ground));
    assign(level, aux, std::move(peel.closed));
    level.density = peel.density;
    levels.push_back(std::move(level));
  }
  if (!lonely_ground.empty()) {
    Level level;
    assign(level, ground, std::move(lonely_ground));
    level.density = 0.0;
    levels.push_back(std::move(level));
  }
  return detail::assemble_decomposition(instance, ground, std::move(levels));
}

Refinement exact_maximin_refinement(const Instance& instance, Side source) {
  const Side recv = other(source);
  const DensityDecomposition dec = density_decomposition(instance, recv);
  Refinement out{source, std::vector<double>(instance.edge_count(), 0.0)};

  for (const Level& level : dec.levels) {
    const auto& senders = members(level, source);
    const auto& receivers = members(level, recv);
    if (senders.empty() || receivers.empty()) continue;
    std::vector<std::size_t> node_of_sender(instance.size(source)), node_of_receiver(instance.size(recv));
    std::vector<bool> in_level(instance.size(recv), false);
    std::size_t next = 2;
    for (std::size_t i : senders) node_of_sender[i] = next++;
    for (std::size_t j : receivers) {
      node_of_receiver[j] = next++;
      in_level[j] = true;
    }
    FlowNetwork net(next);
    std::vector<std::pair<std::size_t, std::size_t>> arcs;  // (edge, arc handle)
    for (std::size_t i : senders) {
      net.add_arc(0, node_of_sender[i], instance.weight(source, i));
      for (std::size_t e : instance.incident(source, i)) {
        const std::size_t j = instance.endpoint(e, recv);
        if (in_level[j]) arcs.emplace_back(e, net.add_arc(node_of_sender[i], node_of_receiver[j], kInfinity));
      }
    }
    for (std::size_t j : receivers) net.add_arc(node_of_receiver[j], 1, level.density * instance.weight(recv, j));
    net.solve(0, 1);
    for (const auto& [e, handle] : arcs) out.values[e] = std::max(0.0, net.flow(handle));
  }

  // Remove flow rounding so each row sums to its weight.
  for (std::size_t i = 0; i < instance.size(source); ++i) {
    const auto& inc = instance.incident(source, i);
    if (inc.empty()) continue;
    KahanSum row;
    for (std::size_t e : inc) row.add(out.values[e]);
    if (!(row.value() > 0.0)) throw Error("maximin flow left a sender without outflow");
    const double factor = instance.weight(source, i) / row.value();
    for (std::size_t e : inc) out.values[e] *= factor;
  }
  return out;
}

bool same_levels_reversed(const DensityDecomposition& a, const DensityDecomposition& b, double rel_tol) {
  if (a.levels.size() != b.levels.size()) return false;
  const std::size_t n = a.levels.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Level& x = a.levels[k];
    const Level& y = b.levels[n - 1 - k];
    if (x.side0 != y.side0 || x.side1 != y.side1) return false;
    if (!approx_equal(x.density, reciprocal(y.density), rel_tol)) return false;
  }
  return true;
}

bool verify_symmetry(const Instance& instance) {
  return same_levels_reversed(density_decomposition(instance, Side::zero),
                              density_decomposition(instance, Side::one));
}

}  // namespace symdens
