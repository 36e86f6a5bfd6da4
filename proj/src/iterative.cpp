#include "symdens/iterative.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "symdens/errors.hpp"

namespace symdens {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> densities(const Instance& instance, Side side, const std::vector<double>& payload) {
  std::vector<double> out(payload.size());
  for (std::size_t v = 0; v < payload.size(); ++v) out[v] = payload[v] / instance.weight(side, v);
  return out;
}

double kl_to(std::span<const double> target, std::span<const double> current) {
  KahanSum sum;
  for (std::size_t e = 0; e < target.size(); ++e) {
    if (target[e] == 0.0) continue;
    if (current[e] <= 0.0) return kInfinity;
    sum.add(target[e] * std::log(target[e] / current[e]));
  }
  return sum.value();
}

void require_hypergraph(const Instance& instance) {
  if (instance.edge_count() == 0) throw DomainError("convex solvers need at least one edge");
}

std::vector<double> even_split(const Instance& instance) {
  std::vector<double> alpha(instance.edge_count(), 0.0);
  for (std::size_t e = 0; e < instance.size(Side::zero); ++e) {
    const auto& inc = instance.incident(Side::zero, e);
    for (std::size_t k : inc) alpha[k] = instance.weight(Side::zero, e) / static_cast<double>(inc.size());
  }
  return alpha;
}

// Trace row of a side-0 refinement for the convex solvers.
TraceRow convex_row(const Instance& instance, std::size_t t, const std::vector<double>& alpha,
                    const DensityDecomposition* exact, const std::function<double(double)>& bound) {
  TraceRow row;
  row.iter = t;
  row.objective = quadratic_objective(instance, alpha);
  row.eta = kNaN;
  row.eta_bar = kNaN;
  row.abs_err_w = kNaN;
  row.bound_mult = kNaN;
  row.bound_mult_eta = kNaN;
  row.bound_abs = t >= 1 ? bound(static_cast<double>(t)) : kNaN;
  if (exact) {
    const std::vector<double> rho = densities(instance, Side::one, detail::receive(instance, Side::zero, alpha));
    row.abs_err_w = weighted_distance(instance, Side::one, rho, exact->density(Side::one));
    row.eta_bar = multiplicative_error(instance, Side::one, rho, exact->density(Side::one));
  }
  return row;
}

void check_config(const SolverConfig& config) {
  if (config.learning_rate && !(*config.learning_rate > 0.0)) throw DomainError("learning rate must be positive");
}

}  // namespace

SuperRefinement initial_super_refinement(const Instance& instance, Side source) {
  const Side recv = other(source);
  const double n_bar = static_cast<double>(instance.size(recv));
  if (n_bar == 0.0) throw DomainError("receiving side is empty");
  SuperRefinement out;
  out.source = source;
  out.edge_values.resize(instance.edge_count());
  for (std::size_t e = 0; e < instance.edge_count(); ++e) {
    out.edge_values[e] = instance.weight(source, instance.endpoint(e, source)) / n_bar;
  }
  out.off_edge_mass.resize(instance.size(source));
  for (std::size_t i = 0; i < instance.size(source); ++i) {
    out.off_edge_mass[i] = instance.weight(source, i) * (n_bar - static_cast<double>(instance.degree(source, i))) / n_bar;
  }
  return out;
}

PrResult run_proportional_response(const Instance& instance, const SolverConfig& config,
                                   const DensityDecomposition* exact, const Refinement* alpha_star) {
  check_config(config);
  const Side src = config.source;
  const Side recv = other(src);
  if (alpha_star && alpha_star->source != src) throw InputError("alpha* must come from the source side");
  const BoundReport bounds = compute_bounds(instance, src);

  std::vector<double> forward = initial_super_refinement(instance, src).edge_values;
  std::vector<double> backward;
  PrResult result;

  for (std::size_t t = 0;; ++t) {
    if (t > 0) forward = detail::respond(instance, recv, backward);
    const std::vector<double> received = detail::receive(instance, src, forward);
    backward = detail::respond(instance, src, forward);

    if (config.record_trace) {
      TraceRow row;
      row.iter = t;
      row.bound_abs = kNaN;
      row.bound_mult = t >= 1 ? bounds.pr_eta_bar_bound(static_cast<double>(t)) : kNaN;
      row.bound_mult_eta = t >= 1 ? bounds.pr_eta_bound(static_cast<double>(t)) : kNaN;
      const bool side0_valid = src == Side::one || t >= 1;
      const std::vector<double>& alpha0 = src == Side::zero ? forward : backward;
      row.objective = side0_valid ? quadratic_objective(instance, alpha0) : kNaN;
      row.abs_err_w = kNaN;
      row.eta = kNaN;
      row.eta_bar = kNaN;
      if (exact) {
        const std::vector<double> rho_recv = densities(instance, recv, received);
        const std::vector<double> rho_src = densities(instance, src, detail::receive(instance, recv, backward));
        row.eta_bar = multiplicative_error(instance, recv, rho_recv, exact->density(recv));
        row.eta = multiplicative_error(instance, src, rho_src, exact->density(src));
        if (side0_valid) {
          const std::vector<double>& rho1 = src == Side::zero ? rho_recv
                                                               : densities(instance, Side::one,
                                                                           detail::receive(instance, Side::zero, alpha0));
          row.abs_err_w = weighted_distance(instance, Side::one, rho1, exact->density(Side::one));
        }
      }
      if (alpha_star) row.kl = kl_to(alpha_star->values, forward);
      result.trace.rows.push_back(row);
    }
    if (t == config.iterations) break;
  }

  Refinement fwd{src, std::move(forward)};
  Refinement bwd{recv, std::move(backward)};
  if (src == Side::zero) {
    result.pair = {std::move(fwd), std::move(bwd)};
  } else {
    result.pair = {std::move(bwd), std::move(fwd)};
  }
  return result;
}

ConvexResult run_frank_wolfe(const Instance& instance, const SolverConfig& config, const DensityDecomposition* exact) {
  check_config(config);
  require_hypergraph(instance);
  const BoundReport bounds = compute_bounds(instance, Side::zero);
  const auto bound = [&](double t) { return bounds.frank_wolfe_bound(t); };
  std::vector<double> alpha = even_split(instance);
  ConvexResult result;
  if (config.record_trace) result.trace.rows.push_back(convex_row(instance, 0, alpha, exact, bound));

  for (std::size_t t = 1; t <= config.iterations; ++t) {
    const std::vector<double> payload = detail::receive(instance, Side::zero, alpha);
    const std::vector<double> rho = densities(instance, Side::one, payload);
    const double step = 2.0 / (static_cast<double>(t) + 2.0);
    for (std::size_t e = 0; e < instance.size(Side::zero); ++e) {
      const auto& inc = instance.incident(Side::zero, e);
      if (inc.empty()) continue;
      // Incident edges are ordered by side-1 index, so the first minimum wins ties.
      std::size_t best = inc.front();
      for (std::size_t k : inc) {
        if (rho[instance.endpoint(k, Side::one)] < rho[instance.endpoint(best, Side::one)]) best = k;
      }
      for (std::size_t k : inc) alpha[k] *= 1.0 - step;
      alpha[best] += step * instance.weight(Side::zero, e);
    }
    if (config.record_trace) result.trace.rows.push_back(convex_row(instance, t, alpha, exact, bound));
  }
  result.alpha = {Side::zero, std::move(alpha)};
  return result;
}

ConvexResult run_fista(const Instance& instance, const SolverConfig& config, const DensityDecomposition* exact) {
  check_config(config);
  require_hypergraph(instance);
  const BoundReport bounds = compute_bounds(instance, Side::zero);
  const auto bound = [&](double t) { return bounds.fista_bound(t); };
  const double rate = config.learning_rate ? *config.learning_rate : 1.0 / bounds.lipschitz_bound;

  std::vector<double> alpha = even_split(instance);
  std::vector<double> previous = alpha;
  std::vector<double> look = alpha;
  ConvexResult result;
  if (config.record_trace) result.trace.rows.push_back(convex_row(instance, 0, alpha, exact, bound));

  std::vector<double> block;
  for (std::size_t t = 1; t <= config.iterations; ++t) {
    const std::vector<double> rho = densities(instance, Side::one, detail::receive(instance, Side::zero, look));
    for (std::size_t e = 0; e < instance.size(Side::zero); ++e) {
      const auto& inc = instance.incident(Side::zero, e);
      if (inc.empty()) continue;
      block.clear();
      for (std::size_t k : inc) block.push_back(look[k] - rate * 2.0 * rho[instance.endpoint(k, Side::one)]);
      const std::vector<double> projected = project_to_simplex(block, instance.weight(Side::zero, e));
      for (std::size_t m = 0; m < inc.size(); ++m) alpha[inc[m]] = projected[m];
    }
    const double momentum = (static_cast<double>(t) - 1.0) / (static_cast<double>(t) + 2.0);
    for (std::size_t k = 0; k < alpha.size(); ++k) look[k] = alpha[k] + momentum * (alpha[k] - previous[k]);
    previous = alpha;
    if (config.record_trace) result.trace.rows.push_back(convex_row(instance, t, alpha, exact, bound));
  }
  result.alpha = {Side::zero, std::move(alpha)};
  return result;
}

std::vector<double> project_to_simplex(std::span<const double> y, double total) {
  if (y.empty()) throw DomainError("cannot project onto an empty simplex");
  std::vector<double> sorted(y.begin(), y.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double prefix = 0.0;
  double shift = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    prefix += sorted[k];
    const double candidate = (prefix - total) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) shift = candidate;
  }
  std::vector<double> out(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) out[k] = std::max(y[k] - shift, 0.0);
  return out;
}

double quadratic_objective(const Instance& instance, std::span<const double> alpha0) {
  const std::vector<double> payload = detail::receive(instance, Side::zero, alpha0);
  KahanSum q;
  for (std::size_t j = 0; j < payload.size(); ++j) q.add(payload[j] * payload[j] / instance.weight(Side::one, j));
  return q.value();
}

double optimal_objective(const Instance& instance, const DensityDecomposition& decomp) {
  const auto& payload = decomp.payload(Side::one);
  KahanSum q;
  for (std::size_t j = 0; j < payload.size(); ++j) q.add(payload[j] * payload[j] / instance.weight(Side::one, j));
  return q.value();
}

double weighted_distance(const Instance& instance, Side side, std::span<const double> a, std::span<const double> b) {
  if (a.size() != instance.size(side) || b.size() != instance.size(side)) throw InputError("density vector size mismatch");
  KahanSum sum;
  for (std::size_t v = 0; v < a.size(); ++v) {
    const double d = a[v] - b[v];
    sum.add(instance.weight(side, v) * d * d);
  }
  return std::sqrt(sum.value());
}

double BoundReport::pr_eta_bar_bound(double t) const {
  return std::sqrt(16.0 * n / u_bar_min * std::log(n * n_bar) / t);
}

double BoundReport::pr_eta_bound(double t) const {
  return std::sqrt(16.0 * n_bar / u_min * std::log(n_bar / u_min) / t);
}

double BoundReport::frank_wolfe_bound(double t) const {
  return 2.0 * std::sqrt(delta_w * sum_sq_weights / (t + 2.0));
}

double BoundReport::fista_bound(double t) const { return std::sqrt(8.0 * delta_w * sum_sq_weights) / t; }

BoundReport compute_bounds(const Instance& instance, Side source) {
  const Side recv = other(source);
  BoundReport r;
  r.source = source;
  r.n = static_cast<double>(instance.size(source));
  r.n_bar = static_cast<double>(instance.size(recv));
  r.weight_sum0 = instance.total_weight(Side::zero);
  r.weight_sum1 = instance.total_weight(Side::one);
  r.degenerate = instance.size(Side::zero) == 0 || instance.size(Side::one) == 0 || instance.edge_count() == 0;
  if (r.degenerate) return r;

  // Weight sums over open neighborhoods.
  std::vector<double> around[2];
  for (Side s : {Side::zero, Side::one}) {
    around[index_of(s)].assign(instance.size(s), 0.0);
    for (std::size_t v = 0; v < instance.size(s); ++v) {
      KahanSum sum;
      for (std::size_t e : instance.incident(s, v)) sum.add(instance.weight(other(s), instance.endpoint(e, other(s))));
      around[index_of(s)][v] = sum.value();
    }
  }
  r.u_min = kInfinity;
  r.u_bar_min = kInfinity;
  for (std::size_t e = 0; e < instance.edge_count(); ++e) {
    const std::size_t i = instance.endpoint(e, source);
    const std::size_t j = instance.endpoint(e, recv);
    r.u_min = std::min(r.u_min, instance.weight(source, i) / around[index_of(recv)][j]);
    r.u_bar_min = std::min(r.u_bar_min, instance.weight(recv, j) / around[index_of(source)][i]);
  }
  for (std::size_t j = 0; j < instance.size(Side::one); ++j) {
    r.delta_w = std::max(r.delta_w, static_cast<double>(instance.degree(Side::one, j)) / instance.weight(Side::one, j));
  }
  KahanSum sq;
  for (std::size_t e = 0; e < instance.size(Side::zero); ++e) {
    if (!instance.isolated(Side::zero, e)) sq.add(instance.weight(Side::zero, e) * instance.weight(Side::zero, e));
  }
  r.sum_sq_weights = sq.value();
  r.diameter_sq_bound = 2.0 * r.sum_sq_weights;
  r.lipschitz_bound = 2.0 * r.delta_w;

  for (double target : {0.5, 0.1, 0.01}) {
    IterationPrediction p;
    p.target = target;
    p.pr_rounds_eta_bar = std::ceil(16.0 * r.n / r.u_bar_min * std::log(r.n * r.n_bar) / (target * target));
    p.pr_rounds_eta = std::ceil(16.0 * r.n_bar / r.u_min * std::log(r.n_bar / r.u_min) / (target * target));
    p.frank_wolfe_steps = std::max(1.0, std::ceil(4.0 * r.delta_w * r.sum_sq_weights / (target * target) - 2.0));
    p.fista_steps = std::max(1.0, std::ceil(std::sqrt(8.0 * r.delta_w * r.sum_sq_weights) / target));
    r.predictions.push_back(p);
  }
  return r;
}

}  // namespace symdens
