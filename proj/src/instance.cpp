#include "symdens/instance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "symdens/errors.hpp"

namespace symdens {

Side side_from_int(int value) {
  if (value == 0) return Side::zero;
  if (value == 1) return Side::one;
  throw InputError("side must be 0 or 1, got " + std::to_string(value));
}

Instance::Instance(std::vector<VertexSpec> side0, std::vector<VertexSpec> side1, std::vector<Edge> edges)
    : edges_(std::move(edges)) {
  std::vector<VertexSpec>* sides[2] = {&side0, &side1};
  for (int s = 0; s < 2; ++s) {
    KahanSum total;
    for (std::size_t v = 0; v < sides[s]->size(); ++v) {
      const VertexSpec& spec = (*sides[s])[v];
      if (!(spec.weight > 0.0) || !std::isfinite(spec.weight)) {
        throw InputError("non-positive weight for vertex '" + spec.id + "'");
      }
      if (!lookup_.emplace(spec.id, std::make_pair(static_cast<Side>(s), v)).second) {
        throw InputError("duplicate vertex id '" + spec.id + "'");
      }
      ids_[s].push_back(spec.id);
      weights_[s].push_back(spec.weight);
      total.add(spec.weight);
    }
    totals_[s] = total.value();
    incident_[s].assign(sides[s]->size(), {});
  }
  for (const Edge& e : edges_) {
    if (e.v0 >= ids_[0].size() || e.v1 >= ids_[1].size()) {
      throw InputError("edge references unknown vertex");
    }
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& a, const Edge& b) { return a.v0 != b.v0 ? a.v0 < b.v0 : a.v1 < b.v1; });
  for (std::size_t k = 1; k < edges_.size(); ++k) {
    if (edges_[k] == edges_[k - 1]) {
      throw InputError("duplicate edge ('" + ids_[0][edges_[k].v0] + "', '" + ids_[1][edges_[k].v1] + "')");
    }
  }
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    incident_[0][edges_[k].v0].push_back(k);
    incident_[1][edges_[k].v1].push_back(k);
  }
}

bool Instance::has_isolated() const {
  for (int s = 0; s < 2; ++s) {
    for (const auto& inc : incident_[s]) {
      if (inc.empty()) return true;
    }
  }
  return false;
}

std::optional<std::pair<Side, std::size_t>> Instance::find(const std::string& id) const {
  auto it = lookup_.find(id);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Instance::find_edge(std::size_t v0, std::size_t v1) const {
  if (v0 >= size(Side::zero)) return std::nullopt;
  for (std::size_t e : incident_[0][v0]) {
    if (edges_[e].v1 == v1) return e;
  }
  return std::nullopt;
}

Instance Instance::scaled(double factor0, double factor1) const {
  std::vector<VertexSpec> s0, s1;
  for (std::size_t v = 0; v < size(Side::zero); ++v) s0.push_back({ids_[0][v], weights_[0][v] * factor0});
  for (std::size_t v = 0; v < size(Side::one); ++v) s1.push_back({ids_[1][v], weights_[1][v] * factor1});
  return Instance(std::move(s0), std::move(s1), edges_);
}

DistributionInstance DistributionInstance::normalize(const Instance& instance) {
  DistributionInstance out;
  for (Side s : {Side::zero, Side::one}) {
    if (instance.size(s) == 0) throw InputError("cannot normalize an empty side");
    out.factors_[index_of(s)] = instance.total_weight(s);
  }
  out.instance_ = instance.scaled(1.0 / out.factors_[0], 1.0 / out.factors_[1]);
  return out;
}

void validate_refinement(const Instance& instance, const Refinement& alpha, double rel_tol) {
  if (alpha.values.size() != instance.edge_count()) {
    throw RefinementError("refinement has " + std::to_string(alpha.values.size()) + " values for " +
                          std::to_string(instance.edge_count()) + " edges");
  }
  for (std::size_t e = 0; e < alpha.values.size(); ++e) {
    if (!(alpha.values[e] >= 0.0) || !std::isfinite(alpha.values[e])) {
      throw RefinementError("negative or non-finite refinement value on edge " + std::to_string(e));
    }
  }
  const Side s = alpha.source;
  for (std::size_t v = 0; v < instance.size(s); ++v) {
    if (instance.isolated(s, v)) continue;
    KahanSum row;
    for (std::size_t e : instance.incident(s, v)) row.add(alpha.values[e]);
    const double w = instance.weight(s, v);
    if (std::abs(row.value() - w) > rel_tol * w) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "refinement row-sum violation at '" << instance.id(s, v) << "': " << row.value() << " != " << w;
      throw RefinementError(msg.str());
    }
  }
}

namespace detail {

std::vector<double> receive(const Instance& instance, Side source, std::span<const double> values) {
  const Side recv = other(source);
  std::vector<double> payload(instance.size(recv), 0.0);
  for (std::size_t v = 0; v < payload.size(); ++v) {
    KahanSum sum;
    for (std::size_t e : instance.incident(recv, v)) sum.add(values[e]);
    payload[v] = sum.value();
  }
  return payload;
}

std::vector<double> respond(const Instance& instance, Side source, std::span<const double> values) {
  const Side recv = other(source);
  const std::vector<double> payload = receive(instance, source, values);
  std::vector<double> out(values.size(), 0.0);
  for (std::size_t e = 0; e < values.size(); ++e) {
    const std::size_t j = instance.endpoint(e, recv);
    if (payload[j] <= 0.0) {
      throw ZeroPayloadError("receiver '" + instance.id(recv, j) + "' has zero payload");
    }
    out[e] = values[e] / payload[j] * instance.weight(recv, j);
  }
  return out;
}

}  // namespace detail

PayloadVector payload_of(const Instance& instance, const Refinement& alpha) {
  validate_refinement(instance, alpha);
  PayloadVector out;
  out.side = other(alpha.source);
  out.payload = detail::receive(instance, alpha.source, alpha.values);
  out.density.resize(out.payload.size());
  for (std::size_t v = 0; v < out.payload.size(); ++v) {
    out.density[v] = out.payload[v] / instance.weight(out.side, v);
  }
  return out;
}

Refinement proportional_response(const Instance& instance, const Refinement& alpha) {
  validate_refinement(instance, alpha);
  return Refinement{other(alpha.source), detail::respond(instance, alpha.source, alpha.values)};
}

RefinementPair response_pair(const Instance& instance, const Refinement& alpha) {
  Refinement reply = proportional_response(instance, alpha);
  if (alpha.source == Side::zero) return {alpha, std::move(reply)};
  return {std::move(reply), alpha};
}

MaximinReport is_locally_maximin(const Instance& instance, const Refinement& alpha, double tol) {
  const PayloadVector pv = payload_of(instance, alpha);
  const Side s = alpha.source;
  const Side r = other(s);
  MaximinReport report;
  for (std::size_t i = 0; i < instance.size(s); ++i) {
    const auto& inc = instance.incident(s, i);
    if (inc.empty()) continue;
    std::size_t argmin = instance.endpoint(inc.front(), r);
    for (std::size_t e : inc) {
      const std::size_t j = instance.endpoint(e, r);
      if (pv.density[j] < pv.density[argmin]) argmin = j;
    }
    const double lowest = pv.density[argmin];
    for (std::size_t e : inc) {
      if (!(alpha.values[e] > 0.0)) continue;
      const std::size_t j = instance.endpoint(e, r);
      if (pv.density[j] > lowest + tol * lowest) {
        report.ok = false;
        report.violations.push_back({i, j, argmin, pv.density[j], lowest});
      }
    }
  }
  return report;
}

double multiplicative_error(std::span<const double> approx, std::span<const double> exact) {
  if (approx.size() != exact.size()) throw InputError("density maps have different key sets");
  double worst = 0.0;
  for (std::size_t v = 0; v < exact.size(); ++v) {
    if (!(exact[v] > 0.0)) throw DomainError("exact density must be positive");
    worst = std::max(worst, std::abs(approx[v] - exact[v]) / exact[v]);
  }
  return worst;
}

double multiplicative_error(const Instance& instance, Side side, std::span<const double> approx,
                            std::span<const double> exact) {
  if (approx.size() != instance.size(side) || exact.size() != instance.size(side)) {
    throw InputError("density maps have different key sets");
  }
  std::vector<double> a, x;
  for (std::size_t v = 0; v < exact.size(); ++v) {
    if (instance.isolated(side, v)) continue;
    a.push_back(approx[v]);
    x.push_back(exact[v]);
  }
  return multiplicative_error(a, x);
}

}  // namespace symdens
