#include "symdens/power.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "symdens/errors.hpp"

namespace symdens {

namespace {

constexpr double kSnapTol = 1e-9;       // endpoint snapping and validity slack
constexpr double kCollinearTol = 1e-12;  // interior points this close to a chord are dropped

}  // namespace

PowerFunction::PowerFunction(std::vector<Point> pts) {
  if (pts.size() < 2) throw DomainError("power function needs at least two breakpoints");
  for (const Point& p : pts) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DomainError("power function breakpoint is not finite");
  }
  if (std::abs(pts.front().x) > kSnapTol) throw DomainError("power function must start at x = 0");
  if (std::abs(pts.back().x - 1.0) > kSnapTol) throw DomainError("power function must end at x = 1");
  if (std::abs(pts.back().y - 1.0) > kSnapTol) throw DomainError("power function must end at y = 1");
  pts.front().x = 0.0;
  pts.back() = {1.0, 1.0};
  for (Point& p : pts) {
    if (p.x < -kSnapTol || p.x > 1.0 + kSnapTol || p.y < -kSnapTol || p.y > 1.0 + kSnapTol) {
      throw DomainError("power function breakpoint outside the unit square");
    }
    p.x = std::clamp(p.x, 0.0, 1.0);
    p.y = std::clamp(p.y, 0.0, 1.0);
  }

  // Merge repeated abscissae, keeping the top of any vertical run.
  std::vector<Point> merged;
  for (const Point& p : pts) {
    if (!merged.empty()) {
      if (p.x < merged.back().x - kSnapTol) throw DomainError("power function abscissae must increase");
      if (p.x - merged.back().x <= 1e-15) {
        merged.back().y = std::max(merged.back().y, p.y);
        continue;
      }
    }
    merged.push_back(p);
  }
  merged.back() = {1.0, 1.0};
  if (merged.size() < 2) throw DomainError("power function collapses to a point");

  double running = merged.front().y;
  for (Point& p : merged) {
    if (p.y < running - kSnapTol) throw DomainError("power function must be nondecreasing");
    p.y = std::max(p.y, running);
    running = p.y;
    if (p.y < p.x - kSnapTol) throw DomainError("power function must satisfy g(x) >= x");
  }

  // Upper hull pass: drop collinear points, reject real concavity breaks.
  for (const Point& c : merged) {
    while (points_.size() >= 2) {
      const Point& a = points_[points_.size() - 2];
      const Point& b = points_.back();
      const double chord = a.y + (c.y - a.y) * (b.x - a.x) / (c.x - a.x);
      const double lift = b.y - chord;
      if (lift > kCollinearTol) break;
      if (lift < -kSnapTol) throw DomainError("power function must be concave");
      points_.pop_back();
    }
    points_.push_back(c);
  }
}

double PowerFunction::at(double x) const {
  if (x <= 0.0) return points_.front().y;
  if (x >= 1.0) return 1.0;
  auto it = std::upper_bound(points_.begin(), points_.end(), x, [](double v, const Point& p) { return v < p.x; });
  const Point& b = *it;
  const Point& a = *(it - 1);
  return a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x);
}

double PowerFunction::inverse(double y) const {
  if (y <= points_.front().y) return 0.0;
  for (std::size_t k = 1; k < points_.size(); ++k) {
    const Point& a = points_[k - 1];
    const Point& b = points_[k];
    if (b.y >= y) return a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y);
  }
  return 1.0;
}

PowerFunction curve_through(std::vector<double> xs, const std::function<double(double)>& g) {
  xs.push_back(0.0);
  xs.push_back(1.0);
  for (double& x : xs) x = std::clamp(x, 0.0, 1.0);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<Point> pts;
  pts.reserve(xs.size());
  for (double x : xs) pts.push_back({x, g(x)});
  return PowerFunction(std::move(pts));
}

void validate_distribution(std::span<const double> p, const char* name) {
  KahanSum total;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError(std::string(name) + " has a negative or non-finite mass");
    total.add(v);
  }
  if (std::abs(total.value() - 1.0) > kNormTol) {
    throw DomainError(std::string(name) + " does not sum to 1");
  }
}

PowerFunction power_function(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DomainError("distributions have different supports");
  validate_distribution(p, "P");
  validate_distribution(q, "Q");
  KahanSum vertical;
  std::vector<std::size_t> items;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] == 0.0) {
      vertical.add(q[k]);
    } else {
      items.push_back(k);
    }
  }
  // Decreasing likelihood ratio q/p, compared without division.
  std::stable_sort(items.begin(), items.end(),
                   [&](std::size_t a, std::size_t b) { return q[a] * p[b] > q[b] * p[a]; });
  std::size_t last_q = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (q[items[i]] > 0.0) last_q = i + 1;
  }
  std::vector<Point> pts{{0.0, last_q == 0 && !items.empty() ? 1.0 : vertical.value()}};
  KahanSum x, y;
  y.add(vertical.value());
  for (std::size_t i = 0; i < items.size(); ++i) {
    x.add(p[items[i]]);
    y.add(q[items[i]]);
    // Atoms without Q mass start once Q is exhausted, so the tail is exactly flat.
    pts.push_back({x.value(), i + 1 >= last_q ? 1.0 : y.value()});
  }
  pts.back() = {1.0, 1.0};
  if (pts.size() < 2) pts.push_back({1.0, 1.0});
  return PowerFunction(std::move(pts));
}

PowerFunction power_of_pair(const RefinementPair& pair) {
  return power_function(pair.alpha0.values, pair.alpha1.values);
}

PowerFunction reflect(const PowerFunction& g) {
  std::vector<Point> path;
  if (g.vertical() > 0.0) path.push_back({0.0, 0.0});
  for (const Point& p : g.breakpoints()) path.push_back(p);
  std::vector<Point> out;
  out.reserve(path.size());
  for (auto it = path.rbegin(); it != path.rend(); ++it) out.push_back({1.0 - it->y, 1.0 - it->x});
  return PowerFunction(std::move(out));
}

double hockey_stick_from_curve(const PowerFunction& g, double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be finite and nonnegative");
  double best = 0.0;
  for (const Point& p : g.breakpoints()) best = std::max(best, p.y - gamma * p.x);
  return best;
}

double hockey_stick_direct(std::span<const double> p, std::span<const double> q, double gamma) {
  if (p.size() != q.size()) throw DomainError("distributions have different supports");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be finite and nonnegative");
  validate_distribution(p, "P");
  validate_distribution(q, "Q");
  KahanSum total;
  for (std::size_t k = 0; k < p.size(); ++k) total.add(std::max(0.0, q[k] - gamma * p[k]));
  return total.value();
}

FDivergence kl_divergence() {
  return {"kl", [](double t) { return t > 0.0 ? -std::log(t) : kInfinity; }, 0.0};
}

FDivergence reverse_kl_divergence() {
  return {"reverse_kl", [](double t) { return t > 0.0 ? t * std::log(t) : 0.0; }, kInfinity};
}

FDivergence total_variation() {
  return {"tv", [](double t) { return std::abs(t - 1.0) / 2.0; }, 0.5};
}

FDivergence hockey_stick_divergence(double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be finite and nonnegative");
  return {"hockey_stick", [gamma](double t) { return std::max(0.0, t - gamma); }, 1.0};
}

namespace {

double vertical_term(double mass, const FDivergence& div) {
  if (mass <= 0.0) return 0.0;
  if (!div.slope_at_infinity) throw DomainError("f-divergence '" + div.name + "' needs a declared slope at infinity");
  if (std::isinf(*div.slope_at_infinity)) return kInfinity;
  return mass * *div.slope_at_infinity;
}

}  // namespace

double f_divergence_from_curve(const PowerFunction& g, const FDivergence& div) {
  const auto& pts = g.breakpoints();
  const double vertical = vertical_term(g.vertical(), div);
  if (std::isinf(vertical)) return kInfinity;
  KahanSum total;
  total.add(vertical);
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const double dx = pts[k].x - pts[k - 1].x;
    const double term = dx * div.f((pts[k].y - pts[k - 1].y) / dx);
    if (std::isinf(term)) return kInfinity;
    total.add(term);
  }
  return total.value();
}

double f_divergence_direct(std::span<const double> p, std::span<const double> q, const FDivergence& div) {
  if (p.size() != q.size()) throw DomainError("distributions have different supports");
  validate_distribution(p, "P");
  validate_distribution(q, "Q");
  KahanSum total, vertical;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] == 0.0) {
      vertical.add(q[k]);
      continue;
    }
    const double term = p[k] * div.f(q[k] / p[k]);
    if (std::isinf(term)) return kInfinity;
    total.add(term);
  }
  const double v = vertical_term(vertical.value(), div);
  if (std::isinf(v)) return kInfinity;
  total.add(v);
  return total.value();
}

namespace {

double renyi_power(double t, double order) {
  if (t == 0.0) return order < 1.0 ? 0.0 : kInfinity;
  return std::pow(t, 1.0 - order);
}

double renyi_from_sum(double h, double order) {
  if (std::isinf(h)) return kInfinity;
  if (h <= 0.0) return kInfinity;
  return std::max(0.0, std::log(h) / (order - 1.0));
}

void check_order(double order) {
  if (!(order > 0.0) || !std::isfinite(order)) throw DomainError("Renyi order must be positive and finite");
}

}  // namespace

double renyi_from_curve(const PowerFunction& g, double order) {
  check_order(order);
  if (order == 1.0) return f_divergence_from_curve(g, kl_divergence());
  const auto& pts = g.breakpoints();
  KahanSum h;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const double dx = pts[k].x - pts[k - 1].x;
    const double term = dx * renyi_power((pts[k].y - pts[k - 1].y) / dx, order);
    if (std::isinf(term)) return kInfinity;
    h.add(term);
  }
  return renyi_from_sum(h.value(), order);
}

double renyi_direct(std::span<const double> p, std::span<const double> q, double order) {
  check_order(order);
  if (order == 1.0) return f_divergence_direct(p, q, kl_divergence());
  if (p.size() != q.size()) throw DomainError("distributions have different supports");
  validate_distribution(p, "P");
  validate_distribution(q, "Q");
  KahanSum h;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] == 0.0) continue;
    const double term = p[k] * renyi_power(q[k] / p[k], order);
    if (std::isinf(term)) return kInfinity;
    h.add(term);
  }
  return renyi_from_sum(h.value(), order);
}

PowerFunction stretch(const PowerFunction& g, Side orientation, Stretch direction, double gamma) {
  if (!(gamma >= 1.0) || !std::isfinite(gamma)) throw DomainError("stretching factor must be at least 1");
  std::vector<double> xs;
  for (const Point& p : g.breakpoints()) xs.push_back(p.x);
  if (orientation == Side::zero && direction == Stretch::radial) {
    for (double& x : xs) x /= gamma;
    return curve_through(std::move(xs), [&](double x) { return g.at(std::min(gamma * x, 1.0)); });
  }
  if (orientation == Side::zero) {
    const double g0 = g.vertical();
    if (g0 < 1.0) xs.push_back(g.inverse(g0 + (1.0 - g0) / gamma));
    return curve_through(std::move(xs), [&](double x) { return std::min(gamma * (g.at(x) - g0) + g0, 1.0); });
  }
  if (direction == Stretch::radial) {
    return curve_through(std::move(xs), [&](double x) { return g.at(x) / gamma + 1.0 - 1.0 / gamma; });
  }
  const double top = g.inverse(1.0);
  const double base = (1.0 - 1.0 / gamma) * top;
  std::vector<double> mapped{top};
  for (double x : xs) {
    const double m = gamma * (x - base);
    if (m >= 0.0 && m <= 1.0) mapped.push_back(m);
  }
  return curve_through(std::move(mapped), [&](double x) { return g.at(std::min(x / gamma + base, 1.0)); });
}

PowerFunction stretch_by_reflection(const PowerFunction& g, Stretch direction, double gamma) {
  return reflect(stretch(reflect(g), Side::zero, direction, gamma));
}

PowerFunction pointwise_min(const PowerFunction& a, const PowerFunction& b) {
  std::vector<double> xs;
  for (const Point& p : a.breakpoints()) xs.push_back(p.x);
  for (const Point& p : b.breakpoints()) xs.push_back(p.x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  const std::size_t n = xs.size();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double u = xs[k], v = xs[k + 1];
    const double du = a.at(u) - b.at(u);
    const double dv = a.at(v) - b.at(v);
    if ((du < 0.0 && dv > 0.0) || (du > 0.0 && dv < 0.0)) xs.push_back(u + (v - u) * du / (du - dv));
  }
  return curve_through(std::move(xs), [&](double x) { return std::min(a.at(x), b.at(x)); });
}

PowerFunction gamma_approx(const PowerFunction& g, double gamma) {
  return pointwise_min(stretch(g, Side::zero, Stretch::tangential, gamma),
                       stretch(g, Side::one, Stretch::tangential, gamma));
}

DominanceReport dominated(const PowerFunction& lower, const PowerFunction& upper, double slack, double grid_step) {
  std::vector<double> xs;
  for (const Point& p : lower.breakpoints()) xs.push_back(p.x);
  for (const Point& p : upper.breakpoints()) xs.push_back(p.x);
  if (grid_step > 0.0) {
    const auto steps = static_cast<std::size_t>(std::ceil(1.0 / grid_step));
    for (std::size_t k = 0; k <= steps; ++k) xs.push_back(std::min(1.0, static_cast<double>(k) * grid_step));
  }
  DominanceReport report;
  report.worst_excess = -kInfinity;
  for (double x : xs) {
    const double excess = lower.at(x) - upper.at(x);
    if (excess > report.worst_excess) {
      report.worst_excess = excess;
      report.worst_x = x;
    }
  }
  report.holds = report.worst_excess <= slack;
  return report;
}

PowerFunction optimal_power(const Instance& instance, const DensityDecomposition& decomp) {
  if (instance.has_isolated()) throw DomainError("minimal power function needs an instance without isolated vertices");
  return power_function(instance.weights(Side::zero), decomp.payload(Side::zero));
}

PowerFunction optimal_power(const DistributionInstance& dist) {
  return optimal_power(dist.instance(), density_decomposition(dist.instance(), Side::one));
}

MinPowerReport check_min_power_approx(const RefinementPair& approx_pair, double tau, const DistributionInstance& dist) {
  if (!(tau >= 0.0) || tau > 0.5) throw DomainError("tau must lie in [0, 1/2]");
  const Instance& instance = dist.instance();
  const DensityDecomposition decomp = density_decomposition(instance, Side::one);
  MinPowerReport report;
  const PayloadVector pv = payload_of(instance, approx_pair.alpha1);
  report.measured_tau = multiplicative_error(instance, Side::zero, pv.density, decomp.density(Side::zero));
  const PowerFunction bound = gamma_approx(optimal_power(instance, decomp), 1.0 + 2.0 * tau);
  report.dominance = dominated(power_of_pair(approx_pair), bound);
  report.holds = report.dominance.holds;
  return report;
}

}  // namespace symdens
