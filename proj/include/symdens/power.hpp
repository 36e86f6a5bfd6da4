#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "symdens/decomposition.hpp"
#include "symdens/instance.hpp"

namespace symdens {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

// Concave nondecreasing curve on [0,1] from (0, g(0)) to (1, 1) with
// g(x) >= x. A positive g(0) stands for the vertical segment above the
// origin. Breakpoints are canonical: x strictly increasing, no collinear
// interior points.
class PowerFunction {
 public:
  PowerFunction() : points_{{0.0, 0.0}, {1.0, 1.0}} {}
  // Validates and canonicalizes; throws DomainError on an invalid curve.
  explicit PowerFunction(std::vector<Point> breakpoints);

  const std::vector<Point>& breakpoints() const { return points_; }
  double vertical() const { return points_.front().y; }
  double at(double x) const;
  // inf{x : g(x) >= y}.
  double inverse(double y) const;

  friend bool operator==(const PowerFunction&, const PowerFunction&) = default;

 private:
  std::vector<Point> points_;
};

// Curve sampled at the given abscissae (0 and 1 are added).
PowerFunction curve_through(std::vector<double> xs, const std::function<double(double)>& g);

void validate_distribution(std::span<const double> p, const char* name);

PowerFunction power_function(std::span<const double> p, std::span<const double> q);

// Curve of (alpha0 || alpha1) over the edges of a distribution instance.
PowerFunction power_of_pair(const RefinementPair& pair);

PowerFunction reflect(const PowerFunction& g);

double hockey_stick_from_curve(const PowerFunction& g, double gamma);
double hockey_stick_direct(std::span<const double> p, std::span<const double> q, double gamma);

struct FDivergence {
  std::string name;
  std::function<double(double)> f;         // convex, evaluated at likelihood ratios Q/P
  std::optional<double> slope_at_infinity;  // lim f(t)/t, may be +inf
};

FDivergence kl_divergence();          // sum P ln(P/Q)
FDivergence reverse_kl_divergence();  // sum Q ln(Q/P)
FDivergence total_variation();
FDivergence hockey_stick_divergence(double gamma);

double f_divergence_from_curve(const PowerFunction& g, const FDivergence& div);
double f_divergence_direct(std::span<const double> p, std::span<const double> q, const FDivergence& div);

double renyi_from_curve(const PowerFunction& g, double order);
double renyi_direct(std::span<const double> p, std::span<const double> q, double order);

enum class Stretch { radial, tangential };

PowerFunction stretch(const PowerFunction& g, Side orientation, Stretch direction, double gamma);
// Orientation-1 stretch obtained as reflect . stretch(orientation 0) . reflect.
PowerFunction stretch_by_reflection(const PowerFunction& g, Stretch direction, double gamma);

// Pointwise minimum; the result is concave whenever both inputs are.
PowerFunction pointwise_min(const PowerFunction& a, const PowerFunction& b);

// Minimum of the two tangential stretches.
PowerFunction gamma_approx(const PowerFunction& g, double gamma);

struct DominanceReport {
  bool holds = true;
  double worst_excess = 0.0;  // max of lower(x) - upper(x) over the checked points
  double worst_x = 0.0;
};

// lower <= upper + slack on the union of breakpoints and a uniform grid.
DominanceReport dominated(const PowerFunction& lower, const PowerFunction& upper, double slack = 1e-9,
                          double grid_step = 1e-3);

// Minimal power function of a distribution instance from its decomposition.
PowerFunction optimal_power(const DistributionInstance& dist);
PowerFunction optimal_power(const Instance& instance, const DensityDecomposition& decomp);

struct MinPowerReport {
  bool holds = false;
  double measured_tau = 0.0;  // multiplicative error of alpha1's side-0 densities
  DominanceReport dominance;
};

// Checks Pow(pair) <= S_{1 + 2 tau}(Pow*) for a pair whose alpha0 is the
// proportional response to alpha1.
MinPowerReport check_min_power_approx(const RefinementPair& approx_pair, double tau, const DistributionInstance& dist);

}  // namespace symdens
