#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "symdens/decomposition.hpp"
#include "symdens/instance.hpp"

namespace symdens {

enum class Method { proportional_response, frank_wolfe, fista, exact };

struct SolverConfig {
  Method method = Method::proportional_response;
  std::size_t iterations = 100;
  Side source = Side::zero;
  bool record_trace = true;
  std::optional<double> learning_rate;
};

// Row t describes iterate t; entries that do not apply are NaN.
struct TraceRow {
  std::size_t iter = 0;
  double objective = 0.0;      // Q of the side-0 refinement
  double abs_err_w = 0.0;      // ||rho - rho*||_w on side 1
  double eta = 0.0;            // multiplicative error on the source side
  double eta_bar = 0.0;        // multiplicative error on the receiving side
  double bound_abs = 0.0;      // proven bound on abs_err_w
  double bound_mult = 0.0;     // proven bound on eta_bar
  double bound_mult_eta = 0.0; // proven bound on eta
  std::optional<double> kl;    // KL(alpha* || alpha_t) when alpha* is supplied
};

struct ConvergenceTrace {
  std::vector<TraceRow> rows;
};

// Even spread of every source weight over all n-bar opposite vertices. Only
// edge entries are stored; the mass on non-edges is kept per vertex.
struct SuperRefinement {
  Side source = Side::zero;
  std::vector<double> edge_values;
  std::vector<double> off_edge_mass;
};

SuperRefinement initial_super_refinement(const Instance& instance, Side source);

struct PrResult {
  RefinementPair pair;
  ConvergenceTrace trace;
};

struct ConvexResult {
  Refinement alpha;  // side-0 refinement
  ConvergenceTrace trace;
};

// `exact` enables error columns; `alpha_star` (same source side as the
// config) enables the KL column.
PrResult run_proportional_response(const Instance& instance, const SolverConfig& config,
                                   const DensityDecomposition* exact = nullptr,
                                   const Refinement* alpha_star = nullptr);

ConvexResult run_frank_wolfe(const Instance& instance, const SolverConfig& config,
                             const DensityDecomposition* exact = nullptr);

ConvexResult run_fista(const Instance& instance, const SolverConfig& config,
                       const DensityDecomposition* exact = nullptr);

// Euclidean projection onto {x >= 0, sum x = total}.
std::vector<double> project_to_simplex(std::span<const double> y, double total);

// Sum over side-1 vertices of payload^2 / weight for a side-0 refinement.
double quadratic_objective(const Instance& instance, std::span<const double> alpha0);

// Same objective at the decomposition payloads.
double optimal_objective(const Instance& instance, const DensityDecomposition& decomp);

// sqrt(sum_v w(v) (a(v) - b(v))^2) over one side.
double weighted_distance(const Instance& instance, Side side, std::span<const double> a, std::span<const double> b);

struct IterationPrediction {
  double target = 0.0;
  double pr_rounds_eta_bar = 0.0;
  double pr_rounds_eta = 0.0;
  double frank_wolfe_steps = 0.0;  // for absolute error `target`
  double fista_steps = 0.0;
};

struct BoundReport {
  Side source = Side::zero;
  bool degenerate = false;
  double n = 0.0;      // |source side|
  double n_bar = 0.0;  // |receiving side|
  double u_min = 0.0;
  double u_bar_min = 0.0;
  double weight_sum0 = 0.0;
  double weight_sum1 = 0.0;
  double delta_w = 0.0;           // max over side 1 of degree / weight
  double sum_sq_weights = 0.0;    // over non-isolated side-0 vertices
  double diameter_sq_bound = 0.0;
  double lipschitz_bound = 0.0;
  std::vector<IterationPrediction> predictions;

  double pr_eta_bar_bound(double t) const;
  double pr_eta_bound(double t) const;
  double frank_wolfe_bound(double t) const;
  double fista_bound(double t) const;
};

BoundReport compute_bounds(const Instance& instance, Side source);

}  // namespace symdens
