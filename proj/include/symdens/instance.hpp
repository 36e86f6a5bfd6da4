#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "symdens/numeric.hpp"

namespace symdens {

enum class Side : int { zero = 0, one = 1 };

constexpr Side other(Side s) { return s == Side::zero ? Side::one : Side::zero; }
constexpr int index_of(Side s) { return static_cast<int>(s); }
Side side_from_int(int value);

struct VertexSpec {
  std::string id;
  double weight = 0.0;
};

// Endpoints by dense index on side 0 and side 1.
struct Edge {
  std::size_t v0 = 0;
  std::size_t v1 = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Vertex-weighted bipartite graph. Immutable after construction; edges are
// kept sorted by (v0, v1), which fixes every summation order downstream.
class Instance {
 public:
  Instance() = default;
  Instance(std::vector<VertexSpec> side0, std::vector<VertexSpec> side1, std::vector<Edge> edges);

  std::size_t size(Side s) const { return weights_[index_of(s)].size(); }
  double weight(Side s, std::size_t v) const { return weights_[index_of(s)][v]; }
  const std::vector<double>& weights(Side s) const { return weights_[index_of(s)]; }
  const std::string& id(Side s, std::size_t v) const { return ids_[index_of(s)][v]; }
  const std::vector<std::string>& ids(Side s) const { return ids_[index_of(s)]; }
  double total_weight(Side s) const { return totals_[index_of(s)]; }

  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t endpoint(std::size_t edge, Side s) const {
    return s == Side::zero ? edges_[edge].v0 : edges_[edge].v1;
  }
  // Incident edge indices in ascending order.
  const std::vector<std::size_t>& incident(Side s, std::size_t v) const {
    return incident_[index_of(s)][v];
  }
  std::size_t degree(Side s, std::size_t v) const { return incident(s, v).size(); }
  bool isolated(Side s, std::size_t v) const { return incident(s, v).empty(); }
  bool has_isolated() const;

  std::optional<std::pair<Side, std::size_t>> find(const std::string& id) const;
  std::optional<std::size_t> find_edge(std::size_t v0, std::size_t v1) const;

  // Same graph with each side's weights multiplied by a positive factor.
  Instance scaled(double factor0, double factor1) const;

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.ids_[0] == b.ids_[0] && a.ids_[1] == b.ids_[1] && a.weights_[0] == b.weights_[0] &&
           a.weights_[1] == b.weights_[1] && a.edges_ == b.edges_;
  }

 private:
  std::vector<std::string> ids_[2];
  std::vector<double> weights_[2];
  double totals_[2] = {0.0, 0.0};
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> incident_[2];
  std::unordered_map<std::string, std::pair<Side, std::size_t>> lookup_;
};

// Instance whose sides are probability distributions.
class DistributionInstance {
 public:
  static DistributionInstance normalize(const Instance& instance);

  const Instance& instance() const { return instance_; }
  // Original total weight of the side, divided out during normalization.
  double factor(Side s) const { return factors_[index_of(s)]; }

 private:
  Instance instance_;
  double factors_[2] = {1.0, 1.0};
};

struct Refinement {
  Side source = Side::zero;
  std::vector<double> values;  // indexed by edge
  friend bool operator==(const Refinement&, const Refinement&) = default;
};

struct PayloadVector {
  Side side = Side::one;  // receiving side
  std::vector<double> payload;
  std::vector<double> density;
};

struct RefinementPair {
  Refinement alpha0;
  Refinement alpha1;
};

// Throws RefinementError when a non-isolated source vertex's edge values do
// not sum to its weight or a value is negative.
void validate_refinement(const Instance& instance, const Refinement& alpha, double rel_tol = kRelTol);

PayloadVector payload_of(const Instance& instance, const Refinement& alpha);

// Each receiver redistributes its own weight in proportion to what it received.
Refinement proportional_response(const Instance& instance, const Refinement& alpha);

// Pair formed by a refinement and its proportional response.
RefinementPair response_pair(const Instance& instance, const Refinement& alpha);

struct MaximinViolation {
  std::size_t sender = 0;
  std::size_t receiver = 0;
  std::size_t min_neighbor = 0;
  double receiver_density = 0.0;
  double min_density = 0.0;
};

struct MaximinReport {
  bool ok = true;
  std::vector<MaximinViolation> violations;
};

MaximinReport is_locally_maximin(const Instance& instance, const Refinement& alpha, double tol = kRelTol);

// max_v |approx(v) - exact(v)| / exact(v); entries with exact == 0 must be
// excluded by the caller.
double multiplicative_error(std::span<const double> approx, std::span<const double> exact);

// Multiplicative error over the non-isolated vertices of one side.
double multiplicative_error(const Instance& instance, Side side, std::span<const double> approx,
                            std::span<const double> exact);

namespace detail {

// Payloads on the receiving side without validating row sums.
std::vector<double> receive(const Instance& instance, Side source, std::span<const double> values);

// Proportional response without validating row sums.
std::vector<double> respond(const Instance& instance, Side source, std::span<const double> values);

}  // namespace detail

}  // namespace symdens
