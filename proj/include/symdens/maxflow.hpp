#pragma once

#include <cstddef>
#include <vector>

namespace symdens {

// Highest-label push-relabel with the gap heuristic on double capacities.
// Residual capacities at or below a slack of 1e-12 times the total source
// capacity count as saturated.
class FlowNetwork {
 public:
  explicit FlowNetwork(std::size_t nodes);

  // Returns an arc handle usable with flow(). Capacity may be +inf.
  std::size_t add_arc(std::size_t from, std::size_t to, double capacity);

  double solve(std::size_t source, std::size_t sink);

  double flow(std::size_t arc) const { return arcs_[2 * arc].flow; }
  std::size_t node_count() const { return out_.size(); }

  // Source side of the maximal minimum cut: nodes that cannot reach the sink
  // in the residual graph. Valid after solve().
  std::vector<bool> maximal_source_side() const;

 private:
  struct Arc {
    std::size_t to;
    double cap;
    double flow;
  };
  double residual(std::size_t a) const { return arcs_[a].cap - arcs_[a].flow; }
  void push(std::size_t a, double amount);

  std::vector<Arc> arcs_;  // arc 2k is forward, 2k+1 its reverse
  std::vector<std::vector<std::size_t>> out_;
  std::size_t sink_ = 0;
  double slack_ = 0.0;
};

}  // namespace symdens
