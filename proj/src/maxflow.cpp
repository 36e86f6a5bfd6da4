#include "symdens/maxflow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "symdens/errors.hpp"

namespace symdens {

FlowNetwork::FlowNetwork(std::size_t nodes) : out_(nodes) {}

std::size_t FlowNetwork::add_arc(std::size_t from, std::size_t to, double capacity) {
  if (from >= out_.size() || to >= out_.size()) throw DomainError("arc endpoint out of range");
  if (!(capacity >= 0.0)) throw DomainError("negative arc capacity");
  const std::size_t handle = arcs_.size() / 2;
  out_[from].push_back(arcs_.size());
  arcs_.push_back({to, capacity, 0.0});
  out_[to].push_back(arcs_.size());
  arcs_.push_back({from, 0.0, 0.0});
  return handle;
}

void FlowNetwork::push(std::size_t a, double amount) {
  arcs_[a].flow += amount;
  arcs_[a ^ 1].flow -= amount;
}

double FlowNetwork::solve(std::size_t source, std::size_t sink) {
  const std::size_t n = out_.size();
  sink_ = sink;
  for (Arc& a : arcs_) a.flow = 0.0;

  double scale = 1.0;
  for (std::size_t a : out_[source]) {
    if (std::isfinite(arcs_[a].cap)) scale += arcs_[a].cap;
  }
  slack_ = 1e-12 * scale;

  std::vector<double> excess(n, 0.0);
  std::vector<std::size_t> label(n, n);
  std::vector<std::size_t> count(2 * n + 2, 0);
  std::vector<std::size_t> current(n, 0);
  std::vector<std::vector<std::size_t>> bucket(2 * n + 2);
  std::vector<bool> active(n, false);

  // Exact distances to the sink as initial labels.
  label[sink] = 0;
  std::deque<std::size_t> queue{sink};
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t a : out_[v]) {
      const std::size_t u = arcs_[a].to;
      if (u != source && label[u] == n && u != sink && residual(a ^ 1) > slack_) {
        label[u] = label[v] + 1;
        queue.push_back(u);
      }
    }
  }
  label[source] = n;
  for (std::size_t v = 0; v < n; ++v) {
    if (label[v] < n) ++count[label[v]];
  }

  std::size_t top = 0;
  auto activate = [&](std::size_t v) {
    if (v == source || v == sink || active[v] || excess[v] <= slack_) return;
    active[v] = true;
    bucket[label[v]].push_back(v);
    top = std::max(top, label[v]);
  };

  for (std::size_t a : out_[source]) {
    const double cap = arcs_[a].cap;
    if (!std::isfinite(cap)) throw DomainError("source arcs must have finite capacity");
    if (cap <= 0.0) continue;
    push(a, cap);
    excess[arcs_[a].to] += cap;
    excess[source] -= cap;
    activate(arcs_[a].to);
  }

  const std::size_t max_label = 2 * n;
  for (;;) {
    while (top > 0 && bucket[top].empty()) --top;
    if (bucket[top].empty()) break;
    const std::size_t v = bucket[top].back();
    bucket[top].pop_back();
    if (label[v] != top) continue;  // stale entry after a gap relabel
    active[v] = false;

    while (excess[v] > slack_) {
      if (current[v] < out_[v].size()) {
        const std::size_t a = out_[v][current[v]];
        const std::size_t u = arcs_[a].to;
        const double room = residual(a);
        if (room > slack_ && label[v] == label[u] + 1) {
          const double amount = std::min(excess[v], room);
          push(a, amount);
          excess[v] -= amount;
          excess[u] += amount;
          activate(u);
          if (excess[v] <= slack_) break;
        }
        ++current[v];
        continue;
      }
      // Relabel.
      std::size_t lowest = std::numeric_limits<std::size_t>::max();
      for (std::size_t a : out_[v]) {
        if (residual(a) > slack_) lowest = std::min(lowest, label[arcs_[a].to]);
      }
      const std::size_t old = label[v];
      if (lowest == std::numeric_limits<std::size_t>::max() || lowest + 1 > max_label) {
        excess[v] = 0.0;  // residual dust below the slack
        break;
      }
      std::size_t fresh = lowest + 1;
      if (old < n) {
        --count[old];
        if (count[old] == 0) {
          // Gap: nothing above `old` can reach the sink any more.
          for (std::size_t u = 0; u < n; ++u) {
            if (u == source || u == sink) continue;
            if (label[u] > old && label[u] < n) {
              --count[label[u]];
              label[u] = n;
              current[u] = 0;
              if (active[u]) {
                bucket[n].push_back(u);
                top = std::max(top, n);
              }
            }
          }
          fresh = std::max(fresh, n);
        }
      }
      label[v] = fresh;
      if (fresh < n) ++count[fresh];
      current[v] = 0;
    }
  }
  return excess[sink];
}

std::vector<bool> FlowNetwork::maximal_source_side() const {
  const std::size_t n = out_.size();
  std::vector<bool> reaches_sink(n, false);
  reaches_sink[sink_] = true;
  std::deque<std::size_t> queue{sink_};
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t a : out_[v]) {
      // Arc a runs v -> u; its reverse u -> v has residual residual(a ^ 1).
      const std::size_t u = arcs_[a].to;
      if (!reaches_sink[u] && residual(a ^ 1) > slack_) {
        reaches_sink[u] = true;
        queue.push_back(u);
      }
    }
  }
  std::vector<bool> side(n);
  for (std::size_t v = 0; v < n; ++v) side[v] = !reaches_sink[v];
  return side;
}

}  // namespace symdens
