#pragma once

#include <limits>
#include <span>
#include <vector>

#include "dlab/manifold.hpp"

namespace dlab::detail {

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

/// Multi-source Dijkstra. Nodes farther than `cutoff` keep +inf. Stops early
/// once `stop` is settled.
std::vector<double> dijkstra(const DiscreteManifold& m, std::span<const NodeId> sources,
                             double cutoff = kInfinity, NodeId stop = kNoNode);

/// Dijkstra restricted to a ball, reusing a dense scratch array between runs.
class BoundedSearch {
 public:
  explicit BoundedSearch(std::size_t n) : dist_(n, kInfinity) {}

  /// Settles every node within `radius` of `source`.
  void run(const DiscreteManifold& m, NodeId source, double radius);

  double distance(NodeId p) const { return dist_[p]; }
  /// Settled nodes in order of increasing distance.
  const std::vector<NodeId>& settled() const { return settled_; }

 private:
  std::vector<double> dist_;
  std::vector<NodeId> touched_;
  std::vector<NodeId> settled_;
};

/// Walks from `x` back to the source set of `dist` along edges that realize
/// the distance; ties go to the lowest node index. Returns x first.
std::vector<NodeId> backtrack(const DiscreteManifold& m, const std::vector<double>& dist, NodeId x);

template <class DistanceLookup>
std::vector<NodeId> backtrack_with(const DiscreteManifold& m, DistanceLookup&& dist, NodeId x) {
  std::vector<NodeId> path{x};
  NodeId cur = x;
  while (dist(cur) > 0.0) {
    double best = kInfinity;
    NodeId pick = kNoNode;
    for (const Edge& e : m.neighbors(cur)) {
      const double cand = dist(e.to) + e.length;
      if (cand < best || (cand == best && e.to < pick)) {
        best = cand;
        pick = e.to;
      }
    }
    // Only strictly closer predecessors; guards against zero-progress loops.
    if (pick == kNoNode || !(dist(pick) < dist(cur))) {
      throw Error(ErrorKind::internal, "backtracking failed to reach the source");
    }
    // Lowest index among ties within rounding.
    const double slack = 1e-12 * (1.0 + best);
    for (const Edge& e : m.neighbors(cur)) {
      if (e.to < pick && dist(e.to) + e.length <= best + slack && dist(e.to) < dist(cur)) pick = e.to;
    }
    path.push_back(pick);
    cur = pick;
  }
  return path;
}

}  // namespace dlab::detail
