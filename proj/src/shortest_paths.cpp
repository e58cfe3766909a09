#include "shortest_paths.hpp"

#include <functional>
#include <queue>
#include <utility>

namespace dlab::detail {

namespace {

using Item = std::pair<double, NodeId>;
using MinHeap = std::priority_queue<Item, std::vector<Item>, std::greater<>>;

}  // namespace

std::vector<double> dijkstra(const DiscreteManifold& m, std::span<const NodeId> sources,
                             double cutoff, NodeId stop) {
  std::vector<double> dist(m.size(), kInfinity);
  MinHeap heap;
  for (NodeId s : sources) {
    if (dist[s] != 0.0) {
      dist[s] = 0.0;
      heap.emplace(0.0, s);
    }
  }
  while (!heap.empty()) {
    const auto [d, p] = heap.top();
    heap.pop();
    if (d > dist[p]) continue;
    if (p == stop) break;
    for (const Edge& e : m.neighbors(p)) {
      const double nd = d + e.length;
      if (nd < dist[e.to] && nd <= cutoff) {
        dist[e.to] = nd;
        heap.emplace(nd, e.to);
      }
    }
  }
  return dist;
}

void BoundedSearch::run(const DiscreteManifold& m, NodeId source, double radius) {
  for (NodeId p : touched_) dist_[p] = kInfinity;
  touched_.clear();
  settled_.clear();
  MinHeap heap;
  dist_[source] = 0.0;
  touched_.push_back(source);
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, p] = heap.top();
    heap.pop();
    if (d > dist_[p]) continue;
    settled_.push_back(p);
    for (const Edge& e : m.neighbors(p)) {
      const double nd = d + e.length;
      if (nd <= radius && nd < dist_[e.to]) {
        if (dist_[e.to] == kInfinity) touched_.push_back(e.to);
        dist_[e.to] = nd;
        heap.emplace(nd, e.to);
      }
    }
  }
}

std::vector<NodeId> backtrack(const DiscreteManifold& m, const std::vector<double>& dist, NodeId x) {
  if (!(dist[x] < kInfinity)) throw Error(ErrorKind::internal, "node unreachable from source set");
  return backtrack_with(m, [&](NodeId p) { return dist[p]; }, x);
}

}  // namespace dlab::detail
