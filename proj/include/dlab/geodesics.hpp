#pragma once

#include <iosfwd>
#include <vector>

#include "dlab/manifold.hpp"

namespace dlab {

/// Node polyline with cumulative arclength; cumlen[0] = 0.
struct Path {
  std::vector<NodeId> nodes;
  std::vector<double> cumlen;

  bool empty() const { return nodes.empty(); }
  std::size_t size() const { return nodes.size(); }
  double length() const { return cumlen.empty() ? 0.0 : cumlen.back(); }
  NodeId front() const { return nodes.front(); }
  NodeId back() const { return nodes.back(); }

  /// First vertex with cumlen >= t (the last vertex if t exceeds the length).
  std::size_t index_at(double t) const;
  NodeId at(double t) const { return nodes[index_at(t)]; }

  /// Vertices [0, count).
  Path prefix(std::size_t count) const;
  /// Vertices [first, end), arclength restarted at 0.
  Path tail(std::size_t first) const;

  static Path from_nodes(const DiscreteManifold& m, std::vector<NodeId> nodes);
};

/// A path whose distance-realization audit passed up to certified_span.
struct Ray {
  Path path;
  double certified_span = 0.0;
  double ray_tol = 0.0;
  double max_deviation = 0.0;

  NodeId origin() const { return path.front(); }
};

/// 2 x stencil bound x span.
double default_ray_tol(const DiscreteManifold& m, double span);

/// Shortest path from x to y by backtracking the distance field of y from x.
Path minimal_segment(const DiscreteManifold& m, NodeId x, NodeId y);

/// Worst |d(p(s), p(t)) - |t - s|| over pairs of up to `samples` vertices
/// spread evenly along the path, with fresh graph distances.
double realization_deviation(const DiscreteManifold& m, const Path& p, std::size_t samples = 17);

/// Stabilized limit of minimal_segment(x, target_k): the prefix shared by
/// the last two segments, audited for the ray property.
/// Throws not_escaping if the targets do not move strictly away from x and
/// no_stabilization if the segments share no edge.
Ray trace_ray(const DiscreteManifold& m, NodeId x, const std::vector<NodeId>& targets);

struct CorayResult {
  /// One ray per persistent initial-edge cluster; rays.front() belongs to
  /// the cluster of the farthest target.
  std::vector<Ray> rays;
  bool multiple = false;
  /// False when no initial edge persisted; rays then holds the audited
  /// segment to the farthest target.
  bool stabilized = true;
  std::size_t iterates = 0;

  const Ray& primary() const { return rays.front(); }
};

/// Limit of minimal segments from x to gamma(t_k), t_k doubling up to the
/// certified span of gamma.
CorayResult coray(const DiscreteManifold& m, const Ray& gamma, NodeId x);

/// Distance realization across the whole path within the ray tolerance.
bool is_line(const DiscreteManifold& m, const Path& p);

/// Rows: node_id,u,v,cumlen.
void write_path_csv(std::ostream& os, const DiscreteManifold& m, const Path& p);

}  // namespace dlab
