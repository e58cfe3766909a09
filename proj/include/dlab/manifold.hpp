#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "dlab/error.hpp"

namespace dlab {

using NodeId = std::uint32_t;
using NodeSet = std::vector<NodeId>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Riemannian metric components in chart coordinates.
struct MetricTensor {
  double g11 = 1.0;
  double g12 = 0.0;
  double g22 = 1.0;

  bool positive_definite() const { return g11 > 0.0 && g11 * g22 - g12 * g12 > 0.0; }

  /// g(d, d) for the coordinate displacement d = (du, dv).
  double quadratic(double du, double dv) const {
    return g11 * du * du + 2.0 * g12 * du * dv + g22 * dv * dv;
  }
};

using MetricFunction = std::function<MetricTensor(double u, double v)>;

inline MetricTensor flat_metric(double, double) { return {}; }

enum class Identification { none, periodic_u, periodic_v };

/// Sides of the parameter rectangle.
enum class Side { u0, u1, v0, v1 };

/// Parameter rectangle sampled on an nu x nv grid.
///
/// A periodic direction covers [u0, u1) with spacing (u1 - u0) / nu; otherwise
/// the closed interval is sampled with spacing (u1 - u0) / (nu - 1). Sides in
/// `cut` are truncations of an infinite direction and seed boundary_margin.
/// `collapse_v0` identifies the whole v = v0 row to one node (a pole); the
/// metric there may be degenerate in the u direction.
struct ChartSpec {
  std::string name = "chart";
  double u0 = 0.0, u1 = 1.0;
  double v0 = 0.0, v1 = 1.0;
  int nu = 2, nv = 2;
  MetricFunction metric = flat_metric;
  Identification identify = Identification::none;
  bool collapse_v0 = false;
  std::vector<Side> cut;
  /// Offsets (a, b) with gcd(|a|, |b|) = 1 and max(|a|, |b|) <= radius.
  int stencil_radius = 4;
};

/// Grid structure of one chart inside a (possibly glued) manifold.
struct GridChart {
  std::string name;
  int nu = 0, nv = 0;
  double u0 = 0.0, v0 = 0.0;
  double du = 0.0, dv = 0.0;
  bool periodic_u = false, periodic_v = false;
  bool collapse_v0 = false;
  std::vector<NodeId> ids;             // index j * nu + i
  std::vector<MetricTensor> metric;    // same indexing

  NodeId id(int i, int j) const { return ids[static_cast<std::size_t>(j) * nu + i]; }
  const MetricTensor& metric_at(int i, int j) const {
    return metric[static_cast<std::size_t>(j) * nu + i];
  }
  double u_at(int i) const { return u0 + du * i; }
  double v_at(int j) const { return v0 + dv * j; }
};

struct NodePoint {
  int chart = -1;   // first chart containing the node, -1 for raw graphs
  int i = 0, j = 0;
  double u = 0.0, v = 0.0;
};

struct Edge {
  NodeId to;
  double length;
};

/// Metric-weighted graph approximating a complete surface inside a window.
/// Immutable once built.
class DiscreteManifold {
 public:
  DiscreteManifold() = default;

  std::size_t size() const { return points_.size(); }
  std::size_t edge_count() const { return targets_.size() / 2; }

  std::span<const Edge> neighbors(NodeId p) const {
    return {targets_.data() + offsets_[p], targets_.data() + offsets_[p + 1]};
  }
  /// Length of the edge p-q, if present.
  std::optional<double> edge_length(NodeId p, NodeId q) const;

  const NodePoint& point(NodeId p) const { return points_[p]; }
  bool is_cut(NodeId p) const { return cut_[p] != 0; }
  bool has_cut() const;

  std::span<const GridChart> charts() const { return charts_; }
  bool has_grid() const { return !charts_.empty(); }
  /// Largest chart-axis edge length: the grid spacing h.
  double spacing() const { return spacing_; }
  /// Largest edge length in the graph.
  double max_edge_length() const { return max_edge_; }
  int stencil_radius() const { return stencil_radius_; }

  /// Distance from each node to the truncation boundary (+inf when nothing is cut).
  const std::vector<double>& margin() const { return margin_; }

  NodeId center() const { return center_; }
  /// Window radius: boundary margin at the designated center node.
  double window_radius() const { return margin_.empty() ? 0.0 : margin_[center_]; }

  const std::string& name() const { return name_; }

  /// Node of `chart` at grid index (i, j); periodic indices wrap.
  NodeId grid_node(int chart, int i, int j) const;

  DiscreteManifold with_center(NodeId c) const;
  DiscreteManifold with_name(std::string name) const;

  /// Build from an explicit undirected edge list (no chart structure).
  static DiscreteManifold from_edges(std::size_t n,
                                     const std::vector<std::tuple<NodeId, NodeId, double>>& edges,
                                     const std::vector<NodeId>& cut_nodes = {});

 private:
  friend class ManifoldBuilder;

  std::string name_;
  std::vector<NodePoint> points_;
  std::vector<std::size_t> offsets_;  // CSR
  std::vector<Edge> targets_;
  std::vector<char> cut_;
  std::vector<GridChart> charts_;
  std::vector<double> margin_;
  double spacing_ = 0.0;
  double max_edge_ = 0.0;
  int stencil_radius_ = 0;
  NodeId center_ = 0;
};

/// Correspondence between boundary nodes of two manifolds in a glue list.
struct Seam {
  std::size_t a = 0, b = 0;             // indices into the manifold list
  std::vector<NodeId> a_nodes, b_nodes;  // positional pairs
};

/// Grid offsets of the stencil of the given radius (both half-planes).
std::vector<std::pair<int, int>> stencil_offsets(int radius);

/// Worst relative excess of graph length over Euclidean length for the
/// stencil on a uniform flat grid.
double stencil_bound(int radius);

DiscreteManifold build_chart_manifold(const ChartSpec& spec);

/// Identify seam nodes. Edges present in both charts between identified
/// nodes get the mean of their lengths.
DiscreteManifold glue(const std::vector<DiscreteManifold>& parts, const std::vector<Seam>& seams);

/// Graph distance from each node to the truncation boundary.
const std::vector<double>& boundary_margin(const DiscreteManifold& m);

/// Chart index helpers for building seams.
NodeSet chart_row(const DiscreteManifold& m, int chart, int j);
NodeSet chart_column(const DiscreteManifold& m, int chart, int i);

}  // namespace dlab
