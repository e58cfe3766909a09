#pragma once

#include <cstdint>
#include <vector>

#include "dlab/eikonal.hpp"
#include "dlab/geodesics.hpp"

namespace dlab {

/// 3 x stencil bound: regular/singular gap threshold and residual tolerance.
double default_grad_tol(const DiscreteManifold& m);
/// Semiconcavity acceptance: 10 x stencil bound per unit length.
double default_semiconcavity_tol(const DiscreteManifold& m);
/// stencil bound x window radius + 2h.
double reconstruction_tol(const DiscreteManifold& m);

struct ResidualReport {
  /// Worst |upwind gradient norm - 1| over regular nodes.
  double max_abs_dev = 0.0;
  double frac_regular = 0.0;
  std::size_t evaluated = 0;
  std::size_t regular = 0;
  std::size_t singular = 0;
  /// Nodes whose best ascent beats the best descent by more than grad_tol
  /// (a convex kink, which no viscosity solution has).
  std::size_t convex = 0;
  double tolerance = 0.0;
  /// Regular nodes over tolerance, then convex nodes.
  std::vector<NodeId> offending_nodes;

  bool pass() const { return offending_nodes.empty(); }
};

/// Classifies interior reliable nodes (reliable with every neighbour
/// reliable). A node is regular when its best ascent and descent quotients
/// agree within grad_tol, singular when the descent wins (ridge) and convex
/// when the ascent wins.
ResidualReport eikonal_residual(const DiscreteManifold& m, const ScalarField& f, double grad_tol = 0.0,
                                double residual_tol = 0.0);

struct SingularSet {
  NodeSet nodes;
  /// Per node: steepest descent neighbour and steepest ascent neighbour.
  std::vector<std::pair<NodeId, NodeId>> witness;
  /// Per node: descent quotient minus ascent quotient.
  std::vector<double> gap;

  bool empty() const { return nodes.empty(); }
};

SingularSet singular_set(const DiscreteManifold& m, const ScalarField& f, double grad_tol = 0.0);

/// Seeded minimal segments of graph length in (min_len, max_len] with every
/// vertex reliable. Defaults: 1.5h and 4h.
std::vector<Path> probe_segments(const DiscreteManifold& m, const ScalarField& f, std::size_t count,
                                 std::uint64_t seed, double min_len = 0.0, double max_len = 0.0);

struct SemiconcavityReport {
  double worst_c = 0.0;
  std::size_t segments = 0;
  /// Index of the worst segment.
  std::size_t worst = 0;
};

/// Smallest C with f(x_l) >= (1-l) f(a) + l f(b) - C l (1-l) d(a,b)^2 on
/// every segment, x_l the vertex nearest the middle and l = cumlen / d.
/// At l = 1/2 this is f(mid) >= (f(a)+f(b))/2 - (C/4) d^2.
SemiconcavityReport semiconcavity_probe(const ScalarField& f, const std::vector<Path>& segments);

/// Pointwise minimum on the common reliable region.
ScalarField min_combine(const ScalarField& a, const ScalarField& b);

struct Reconstruction {
  ScalarField field;
  /// sup |rec - (f - f(x0))| over reliable nodes with f >= floor.
  double deviation = 0.0;
  double floor = 0.0;
  std::size_t evaluated = 0;
  std::size_t sources = 0;
};

/// Graph distance from each node to the nearest unreliable node of f
/// (+inf when every node is reliable).
std::vector<double> truncation_clearance(const DiscreteManifold& m, const ScalarField& f);

/// d(., K_n) - d(x0, K_n) with K_n = {f <= -n} on the reliable region (graph
/// distance). The comparison region is the reliable part of {f >= floor};
/// floor defaults to -n and must be >= -n. With clear_at = N >= n the
/// comparison also skips nodes x whose clearance is at most
/// (1 + bound)(f(x) + N) + 2h, where truncating K_N to the reliable region
/// can move the nearest point. Passing the same N for every n of a schedule
/// keeps the comparison region fixed.
Reconstruction levelset_reconstruct(const DiscreteManifold& m, const ScalarField& f, NodeId x0, double n,
                                    std::optional<double> floor = std::nullopt,
                                    std::optional<double> clear_at = std::nullopt);

/// Nodes levelset_reconstruct compares for the given floor and clear_at.
std::size_t reconstruction_region_size(const DiscreteManifold& m, const ScalarField& f, double floor,
                                       double clear_at, const std::vector<double>& clearance);

struct LevelsetCheck {
  double deviation = 0.0;
  std::size_t band = 0;
};

/// max |d(x, {f <= a2}) - (a1 - a2)| over reliable x with |f(x) - a1| <= h.
/// With clear_of_truncation the band keeps only nodes whose clearance exceeds
/// (1 + bound)(a1 - a2) + 2h.
LevelsetCheck levelset_distance_check(const DiscreteManifold& m, const ScalarField& f, double a1, double a2,
                                      bool clear_of_truncation = false);

}  // namespace dlab
