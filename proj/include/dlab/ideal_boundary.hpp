#pragma once

#include <string>
#include <vector>

#include "dlab/eikonal.hpp"

namespace dlab {

/// Closed graph balls about x0, nested by increasing radius.
struct CompactExhaustion {
  NodeId base = 0;
  std::vector<double> radii;
  std::vector<NodeSet> sets;
  /// Per node: index of the smallest ball containing it, or -1.
  std::vector<int> ring;
  /// Graph distance from the base.
  std::vector<double> distance;

  std::size_t depth() const { return radii.size(); }
  const NodeSet& largest() const { return sets.back(); }
};

CompactExhaustion make_exhaustion(const DiscreteManifold& m, NodeId x0, const std::vector<double>& radii);

/// Balls of radius 1, 2, ..., N (length units) with N the largest radius
/// whose ball lies inside `region`; at most max_depth balls.
CompactExhaustion exhaustion_within(const DiscreteManifold& m, NodeId x0, const std::vector<char>& region,
                                    std::size_t max_depth = 30);

/// Element of an ideal boundary: a field normalized to 0 at the base.
struct BoundaryPoint {
  ScalarField rep;
  std::string provenance;
};

BoundaryPoint make_boundary_point(const ScalarField& f, NodeId x0, std::string provenance);

/// Nodes reliable in every field.
std::vector<char> common_region(const std::vector<const ScalarField*>& fields);

struct RhoValue {
  double value = 0.0;
  /// 2^-N bound on the omitted terms.
  double tail = 0.0;
  std::size_t terms = 0;
};

/// sum_n min(2^-n, sup_{K_n} |u - v|) over the exhaustion.
RhoValue rho(const ScalarField& u, const ScalarField& v, const CompactExhaustion& e);

struct QuotientValue {
  double value = 0.0;
  double shift = 0.0;  // minimizing t in rho(u + t, v)
  double tail = 0.0;
};

/// inf_t rho(u + t, v): 64-point grid on [-D, D], golden-section refinement to
/// shift_tol, then exact evaluation at the breakpoints of the piecewise-linear
/// objective.
QuotientValue rho_quotient(const ScalarField& u, const ScalarField& v, const CompactExhaustion& e,
                           double shift_tol = 1e-4);

/// f + c with the same reliable region.
ScalarField shifted(const ScalarField& f, double c);

struct PathThresholds {
  double t_lo = 0.0;  // inf (v - u) on the largest ball: f_t = u + t below
  double t_hi = 0.0;  // sup (v - u) on the largest ball: f_t = v above
};

PathThresholds path_thresholds(const ScalarField& u, const ScalarField& v, const CompactExhaustion& e);

/// f_t = min(u + t, v) for each t.
std::vector<ScalarField> connect_path(const ScalarField& u, const ScalarField& v, const std::vector<double>& t_grid);

struct Clustering {
  std::vector<int> labels;
  int count = 0;
  std::vector<std::vector<double>> distances;
};

/// Single-linkage clusters at threshold eps under rho_quotient.
Clustering cluster_boundary(const std::vector<BoundaryPoint>& points, const CompactExhaustion& e, double eps);

/// |rep(p)| <= d(x0, p) + slack on the largest ball.
bool bounded_by_distance(const BoundaryPoint& b, const CompactExhaustion& e, double slack = 1e-9);

}  // namespace dlab
