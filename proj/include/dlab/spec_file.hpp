#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dlab/manifold.hpp"

namespace dlab {

/// Manifold read from a spec file, with its base node as center.
///
/// Format: `[section]` headers followed by `key = value` lines; `#` starts a
/// comment. Sections:
///   chart    name, u0, u1, v0, v1, nu, nv, cut (list of u0 u1 v0 v1),
///            collapse_v0, stencil_radius
///   metric   chart, g11, g12, g22 (constant metric on that chart)
///   identify chart, type (none | periodic_u | periodic_v)
///   seam     a, b (chart names), a_side, b_side, a_start, b_start,
///            a_step, b_step (+1 or -1), count
///   base     chart, u, v (defaults to the midpoint of the first chart)
/// `chart` in metric and identify defaults to the last chart declared.
struct SpecManifold {
  DiscreteManifold manifold;
  NodeId base = 0;
  std::vector<std::string> charts;
};

/// Throws invalid_input naming the offending line.
SpecManifold parse_manifold_spec(std::istream& in);
SpecManifold load_manifold_spec(const std::string& path);

/// Grid node of `chart` nearest to chart coordinates (u, v).
NodeId nearest_node(const DiscreteManifold& m, int chart, double u, double v);

/// Node count, edge count, window radius and per-end labels at radii
/// R/4, R/3, R/2 (R the window radius) as key = value lines.
void describe(std::ostream& os, const DiscreteManifold& m, NodeId base);

}  // namespace dlab
