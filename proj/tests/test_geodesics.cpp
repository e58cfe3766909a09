#include <cmath>
#include <sstream>

#include "doctest.h"
#include "dlab/geodesics.hpp"
#include "dlab/eikonal.hpp"

using namespace dlab;

namespace {

DiscreteManifold plane(int n, double radius) {
  ChartSpec s;
  s.u0 = s.v0 = -radius;
  s.u1 = s.v1 = radius;
  s.nu = s.nv = n;
  s.cut = {Side::u0, Side::u1, Side::v0, Side::v1};
  return build_chart_manifold(s);
}

DiscreteManifold cylinder(int nu, int nv, double circumference, double height) {
  ChartSpec s;
  s.u1 = circumference;
  s.v0 = -height;
  s.v1 = height;
  s.nu = nu;
  s.nv = nv;
  s.identify = Identification::periodic_u;
  s.cut = {Side::v0, Side::v1};
  return build_chart_manifold(s);
}

std::vector<NodeId> row_targets(const DiscreteManifold& m, int i0, int j, int i1) {
  std::vector<NodeId> t;
  for (int d = 8; i0 + d <= i1; d *= 2) t.push_back(m.grid_node(0, i0 + d, j));
  return t;
}

}  // namespace

TEST_CASE("minimal segment along an axis is the node row") {
  const auto m = plane(33, 16.0);
  const auto p = minimal_segment(m, m.grid_node(0, 3, 10), m.grid_node(0, 20, 10));
  CHECK(p.size() == 18);
  for (std::size_t k = 0; k < p.size(); ++k) CHECK(p.nodes[k] == m.grid_node(0, 3 + static_cast<int>(k), 10));
  CHECK(p.length() == doctest::Approx(17.0));
  CHECK(p.cumlen.front() == 0.0);
}

TEST_CASE("minimal segment length is the graph distance exactly") {
  const auto m = plane(33, 16.0);
  for (auto [a, b] : {std::pair{NodeId{0}, NodeId{1000}}, {NodeId{17}, NodeId{555}}, {NodeId{300}, NodeId{301}}}) {
    const auto p = minimal_segment(m, a, b);
    CHECK(p.front() == a);
    CHECK(p.back() == b);
    CHECK(std::abs(p.length() - pairwise_distance(m, a, b)) <= 1e-12 * p.length());
    for (std::size_t k = 1; k < p.size(); ++k) CHECK(p.cumlen[k] > p.cumlen[k - 1]);
  }
}

TEST_CASE("cylinder segments wrap the short way") {
  const auto m = cylinder(24, 9, 24.0, 4.0);
  const NodeId a = m.grid_node(0, 2, 4), b = m.grid_node(0, 19, 4);
  const auto p = minimal_segment(m, a, b);
  // Short way crosses the seam: 7 steps; the long way is 17.
  CHECK(p.length() == doctest::Approx(7.0));
  bool crossed = false;
  for (std::size_t k = 1; k < p.size(); ++k) {
    crossed = crossed || std::abs(m.point(p.nodes[k]).u - m.point(p.nodes[k - 1]).u) > 12.0;
  }
  CHECK(crossed);
}

TEST_CASE("trace ray on the plane follows the +x row") {
  const auto m = plane(129, 64.0);
  const NodeId o = m.center();
  const auto ray = trace_ray(m, o, row_targets(m, 64, 64, 128));
  CHECK(ray.origin() == o);
  CHECK(ray.certified_span >= 32.0);
  for (NodeId p : ray.path.nodes) CHECK(m.point(p).v == 0.0);
  CHECK(ray.max_deviation <= ray.ray_tol);
  CHECK(realization_deviation(m, ray.path, 40) <= ray.ray_tol);
}

TEST_CASE("trace ray along the cylinder axis is a vertical column") {
  const auto m = cylinder(24, 121, 24.0, 60.0);
  const NodeId o = m.grid_node(0, 5, 60);
  std::vector<NodeId> t;
  for (int j : {70, 80, 100, 120}) t.push_back(m.grid_node(0, 5, j));
  const auto ray = trace_ray(m, o, t);
  CHECK(ray.certified_span >= 40.0);
  for (NodeId p : ray.path.nodes) CHECK(m.point(p).u == m.point(o).u);
  // Independent audit: every vertex pair realizes its distance.
  double worst = 0.0;
  for (std::size_t a = 0; a < ray.path.size(); a += 7) {
    for (std::size_t b = a; b < ray.path.size(); b += 5) {
      worst = std::max(worst, std::abs(pairwise_distance(m, ray.path.nodes[a], ray.path.nodes[b]) -
                                       (ray.path.cumlen[b] - ray.path.cumlen[a])));
    }
  }
  CHECK(worst <= ray.ray_tol);
}

TEST_CASE("trace ray rejects sequences that do not escape") {
  const auto m = plane(33, 16.0);
  const NodeId o = m.center();
  CHECK_THROWS_AS(trace_ray(m, o, {m.grid_node(0, 30, 16), m.grid_node(0, 20, 16)}), Error);
}

TEST_CASE("coray on the plane is asymptotically parallel to the ray") {
  const auto m = plane(129, 64.0);
  const auto ray = trace_ray(m, m.center(), row_targets(m, 64, 64, 128));
  const NodeId x = m.grid_node(0, 50, 70);
  const auto c = coray(m, ray, x);
  const Ray& r = c.primary();
  CHECK(r.origin() == x);
  CHECK(r.max_deviation <= r.ray_tol);
  // Moves in +x at every step, and ends up on a horizontal row.
  for (std::size_t k = 1; k < r.path.size(); ++k) {
    CHECK(m.point(r.path.nodes[k]).u > m.point(r.path.nodes[k - 1]).u);
  }
  const auto& last = m.point(r.path.back());
  const auto& before = m.point(r.path.nodes[r.path.size() - 2]);
  CHECK(last.v == before.v);
  CHECK(std::abs(last.v - m.point(x).v) <= 6.0);
  // The horizontal ray from x is a graph ray too, so both realize distance.
  std::vector<NodeId> row;
  for (int i = 50; i < 128; ++i) row.push_back(m.grid_node(0, i, 70));
  CHECK(is_line(m, Path::from_nodes(m, row)));
}

TEST_CASE("coray from a cylinder point is the vertical upward ray") {
  const auto m = cylinder(24, 241, 24.0, 120.0);
  std::vector<NodeId> t;
  for (int j : {130, 140, 180, 240}) t.push_back(m.grid_node(0, 0, j));
  const auto ray = trace_ray(m, m.grid_node(0, 0, 120), t);
  REQUIRE(ray.certified_span >= 60.0);
  // The stabilized prefix is the climb shared by the last two segments,
  // about span/2 - 4 x (angular offset) long.
  for (auto [i, j] : {std::pair{7, 110}, {3, 121}, {20, 100}}) {
    const NodeId x = m.grid_node(0, i, j);
    const auto c = coray(m, ray, x);
    const Ray& r = c.primary();
    CHECK(r.max_deviation <= r.ray_tol);
    CHECK(r.certified_span >= 2.0);
    for (NodeId p : r.path.nodes) CHECK(m.point(p).u == m.point(x).u);
    CHECK(m.point(r.path.back()).v > m.point(x).v);
  }
}

TEST_CASE("coray from a point on the ray is its tail") {
  const auto m = plane(129, 64.0);
  const auto ray = trace_ray(m, m.center(), row_targets(m, 64, 64, 128));
  const NodeId x = ray.path.nodes[5];
  const auto c = coray(m, ray, x);
  CHECK_FALSE(c.multiple);
  const Path& p = c.primary().path;
  for (std::size_t k = 0; k < p.size(); ++k) CHECK(p.nodes[k] == ray.path.nodes[5 + k]);
}

TEST_CASE("corays from nearby starts leave within one stencil step of each other") {
  const auto m = plane(129, 64.0);
  const auto ray = trace_ray(m, m.center(), row_targets(m, 64, 64, 128));
  const auto a = coray(m, ray, m.grid_node(0, 50, 68)).primary();
  const auto b = coray(m, ray, m.grid_node(0, 51, 67)).primary();
  const auto& a1 = m.point(a.path.nodes[1]);
  const auto& a0 = m.point(a.path.nodes[0]);
  const auto& b1 = m.point(b.path.nodes[1]);
  const auto& b0 = m.point(b.path.nodes[0]);
  const double du = (a1.u - a0.u) - (b1.u - b0.u), dv = (a1.v - a0.v) - (b1.v - b0.v);
  CHECK(std::hypot(du, dv) <= m.stencil_radius() * m.spacing() + 1e-12);
}

TEST_CASE("is_line") {
  const auto cyl = cylinder(24, 81, 24.0, 40.0);
  std::vector<NodeId> column;
  for (int j = 0; j < 81; ++j) column.push_back(cyl.grid_node(0, 3, j));
  CHECK(is_line(cyl, Path::from_nodes(cyl, column)));

  const auto m = plane(33, 16.0);
  std::vector<NodeId> row, ell;
  for (int i = 0; i < 33; ++i) row.push_back(m.grid_node(0, i, 16));
  CHECK(is_line(m, Path::from_nodes(m, row)));
  for (int i = 0; i <= 16; ++i) ell.push_back(m.grid_node(0, i, 0));
  for (int j = 1; j <= 16; ++j) ell.push_back(m.grid_node(0, 16, j));
  CHECK_FALSE(is_line(m, Path::from_nodes(m, ell)));
}

TEST_CASE("path CSV") {
  const auto m = plane(5, 2.0);
  std::ostringstream os;
  write_path_csv(os, m, minimal_segment(m, m.grid_node(0, 0, 2), m.grid_node(0, 2, 2)));
  CHECK(os.str() == "node_id,u,v,cumlen\n10,-2,0,0\n11,-1,0,1\n12,0,0,2\n");
}
