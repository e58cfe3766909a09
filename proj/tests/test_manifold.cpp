#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dlab/manifold.hpp"
#include "shortest_paths.hpp"

using namespace dlab;

namespace {

ChartSpec flat_square(int n, double side) {
  ChartSpec s;
  s.u1 = side;
  s.v1 = side;
  s.nu = n;
  s.nv = n;
  return s;
}

}  // namespace

TEST_CASE("flat 2x2 chart has Euclidean edge lengths") {
  const auto m = build_chart_manifold(flat_square(2, 1.0));
  CHECK(m.size() == 4);
  CHECK(m.edge_count() == 6);
  CHECK(*m.edge_length(m.grid_node(0, 0, 0), m.grid_node(0, 1, 0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(*m.edge_length(m.grid_node(0, 0, 0), m.grid_node(0, 0, 1)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(*m.edge_length(m.grid_node(0, 0, 0), m.grid_node(0, 1, 1)) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("periodic-in-u chart joins the seam columns") {
  ChartSpec s;
  s.u1 = 8.0;
  s.v1 = 3.0;
  s.nu = 8;
  s.nv = 4;
  s.identify = Identification::periodic_u;
  const auto m = build_chart_manifold(s);
  for (int j = 0; j < s.nv; ++j) {
    const auto len = m.edge_length(m.grid_node(0, 0, j), m.grid_node(0, s.nu - 1, j));
    REQUIRE(len.has_value());
    CHECK(*len == doctest::Approx(1.0));
  }
  CHECK(m.grid_node(0, -1, 2) == m.grid_node(0, s.nu - 1, 2));
}

TEST_CASE("surface of revolution circumferential edges") {
  // r(v) = 1 + v/2, g11 = r^2, u in [0, 2pi): edge length (2pi/nu) r(v) exactly.
  ChartSpec s;
  s.u1 = 2.0 * std::numbers::pi;
  s.v1 = 2.0;
  s.nu = 24;
  s.nv = 5;
  s.identify = Identification::periodic_u;
  s.metric = [](double, double v) { return MetricTensor{(1.0 + 0.5 * v) * (1.0 + 0.5 * v), 0.0, 1.0}; };
  const auto m = build_chart_manifold(s);
  for (int j = 0; j < s.nv; ++j) {
    const double v = 0.5 * j;
    const double expected = 2.0 * std::numbers::pi / s.nu * (1.0 + 0.5 * v);
    for (int i = 0; i < s.nu; ++i) {
      const double len = *m.edge_length(m.grid_node(0, i, j), m.grid_node(0, i + 1, j));
      CHECK(std::abs(len - expected) <= 1e-12);
    }
  }
}

TEST_CASE("non-SPD metric is rejected with the node named") {
  ChartSpec s = flat_square(4, 1.0);
  s.metric = [](double u, double v) {
    return (u > 0.6 && v > 0.6) ? MetricTensor{1.0, 2.0, 1.0} : MetricTensor{};
  };
  try {
    build_chart_manifold(s);
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::not_spd);
    CHECK(std::string(e.what()).find("(2, 2)") != std::string::npos);
  }
}

TEST_CASE("disconnected raw graph is rejected") {
  CHECK_THROWS_AS(DiscreteManifold::from_edges(4, {{0, 1, 1.0}, {2, 3, 1.0}}), Error);
  const auto ok = DiscreteManifold::from_edges(3, {{0, 1, 1.0}, {1, 2, 2.0}});
  CHECK(ok.edge_count() == 2);
  CHECK_FALSE(ok.has_grid());
}

TEST_CASE("edge lengths are symmetric") {
  ChartSpec s = flat_square(9, 4.0);
  s.metric = [](double u, double v) { return MetricTensor{1.0 + u * u, 0.1 * v, 2.0 + v}; };
  const auto m = build_chart_manifold(s);
  for (NodeId p = 0; p < m.size(); ++p) {
    for (const Edge& e : m.neighbors(p)) CHECK(*m.edge_length(e.to, p) == e.length);
  }
}

TEST_CASE("axis path lengths are resolution independent for a constant metric") {
  for (int n : {9, 17, 33}) {
    ChartSpec s = flat_square(n, 2.0);
    s.metric = [](double, double) { return MetricTensor{2.25, 0.3, 1.0}; };
    const auto m = build_chart_manifold(s);
    double row = 0.0;
    for (int i = 0; i + 1 < n; ++i) row += *m.edge_length(m.grid_node(0, i, 3), m.grid_node(0, i + 1, 3));
    CHECK(std::abs(row - 2.0 * 1.5) < 1e-9);
  }
}

TEST_CASE("glue: mismatched seams are rejected") {
  const auto a = build_chart_manifold(flat_square(3, 2.0));
  const auto b = build_chart_manifold(flat_square(3, 2.0));
  Seam s{0, 1, chart_row(a, 0, 2), {0, 1}};
  CHECK_THROWS_AS(glue({a, b}, {s}), Error);
}

TEST_CASE("glue: two 3x3 half-planes along one side") {
  // A 3x3 grid has 6 horizontal, 6 vertical, 8 diagonal and 8 knight edges.
  const auto a = build_chart_manifold(flat_square(3, 2.0));
  const auto b = build_chart_manifold(flat_square(3, 2.0));
  REQUIRE(a.edge_count() == 28);
  const Seam s{0, 1, chart_row(a, 0, 2), chart_row(b, 0, 0)};
  const auto g = glue({a, b}, {s});
  CHECK(g.size() == 9 + 9 - 3);
  // The two seam row edges coincide.
  CHECK(g.edge_count() == 28 + 28 - 2);
  CHECK(g.charts().size() == 2);
  CHECK(g.grid_node(0, 1, 2) == g.grid_node(1, 1, 0));
}

TEST_CASE("glue averages coincident edge lengths") {
  auto sa = flat_square(3, 2.0);
  auto sb = flat_square(3, 2.0);
  sb.metric = [](double, double) { return MetricTensor{4.0, 0.0, 4.0}; };
  const auto a = build_chart_manifold(sa);
  const auto b = build_chart_manifold(sb);
  const auto g = glue({a, b}, {Seam{0, 1, chart_row(a, 0, 2), chart_row(b, 0, 0)}});
  CHECK(*g.edge_length(g.grid_node(0, 0, 2), g.grid_node(0, 1, 2)) == doctest::Approx(1.5));
}

TEST_CASE("boundary margin") {
  SUBCASE("flat window centered node sits at the window radius") {
    ChartSpec s = flat_square(41, 40.0);
    s.cut = {Side::u0, Side::u1, Side::v0, Side::v1};
    const auto m = build_chart_manifold(s);
    CHECK(m.margin()[m.grid_node(0, 0, 7)] == 0.0);
    CHECK(m.margin()[m.grid_node(0, 40, 40)] == 0.0);
    CHECK(m.window_radius() == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(boundary_margin(m)[m.grid_node(0, 25, 20)] == doctest::Approx(15.0));
  }
  SUBCASE("uncut chart has no boundary") {
    ChartSpec s;
    s.nu = s.nv = 6;
    s.identify = Identification::periodic_u;
    const auto m = build_chart_manifold(s);
    for (double x : m.margin()) CHECK(x == kInfinity);
  }
  SUBCASE("periodic sides cannot be cut") {
    ChartSpec s;
    s.nu = s.nv = 6;
    s.identify = Identification::periodic_u;
    s.cut = {Side::u0};
    CHECK_THROWS_AS(build_chart_manifold(s), Error);
  }
}

TEST_CASE("collapsed pole row") {
  ChartSpec s;
  s.u1 = 2.0 * std::numbers::pi;
  s.v1 = 1.0;
  s.nu = 16;
  s.nv = 5;
  s.identify = Identification::periodic_u;
  s.collapse_v0 = true;
  s.metric = [](double, double v) { return MetricTensor{std::sin(v) * std::sin(v), 0.0, 1.0}; };
  const auto m = build_chart_manifold(s);
  CHECK(m.size() == 16 * 4 + 1);
  const NodeId pole = m.grid_node(0, 3, 0);
  CHECK(pole == m.grid_node(0, 11, 0));
  // Meridian edges from the pole have the meridian length.
  CHECK(*m.edge_length(pole, m.grid_node(0, 5, 1)) == doctest::Approx(0.25));
}

TEST_CASE("stencil bound matches graph distances on a large flat grid") {
  const double known2 = 0.027486290;  // 16-neighbour stencil
  CHECK(stencil_bound(2) == doctest::Approx(known2).epsilon(1e-6));
  CHECK(stencil_bound(1) == doctest::Approx(std::sqrt(4.0 - 2.0 * std::sqrt(2.0)) - 1.0));
  for (int r : {2, 3, 4}) {
    ChartSpec s = flat_square(121, 120.0);
    s.stencil_radius = r;
    const auto m = build_chart_manifold(s);
    const NodeId origin = m.grid_node(0, 0, 0);
    const NodeSet src{origin};
    const auto d = detail::dijkstra(m, src);
    double worst = 0.0;
    for (NodeId p = 0; p < m.size(); ++p) {
      const double e = std::hypot(m.point(p).u, m.point(p).v);
      if (e > 30.0) worst = std::max(worst, d[p] / e - 1.0);
    }
    CHECK(worst <= stencil_bound(r) + 1e-12);
    CHECK(worst >= 0.9 * stencil_bound(r));
  }
  CHECK(stencil_bound(4) < 0.008);
  CHECK(stencil_offsets(2).size() == 16);
  CHECK(stencil_offsets(4).size() == 48);
}
