#include <cmath>
#include <functional>

#include "doctest.h"
#include "dlab/ideal_boundary.hpp"

using namespace dlab;

namespace {

DiscreteManifold plane(int radius) {
  ChartSpec s;
  s.u0 = s.v0 = -radius;
  s.u1 = s.v1 = radius;
  s.nu = s.nv = 2 * radius + 1;
  s.cut = {Side::u0, Side::u1, Side::v0, Side::v1};
  return build_chart_manifold(s);
}

ScalarField sample(const DiscreteManifold& m, const std::function<double(double, double)>& g) {
  std::vector<double> v(m.size());
  for (NodeId p = 0; p < m.size(); ++p) v[p] = g(m.point(p).u, m.point(p).v);
  return ScalarField::from_values(std::move(v));
}

double geometric_tail(std::size_t n) { return 1.0 - std::ldexp(1.0, -static_cast<int>(n)); }

}  // namespace

TEST_CASE("exhaustion balls are nested closed balls") {
  const auto m = plane(16);
  const NodeId x0 = m.center();
  const auto e = make_exhaustion(m, x0, {1.0, 2.0, 4.0, 8.0});
  const auto d = distance_to_set(m, {x0});
  for (std::size_t k = 0; k < e.depth(); ++k) {
    std::size_t expected = 0;
    for (NodeId p = 0; p < m.size(); ++p) expected += d[p] <= e.radii[k] + 1e-9;
    CHECK(e.sets[k].size() == expected);
    if (k > 0) CHECK(e.sets[k].size() > e.sets[k - 1].size());
  }
  CHECK_THROWS_AS(make_exhaustion(m, x0, {2.0, 2.0}), Error);

  std::vector<char> disk(m.size());
  for (NodeId p = 0; p < m.size(); ++p) disk[p] = d[p] < 10.5;
  const auto w = exhaustion_within(m, x0, disk);
  CHECK(w.depth() == 10);
  for (NodeId p : w.largest()) CHECK(disk[p]);
}

TEST_CASE("rho closed forms") {
  const auto m = plane(24);
  const NodeId x0 = m.center();
  const auto e = exhaustion_within(m, x0, std::vector<char>(m.size(), 1), 12);
  REQUIRE(e.depth() == 12);
  const auto u = sample(m, [](double x, double y) { return -0.6 * x + 0.8 * y; });

  const auto same = rho(u, u, e);
  CHECK(same.value == 0.0);
  CHECK(same.tail == std::ldexp(1.0, -12));
  CHECK(same.terms == 12);

  CHECK(rho(shifted(u, 3.0), u, e).value == doctest::Approx(geometric_tail(12)).epsilon(1e-14));

  // u - v = eps d(x0, .): the n-th sup is eps times the farthest ball node.
  const auto d = distance_to_set(m, {x0});
  const double eps = 0.01;
  const auto v = sample(m, [](double, double) { return 0.0; });
  ScalarField w = v;
  for (NodeId p = 0; p < m.size(); ++p) w.values[p] = eps * d[p];
  double expected = 0.0;
  for (int n = 1; n <= 12; ++n) {
    double far = 0.0;
    for (NodeId p = 0; p < m.size(); ++p) {
      if (d[p] <= n + 1e-9) far = std::max(far, d[p]);
    }
    expected += std::min(std::ldexp(1.0, -n), eps * far);
  }
  CHECK(rho(w, v, e).value == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("rho refuses balls outside the reliable region") {
  const auto m = plane(12);
  const auto e = make_exhaustion(m, m.center(), {1.0, 2.0, 3.0});
  auto u = sample(m, [](double x, double) { return x; });
  const auto far = m.grid_node(0, 13, 12);
  u.reliable[far] = 0;
  CHECK_THROWS_AS(rho(u, u, e), Error);
}

TEST_CASE("quotient metric") {
  const auto m = plane(24);
  const NodeId x0 = m.center();
  const auto e = exhaustion_within(m, x0, std::vector<char>(m.size(), 1), 12);
  const auto a = sample(m, [](double x, double) { return -x; });
  const auto b = sample(m, [](double x, double y) { return -0.8 * x - 0.6 * y; });
  const auto c = sample(m, [](double, double y) { return y; });

  const auto q = rho_quotient(shifted(a, 7.0), a, e);
  CHECK(q.value <= 1e-12);
  CHECK(q.shift == doctest::Approx(-7.0).epsilon(1e-9));

  for (const auto* pair : {&a, &b}) {
    for (const auto* other : {&b, &c}) {
      const double ab = rho_quotient(*pair, *other, e).value;
      const double ba = rho_quotient(*other, *pair, e).value;
      CHECK(std::abs(ab - ba) <= 1e-12);
      CHECK(ab <= rho(*pair, *other, e).value + 1e-15);
    }
  }
  const double ab = rho_quotient(a, b, e).value;
  const double bc = rho_quotient(b, c, e).value;
  const double ac = rho_quotient(a, c, e).value;
  CHECK(ac <= ab + bc + 1e-12);
  CHECK(ab <= ac + bc + 1e-12);
  CHECK(bc <= ab + ac + 1e-12);
}

TEST_CASE("quotient minimum matches a dense scan") {
  const auto m = plane(16);
  const auto e = exhaustion_within(m, m.center(), std::vector<char>(m.size(), 1), 8);
  const auto u = sample(m, [](double x, double y) { return 0.05 * x + 0.02 * y * y / 16.0; });
  const auto v = sample(m, [](double, double) { return 0.0; });
  const double got = rho_quotient(u, v, e).value;
  double best = kInfinity;
  for (int k = -20000; k <= 20000; ++k) best = std::min(best, rho(shifted(u, k * 1e-4), v, e).value);
  CHECK(got <= best + 1e-12);
  CHECK(got >= best - 1e-4);
}

TEST_CASE("connecting path between two boundary points") {
  const auto m = plane(16);
  const auto e = exhaustion_within(m, m.center(), std::vector<char>(m.size(), 1), 8);
  const auto u = sample(m, [](double x, double) { return -x; });
  const auto v = sample(m, [](double, double y) { return -y; });
  const auto th = path_thresholds(u, v, e);
  CHECK(th.t_lo < th.t_hi);
  const auto path = connect_path(u, v, {th.t_lo - 1.0, 0.0, th.t_hi + 1.0});
  REQUIRE(path.size() == 3);
  for (NodeId p : e.largest()) {
    CHECK(path[0][p] == u[p] + th.t_lo - 1.0);
    CHECK(path[2][p] == v[p]);
    CHECK(path[1][p] == std::min(u[p], v[p]));
  }
  CHECK(rho(path[2], v, e).value == 0.0);
  CHECK(rho_quotient(path[0], u, e).value <= 1e-12);
}

TEST_CASE("plane: four axis directions give four clusters") {
  const auto m = plane(32);
  const NodeId x0 = m.center();
  const auto e = exhaustion_within(m, x0, std::vector<char>(m.size(), 1), 16);
  std::vector<BoundaryPoint> pts;
  pts.push_back(make_boundary_point(sample(m, [](double x, double) { return -x; }), x0, "+x"));
  pts.push_back(make_boundary_point(sample(m, [](double x, double) { return x; }), x0, "-x"));
  pts.push_back(make_boundary_point(sample(m, [](double, double y) { return -y; }), x0, "+y"));
  pts.push_back(make_boundary_point(sample(m, [](double, double y) { return y; }), x0, "-y"));
  pts.push_back(make_boundary_point(sample(m, [](double x, double) { return 5.0 - x; }), x0, "+x shifted"));
  const auto c = cluster_boundary(pts, e, 0.05);
  CHECK(c.count == 4);
  CHECK(c.labels[4] == c.labels[0]);
  CHECK(c.distances[0][1] >= 0.5);
  for (const auto& b : pts) {
    CHECK(b.rep[x0] == 0.0);
    CHECK(bounded_by_distance(b, e));
  }
  const auto steep = make_boundary_point(sample(m, [](double x, double) { return 2.0 * x; }), x0, "steep");
  CHECK_FALSE(bounded_by_distance(steep, e));
}

TEST_CASE("cylinder: two clusters") {
  ChartSpec s;
  s.u1 = 24.0;
  s.v0 = -40.0;
  s.v1 = 40.0;
  s.nu = 24;
  s.nv = 81;
  s.identify = Identification::periodic_u;
  s.cut = {Side::v0, Side::v1};
  const auto m = build_chart_manifold(s);
  const NodeId x0 = m.grid_node(0, 0, 40);
  const auto e = exhaustion_within(m, x0, std::vector<char>(m.size(), 1), 16);
  std::vector<BoundaryPoint> pts;
  pts.push_back(make_boundary_point(sample(m, [](double, double z) { return -z; }), x0, "top"));
  pts.push_back(make_boundary_point(sample(m, [](double, double z) { return z; }), x0, "bottom"));
  pts.push_back(make_boundary_point(sample(m, [](double, double z) { return 3.0 - z; }), x0, "top shifted"));
  const auto c = cluster_boundary(pts, e, 0.05);
  CHECK(c.count == 2);
  CHECK(c.labels == std::vector<int>{0, 1, 0});
}
