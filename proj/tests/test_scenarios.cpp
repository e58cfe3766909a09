#include <set>

#include "doctest.h"
#include "dlab/scenarios.hpp"

using namespace dlab;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::internal;
}

}  // namespace

TEST_CASE("scenario names and rejection") {
  const auto names = scenario_names();
  CHECK(names == std::vector<std::string>{"plane", "cylinder", "capped_half_cylinder", "pants"});
  CHECK(kind_of([] { make_scenario("torus"); }) == ErrorKind::invalid_input);
  CHECK(kind_of([] { make_scenario("plane", {0.0, 64}); }) == ErrorKind::invalid_input);
  CHECK(kind_of([] { make_scenario("plane", {0.0, 31}); }) == ErrorKind::invalid_input);
  CHECK(kind_of([] { make_scenario("capped_half_cylinder", {0.0, 10}); }) == ErrorKind::invalid_input);
  CHECK(kind_of([] { make_scenario("pants", {0.0, 22}); }) == ErrorKind::invalid_input);
}

TEST_CASE("plane scenario") {
  const auto s = make_scenario("plane", {32.0, 65});
  const auto& m = s.manifold;
  CHECK(s.known_ends == 1);
  CHECK(s.known_minfty_lower_bound == 4);
  CHECK(s.expected_c1_solution_exists);
  CHECK(m.size() == 65u * 65u);
  CHECK(s.base == m.grid_node(0, 32, 32));
  CHECK(m.center() == s.base);
  CHECK(m.window_radius() == doctest::Approx(32.0));
  REQUIRE(s.rays.size() == 5);
  for (const auto& r : s.rays) {
    const auto ray = trace(s, r);
    CHECK(ray.max_deviation <= ray.ray_tol);
  }
  // The 45 degree ray targets lie on the diagonal.
  const auto p = m.point(s.rays[1].targets.back());
  const auto o = m.point(s.base);
  CHECK(p.u - o.u == doctest::Approx(p.v - o.v));
  CHECK(s.set_sequences.size() == 4);
  for (const auto& q : s.set_sequences) {
    for (std::size_t k = 1; k < q.sets.size(); ++k) CHECK(q.sets[k].size() < q.sets[k - 1].size());
  }
}

TEST_CASE("cylinder scenario has two ends") {
  const auto s = make_scenario("cylinder", {120.0, 24});
  const auto e = end_partition(s.manifold, s.base, s.end_radii);
  CHECK(e.stabilized);
  CHECK(e.stabilized_count == s.known_ends);
  const auto up = trace(s, s.rays[0]);
  const auto down = trace(s, s.rays[1]);
  CHECK_FALSE(cofinal(up, down, e));
  CHECK(up.certified_span >= 64.0);
}

TEST_CASE("capped half-cylinder scenario") {
  const auto s = make_scenario("capped_half_cylinder", {60.0, 24});
  const auto& m = s.manifold;
  std::size_t cap = 0;
  for (char c : s.core) cap += c != 0;
  // Cap rows 1.. (res/4) hold res nodes each; the pole is one node. The
  // gluing row is shared with the tube.
  CHECK(cap == 24u * 6u + 1u);
  CHECK(s.core[m.grid_node(1, 0, 0)]);
  CHECK_FALSE(s.core[m.grid_node(0, 0, 10)]);
  const auto e = end_partition(m, s.base, s.end_radii);
  CHECK(e.stabilized_count == 1);
  // The pole is a quarter meridian from the gluing circle.
  const double d = pairwise_distance(m, s.base, m.grid_node(1, 0, 0));
  CHECK(d == doctest::Approx(6.0).epsilon(0.01));
}

TEST_CASE("pants scenario has three ends and a cone neighbourhood at the base") {
  const auto s = make_scenario("pants", {80.0, 24});
  const auto& m = s.manifold;
  CHECK(s.excluded[s.base]);
  CHECK(s.core[s.base]);
  const auto e = end_partition(m, s.base, s.end_radii);
  CHECK(e.stabilized);
  CHECK(e.stabilized_count == 3);
  std::set<int> tails;
  for (const auto& r : s.rays) tails.insert(tail_labels(e, trace(s, r)).back());
  CHECK(tails.size() == 3);
  // Far up a leg is neither core nor excluded.
  const NodeId far = m.grid_node(0, 5, 60);
  CHECK_FALSE(s.core[far]);
  CHECK_FALSE(s.excluded[far]);
}

TEST_CASE("reports") {
  Report r{"ends", "plane", {{"a", true, 1.0, 2.0, ""}, {"b", false, 3.0, 2.0, "why"}}};
  CHECK_FALSE(r.pass());
  REQUIRE(r.first_failure() != nullptr);
  CHECK(r.first_failure()->name == "b");
  const auto text = to_text(r);
  CHECK(text ==
        "verification = ends\nscenario = plane\ncheck = a\nstatus = pass\nmetric = 1\ntolerance = 2\n"
        "check = b\nstatus = fail\nmetric = 3\ntolerance = 2\ndetail = why\nresult = fail\n");
  r.checks.pop_back();
  CHECK(r.pass());

  const auto rows = tolerance_table();
  std::set<std::string> names;
  for (const auto& row : rows) names.insert(row.name);
  CHECK(names == std::set<std::string>{"limit_tol", "grad_tol", "ray_tol", "shift_tol", "eps", "semiconcavity_tol",
                                       "path_tol"});
}

TEST_CASE("verifiers reject unsupported scenarios") {
  const auto s = make_scenario("cylinder", {120.0, 24});
  CHECK(kind_of([&] { verify_theorem3(s); }) == ErrorKind::invalid_input);
  CHECK(kind_of([&] { verify_theorem4(s); }) == ErrorKind::invalid_input);
  CHECK(kind_of([&] { verify_busemann_closed_form(s); }) == ErrorKind::invalid_input);
}

TEST_CASE("metric verification is deterministic on a short cylinder") {
  const auto s = make_scenario("cylinder", {320.0, 24});
  const auto a = verify_metric(s);
  const auto b = verify_metric(s);
  CHECK(to_text(a) == to_text(b));
  CHECK(a.pass());
  VerifyOptions o;
  o.seed = 2;
  CHECK(verify_metric(s, o).checks.size() == a.checks.size());
}
