#include "dlab/scenarios.hpp"

#include <cmath>
#include <numbers>

namespace dlab {

namespace {

constexpr double kTubeCircumference = 24.0;
constexpr double kTubeHeight = 640.0;
constexpr double kPlaneRadius = 256.0;
constexpr double kConeExclusion = 8.0;
constexpr double kEps = 0.5;

// j0 + dir * d for d = 8, 16, 32, ... below reach, then reach itself.
std::vector<NodeId> column_targets(const DiscreteManifold& m, int chart, int i, int j0, int dir, int reach) {
  std::vector<NodeId> t;
  for (int d = 8; d < reach; d *= 2) t.push_back(m.grid_node(chart, i, j0 + dir * d));
  t.push_back(m.grid_node(chart, i, j0 + dir * reach));
  return t;
}

std::vector<NodeSet> rows(const DiscreteManifold& m, int chart, int j0, int dir, int reach) {
  std::vector<NodeSet> out;
  for (int d = 16; d < reach; d *= 2) out.push_back(chart_row(m, chart, j0 + dir * d));
  return out;
}

int tube_resolution(const ScenarioOptions& o, int multiple) {
  const int res = o.resolution > 0 ? o.resolution : 24;
  if (res < 4 || res % multiple != 0) {
    throw Error(ErrorKind::invalid_input, "tube resolution must be a multiple of " + std::to_string(multiple));
  }
  return res;
}

ChartSpec tube(std::string name, double circumference, int nu, double v0, double v1, int nv, Side cut) {
  ChartSpec s;
  s.name = std::move(name);
  s.u1 = circumference;
  s.nu = nu;
  s.v0 = v0;
  s.v1 = v1;
  s.nv = nv;
  s.identify = Identification::periodic_u;
  s.cut = {cut};
  return s;
}

Scenario plane(const ScenarioOptions& o) {
  Scenario s;
  s.name = "plane";
  s.window = o.window > 0 ? o.window : kPlaneRadius;
  s.resolution = o.resolution > 0 ? o.resolution : 2 * static_cast<int>(std::lround(s.window)) + 1;
  if (s.resolution % 2 == 0 || s.resolution < 33) {
    throw Error(ErrorKind::invalid_input, "plane resolution must be odd and at least 33");
  }
  ChartSpec c;
  c.name = "plane";
  c.u0 = c.v0 = -s.window;
  c.u1 = c.v1 = s.window;
  c.nu = c.nv = s.resolution;
  c.cut = {Side::u0, Side::u1, Side::v0, Side::v1};
  s.manifold = build_chart_manifold(c);
  const int mid = (s.resolution - 1) / 2;
  s.base = s.manifold.grid_node(0, mid, mid);
  s.manifold = s.manifold.with_center(s.base);
  s.known_ends = 1;
  s.known_minfty_lower_bound = 4;
  s.expected_c1_solution_exists = true;
  const double h = s.manifold.spacing();
  s.end_radii = {4.0 * h, 6.0 * h, 8.0 * h};
  s.eps = kEps;
  s.start_radius = 16.0 * h;
  const int reach = mid - 1;
  const struct {
    const char* name;
    int di, dj;
  } dirs[] = {{"0", 1, 0}, {"45", 1, 1}, {"90", 0, 1}, {"180", -1, 0}, {"270", 0, -1}};
  for (const auto& d : dirs) {
    RaySpec r{d.name, "infinity", s.base, {}, std::string_view(d.name) != "45"};
    for (int k = 8; k < reach; k *= 2) r.targets.push_back(s.manifold.grid_node(0, mid + d.di * k, mid + d.dj * k));
    r.targets.push_back(s.manifold.grid_node(0, mid + d.di * reach, mid + d.dj * reach));
    s.rays.push_back(std::move(r));
  }
  // Half-planes {u >= c}, {v >= c}, {u <= -c} and {u + v >= c sqrt 2}, in grid units.
  const struct {
    const char* name;
    int a, b;
    bool diagonal;
  } halves[] = {{"half-planes +u", 1, 0, false}, {"half-planes +v", 0, 1, false},
                {"half-planes -u", -1, 0, false}, {"half-planes +u+v", 1, 1, true}};
  for (const auto& hp : halves) {
    SetSequence q{hp.name, "infinity", {}};
    for (int d = 16; d < mid; d *= 2) {
      const double level = hp.diagonal ? d * std::sqrt(2.0) : d;
      NodeSet set;
      for (int j = 0; j < s.resolution; ++j) {
        for (int i = 0; i < s.resolution; ++i) {
          if (hp.a * (i - mid) + hp.b * (j - mid) >= level - 1e-9) set.push_back(s.manifold.grid_node(0, i, j));
        }
      }
      q.sets.push_back(std::move(set));
    }
    s.set_sequences.push_back(std::move(q));
  }
  return s;
}

Scenario cylinder(const ScenarioOptions& o) {
  Scenario s;
  s.name = "cylinder";
  s.resolution = tube_resolution(o, 1);
  s.window = o.window > 0 ? o.window : kTubeHeight;
  const double h = kTubeCircumference / s.resolution;
  const int half = static_cast<int>(std::lround(s.window / h));
  ChartSpec c = tube("cylinder", kTubeCircumference, s.resolution, -half * h, half * h, 2 * half + 1, Side::v0);
  c.cut.push_back(Side::v1);
  s.manifold = build_chart_manifold(c);
  s.base = s.manifold.grid_node(0, 0, half);
  s.manifold = s.manifold.with_center(s.base);
  s.known_ends = 2;
  s.known_minfty_lower_bound = 2;
  s.end_radii = {16.0, 24.0, 32.0};
  s.eps = kEps;
  s.start_radius = 16.0;
  const auto& m = s.manifold;
  s.rays.push_back({"up", "up", s.base, column_targets(m, 0, 0, half, 1, half - 1)});
  s.rays.push_back({"down", "down", s.base, column_targets(m, 0, 0, half, -1, half - 1)});
  s.set_sequences.push_back({"circles up", "up", rows(m, 0, half, 1, half)});
  s.set_sequences.push_back({"circles down", "down", rows(m, 0, half, -1, half)});
  return s;
}

Scenario capped_half_cylinder(const ScenarioOptions& o) {
  Scenario s;
  s.name = "capped_half_cylinder";
  s.resolution = tube_resolution(o, 4);
  s.window = o.window > 0 ? o.window : kTubeHeight;
  const double h = kTubeCircumference / s.resolution;
  const int height = static_cast<int>(std::lround(s.window / h));
  // Hemisphere of radius rho: v is arclength from the pole, u arclength on the equator.
  const double rho = kTubeCircumference / (2.0 * std::numbers::pi);
  const double quarter = std::numbers::pi * rho / 2.0;
  const int cap_rows = s.resolution / 4 + 1;
  ChartSpec cap = tube("cap", kTubeCircumference, s.resolution, 0.0, quarter, cap_rows, Side::v0);
  cap.cut.clear();
  cap.collapse_v0 = true;
  cap.metric = [rho](double, double v) {
    const double r = std::sin(v / rho);
    return MetricTensor{r * r, 0.0, 1.0};
  };
  const auto side = build_chart_manifold(tube("tube", kTubeCircumference, s.resolution, 0.0, height * h, height + 1, Side::v1));
  const auto top = build_chart_manifold(cap);
  s.manifold = glue({side, top}, {Seam{0, 1, chart_row(side, 0, 0), chart_row(top, 0, cap_rows - 1)}});
  s.base = s.manifold.grid_node(0, 0, 0);
  s.manifold = s.manifold.with_center(s.base);
  s.known_ends = 1;
  s.known_minfty_lower_bound = 1;
  s.end_radii = {16.0, 24.0, 32.0};
  s.eps = kEps;
  s.start_radius = 12.0;
  const auto& m = s.manifold;
  s.core.assign(m.size(), 0);
  const GridChart& cc = m.charts()[1];
  for (NodeId id : cc.ids) s.core[id] = 1;
  const NodeId pole = m.grid_node(1, 0, 0);
  const int reach = height - 1;
  s.rays.push_back({"up", "up", s.base, column_targets(m, 0, 0, 0, 1, reach)});
  s.rays.push_back({"up third", "up", m.grid_node(0, s.resolution / 3, 0), column_targets(m, 0, s.resolution / 3, 0, 1, reach)});
  s.rays.push_back({"up from pole", "up", pole, column_targets(m, 0, s.resolution / 2, 0, 1, reach)});
  s.set_sequences.push_back({"circles up", "up", rows(m, 0, 0, 1, height)});
  return s;
}

Scenario pants(const ScenarioOptions& o) {
  Scenario s;
  s.name = "pants";
  s.resolution = tube_resolution(o, 4);
  s.window = o.window > 0 ? o.window : kTubeHeight;
  const int n = s.resolution;
  const double h = kTubeCircumference / n;
  const int height = static_cast<int>(std::lround(s.window / h));
  // Every tube has n nodes around. Each leg shares an arc of n/2 edges with
  // the waist A and a crotch of n/2 edges with the other leg.
  const int arc = n / 2;
  const int waist = 2 * arc;
  const auto a = build_chart_manifold(tube("A", waist * h, waist, 0.0, height * h, height + 1, Side::v1));
  const auto b = build_chart_manifold(tube("B", kTubeCircumference, n, -height * h, 0.0, height + 1, Side::v0));
  const auto c = build_chart_manifold(tube("C", kTubeCircumference, n, -height * h, 0.0, height + 1, Side::v0));
  Seam ab{0, 1, {}, {}}, ac{0, 2, {}, {}}, bc{1, 2, {}, {}};
  for (int k = 0; k <= arc; ++k) {
    ab.a_nodes.push_back(a.grid_node(0, k, 0));
    ab.b_nodes.push_back(b.grid_node(0, k, height));
    ac.a_nodes.push_back(a.grid_node(0, arc + k, 0));
    ac.b_nodes.push_back(c.grid_node(0, k, height));
  }
  for (int k = 0; k <= n - arc; ++k) {
    bc.a_nodes.push_back(b.grid_node(0, arc + k, height));
    bc.b_nodes.push_back(c.grid_node(0, n - k, height));
  }
  s.manifold = glue({a, b, c}, {ab, ac, bc});
  const auto& m0 = s.manifold;
  s.base = m0.grid_node(0, 0, 0);
  s.manifold = s.manifold.with_center(s.base);
  const auto& m = s.manifold;
  s.known_ends = 3;
  s.known_minfty_lower_bound = 3;
  s.end_radii = {24.0, 32.0, 40.0};
  s.eps = kEps;
  s.start_radius = 20.0;
  const auto seam = distance_to_set(m, chart_row(m, 0, 0));
  const auto cones = distance_to_set(m, {m.grid_node(0, 0, 0), m.grid_node(0, arc, 0)});
  s.core.assign(m.size(), 0);
  s.excluded.assign(m.size(), 0);
  for (NodeId p = 0; p < m.size(); ++p) {
    s.core[p] = seam[p] <= kTubeCircumference + 1e-9;
    s.excluded[p] = cones[p] < kConeExclusion;
  }
  const int reach = height - 1;
  s.rays.push_back({"A", "A", s.base, column_targets(m, 0, 0, 0, 1, reach)});
  s.rays.push_back({"B", "B", s.base, column_targets(m, 1, 0, height, -1, reach)});
  s.rays.push_back({"C", "C", s.base, column_targets(m, 2, arc, height, -1, reach)});
  s.set_sequences.push_back({"circles A", "A", rows(m, 0, 0, 1, height)});
  s.set_sequences.push_back({"circles B", "B", rows(m, 1, height, -1, height)});
  s.set_sequences.push_back({"circles C", "C", rows(m, 2, height, -1, height)});
  return s;
}

}  // namespace

std::vector<std::string> scenario_names() { return {"plane", "cylinder", "capped_half_cylinder", "pants"}; }

Scenario make_scenario(std::string_view name, const ScenarioOptions& opts) {
  if (name == "plane") return plane(opts);
  if (name == "cylinder") return cylinder(opts);
  if (name == "capped_half_cylinder") return capped_half_cylinder(opts);
  if (name == "pants") return pants(opts);
  throw Error(ErrorKind::invalid_input, "unknown scenario '" + std::string(name) + "'");
}

Ray trace(const Scenario& s, const RaySpec& r) { return trace_ray(s.manifold, r.origin, r.targets); }

}  // namespace dlab
