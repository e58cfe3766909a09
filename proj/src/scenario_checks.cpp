#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "dlab/scenarios.hpp"
#include "shortest_paths.hpp"

namespace dlab {

namespace {

struct Named {
  std::string name;
  ScalarField field;
};

class Checks {
 public:
  Checks(std::string verification, const Scenario& s) {
    r_.verification = std::move(verification);
    r_.scenario = s.name;
  }

  // Passes when metric <= tolerance.
  void at_most(std::string name, double metric, double tolerance, std::string detail = {}) {
    add(std::move(name), metric <= tolerance, metric, tolerance, std::move(detail));
  }
  void at_least(std::string name, double metric, double tolerance, std::string detail = {}) {
    add(std::move(name), metric >= tolerance, metric, tolerance, std::move(detail));
  }
  void add(std::string name, bool pass, double metric, double tolerance, std::string detail = {}) {
    r_.checks.push_back({std::move(name), pass, metric, tolerance, std::move(detail)});
  }
  Report take() { return std::move(r_); }

 private:
  Report r_;
};

std::string join(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + std::to_string(xs[i]);
  return out;
}

LimitOptions limit_options(const Scenario& s, const Tolerances& t) {
  LimitOptions o;
  o.backend = s.backend;
  o.limit_tol = t.limit_tol;
  return o;
}

// Drops the nodes the scenario excludes from viscosity checks.
ScalarField masked(const Scenario& s, ScalarField f) {
  if (s.excluded.empty()) return f;
  for (NodeId p = 0; p < f.size(); ++p) {
    if (s.excluded[p]) f.reliable[p] = 0;
  }
  return f;
}

Limit busemann_of(const Scenario& s, const RaySpec& r, const Tolerances& t) {
  auto b = busemann(s.manifold, trace(s, r), s.base, limit_options(s, t));
  b.field.label = "busemann " + r.name;
  return b;
}

Limit dl_of(const Scenario& s, const SetSequence& q, const Tolerances& t) {
  auto d = dl_function(s.manifold, q.sets, s.base, limit_options(s, t));
  d.field.label = "dl " + q.name;
  return d;
}

const RaySpec& ray_named(const Scenario& s, std::string_view name) {
  for (const auto& r : s.rays) {
    if (r.name == name) return r;
  }
  throw Error(ErrorKind::internal, "scenario has no ray " + std::string(name));
}

const SetSequence& sequence_named(const Scenario& s, std::string_view name) {
  for (const auto& q : s.set_sequences) {
    if (q.name == name) return q;
  }
  throw Error(ErrorKind::internal, "scenario has no set sequence " + std::string(name));
}

double grad_tol(const Scenario& s, const Tolerances& t) {
  return t.grad_tol > 0 ? t.grad_tol : default_grad_tol(s.manifold);
}

double eps_of(const Scenario& s, const Tolerances& t) { return t.eps > 0 ? t.eps : s.eps; }

// Index draws with plain modulo so reports do not depend on the standard
// library's distribution algorithms.
std::size_t draw(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

// Up to `count` distinct seeded coray starts within start_radius of the base.
NodeSet coray_starts(const Scenario& s, std::size_t count, std::uint64_t seed) {
  const auto& m = s.manifold;
  const auto dist = detail::dijkstra(m, NodeSet{s.base});
  NodeSet pool;
  for (NodeId p = 0; p < m.size(); ++p) {
    if (p == s.base || m.is_cut(p) || dist[p] > s.start_radius) continue;
    if (!s.excluded.empty() && s.excluded[p]) continue;
    pool.push_back(p);
  }
  std::mt19937_64 rng(seed);
  NodeSet out;
  for (std::size_t i = 0; i < count && i < pool.size(); ++i) {
    std::swap(pool[i], pool[i + draw(rng, pool.size() - i)]);
    out.push_back(pool[i]);
  }
  return out;
}

std::vector<BoundaryPoint> points_of(const Scenario& s, const std::vector<Named>& fields) {
  std::vector<BoundaryPoint> out;
  for (const auto& f : fields) out.push_back(make_boundary_point(f.field, s.base, f.name));
  return out;
}

CompactExhaustion exhaustion_for(const Scenario& s, const std::vector<BoundaryPoint>& pts) {
  std::vector<const ScalarField*> ptr;
  for (const auto& p : pts) ptr.push_back(&p.rep);
  return exhaustion_within(s.manifold, s.base, common_region(ptr));
}

std::string cluster_detail(const Clustering& c, const std::vector<BoundaryPoint>& pts) {
  std::ostringstream os;
  os << "labels=" << join(c.labels);
  double closest_apart = -1.0;
  double widest_within = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d = c.distances[i][j];
      if (c.labels[i] == c.labels[j]) {
        widest_within = std::max(widest_within, d);
      } else if (closest_apart < 0 || d < closest_apart) {
        closest_apart = d;
      }
    }
  }
  os << " max_within=" << format_real(widest_within);
  if (closest_apart >= 0) os << " min_between=" << format_real(closest_apart);
  return os.str();
}

std::string min_name(const std::string& a, const std::string& b, double c) {
  std::string out = "min(" + a + ", " + b;
  if (c > 0) out += " + " + format_real(c);
  if (c < 0) out += " - " + format_real(-c);
  return out + ")";
}

std::vector<Named> battery(const Scenario& s, const Tolerances& t) {
  std::vector<Named> out;
  const auto b = [&](std::string_view r) { out.push_back({"busemann " + std::string(r), busemann_of(s, ray_named(s, r), t).field}); };
  const auto dl = [&](std::string_view q) { out.push_back({"dl " + std::string(q), dl_of(s, sequence_named(s, q), t).field}); };
  // min(field i, field j + c), labelled by names.
  const auto mn = [&](std::size_t i, std::size_t j, double c) {
    auto f = min_combine(out[i].field, shifted(out[j].field, c));
    out.push_back({min_name(out[i].name, out[j].name, c), std::move(f)});
  };
  if (s.name == "plane") {
    b("0"), b("45"), b("90");
    dl("half-planes +u"), dl("half-planes +v"), dl("half-planes -u"), dl("half-planes +u+v");
    mn(3, 5, 0), mn(3, 4, 3);
  } else if (s.name == "cylinder") {
    b("up"), b("down"), dl("circles up"), dl("circles down");
    mn(2, 3, 0), mn(0, 1, 6);
  } else if (s.name == "capped_half_cylinder") {
    b("up"), b("up third"), b("up from pole"), dl("circles up");
    mn(0, 1, 2);
  } else if (s.name == "pants") {
    b("A"), b("B"), b("C"), dl("circles A"), dl("circles B"), dl("circles C");
    mn(0, 1, 0);
  } else {
    throw Error(ErrorKind::invalid_input, "no field battery for scenario " + s.name);
  }
  return out;
}

double reliable_min(const ScalarField& f) {
  double lo = 0.0;
  for (NodeId p = 0; p < f.size(); ++p) {
    if (f.is_reliable(p)) lo = std::min(lo, f[p]);
  }
  return lo;
}

std::string residual_detail(const ResidualReport& r) {
  std::ostringstream os;
  os << "evaluated=" << r.evaluated << " singular=" << r.singular << " convex=" << r.convex
     << " offending=" << r.offending_nodes.size();
  return os.str();
}

void residual_check(Checks& out, const Scenario& s, const std::string& name, const ScalarField& f, double gt) {
  const auto r = eikonal_residual(s.manifold, f, gt, gt);
  out.add("residual " + name, r.pass() && r.evaluated > 0, r.max_abs_dev, gt, residual_detail(r));
}

// Doubling n = 1, 2, 4, ... (length units) with K_n well inside the sampled
// range of f; the last four.
std::vector<double> doubling_schedule(const DiscreteManifold& m, double depth) {
  std::vector<double> out;
  for (double n = m.spacing(); n <= depth / 2; n *= 2) out.push_back(n);
  if (out.size() > 4) out.erase(out.begin(), out.end() - 4);
  return out;
}

// Depth over which the distance identities can be evaluated: the sampled
// range of f, capped by the largest clearance from the truncation.
double identity_depth(const ScalarField& f, const std::vector<double>& clearance) {
  double reach = 0.0;
  for (NodeId p = 0; p < f.size(); ++p) {
    if (f.is_reliable(p) && std::isfinite(clearance[p])) reach = std::max(reach, clearance[p]);
  }
  const double depth = -reliable_min(f);
  return reach > 0.0 ? std::min(depth, reach) : depth;
}

// The comparison region is fixed by the largest scheduled n that leaves
// nodes clear of the truncation.
void reconstruction_check(Checks& out, const Scenario& s, const std::string& name, const ScalarField& f) {
  const auto& m = s.manifold;
  const double rt = reconstruction_tol(m);
  const auto clearance = truncation_clearance(m, f);
  auto schedule = doubling_schedule(m, identity_depth(f, clearance));
  while (!schedule.empty() &&
         reconstruction_region_size(m, f, -schedule.front(), schedule.back(), clearance) == 0) {
    schedule.pop_back();
  }
  if (schedule.empty()) {
    out.add("reconstruction " + name, false, 0.0, rt, "no node clear of the truncation");
    return;
  }
  double worst = 0.0;
  double prev = 0.0;
  bool monotone = true;
  std::size_t evaluated = 0;
  std::string devs;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const auto r = levelset_reconstruct(m, f, s.base, schedule[k], -schedule.front(), schedule.back());
    evaluated = r.evaluated;
    worst = std::max(worst, r.deviation);
    if (k > 0 && r.deviation > prev + 1e-12) monotone = false;
    prev = r.deviation;
    devs += (k ? "," : "") + format_real(schedule[k]) + ":" + format_real(r.deviation);
  }
  out.add("reconstruction " + name, worst <= rt && monotone, worst, rt,
          std::string("monotone=") + (monotone ? "true" : "false") + " evaluated=" + std::to_string(evaluated) +
              " n:dev=" + devs);
}

void levelset_check(Checks& out, const Scenario& s, const std::string& name, const ScalarField& f) {
  const auto& m = s.manifold;
  const double depth = identity_depth(f, truncation_clearance(m, f));
  const double bound = default_grad_tol(m) / 3.0;
  double worst_excess = -1e300;
  std::string detail;
  std::size_t pairs = 0;
  bool ok = true;
  for (const auto& [p1, p2] : {std::pair{0.125, 0.25}, {0.125, 0.5}, {0.25, 0.75}}) {
    const double a1 = -p1 * depth;
    const double a2 = -p2 * depth;
    const double tol = bound * (a1 - a2) + 2.0 * m.spacing();
    detail += (detail.empty() ? "" : " ") + format_real(a1) + "/" + format_real(a2) + ":";
    LevelsetCheck c;
    try {
      c = levelset_distance_check(m, f, a1, a2, true);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::empty_set) throw;
      detail += "empty";
      continue;
    }
    ++pairs;
    ok = ok && c.deviation <= tol;
    worst_excess = std::max(worst_excess, c.deviation - tol);
    detail += format_real(c.deviation) + "<=" + format_real(tol) + "(band " + std::to_string(c.band) + ")";
  }
  out.add("levelset " + name, ok && pairs > 0, pairs > 0 ? worst_excess : 0.0, 0.0, detail);
}

}  // namespace

bool Report::pass() const { return first_failure() == nullptr; }

const Check* Report::first_failure() const {
  for (const auto& c : checks) {
    if (!c.pass) return &c;
  }
  return nullptr;
}

void write_report(std::ostream& os, const Report& r) {
  os << "verification = " << r.verification << '\n';
  os << "scenario = " << r.scenario << '\n';
  for (const auto& c : r.checks) {
    os << "check = " << c.name << '\n';
    os << "status = " << (c.pass ? "pass" : "fail") << '\n';
    os << "metric = " << format_real(c.metric) << '\n';
    os << "tolerance = " << format_real(c.tolerance) << '\n';
    if (!c.detail.empty()) os << "detail = " << c.detail << '\n';
  }
  os << "result = " << (r.pass() ? "pass" : "fail") << '\n';
}

std::string to_text(const Report& r) {
  std::ostringstream os;
  write_report(os, r);
  return os.str();
}

std::vector<ToleranceRow> tolerance_table() {
  return {
      {"limit_tol", "1e-3 x window radius", "sup change between the last two limit iterates on the reliable region"},
      {"grad_tol", "3 x stencil bound", "regular/singular gap threshold and eikonal residual tolerance"},
      {"ray_tol", "2 x stencil bound x span", "ray audit: max |d(origin, gamma(t)) - t|"},
      {"shift_tol", "1e-4", "golden-section bracket for the rho_quotient shift"},
      {"eps", "0.5", "single-linkage threshold for boundary clusters under rho_quotient"},
      {"semiconcavity_tol", "10 x stencil bound", "largest accepted semiconcavity constant per unit length"},
      {"path_tol", "1e-9", "connecting-path endpoint distance"},
  };
}

Report verify_ends(const Scenario& s, const VerifyOptions& opts) {
  const auto& m = s.manifold;
  const auto& tol = opts.tol;
  Checks out("ends", s);
  auto e = end_partition(m, s.base, s.end_radii);
  out.add("end_count", e.stabilized && e.stabilized_count == s.known_ends, e.stabilized_count, s.known_ends,
          "counts=" + join(e.counts) + std::string(" stabilized=") + (e.stabilized ? "true" : "false"));

  std::vector<Ray> rays;
  for (const auto& r : s.rays) rays.push_back(trace(s, r));
  for (std::size_t i = 0; i < rays.size(); ++i) {
    const double rt = tol.ray_tol > 0 ? tol.ray_tol : rays[i].ray_tol;
    out.at_most("ray_audit " + s.rays[i].name, rays[i].max_deviation, rt,
                "span=" + format_real(rays[i].certified_span));
  }

  // Rays into the same named end share a tail label; different ends differ.
  std::size_t mismatches = 0;
  std::vector<int> tails;
  for (std::size_t i = 0; i < rays.size(); ++i) tails.push_back(assign_tail(e, s.rays[i].name, rays[i]));
  for (std::size_t i = 0; i < rays.size(); ++i) {
    for (std::size_t j = i + 1; j < rays.size(); ++j) {
      const bool same_end = s.rays[i].end == s.rays[j].end;
      if (same_end != cofinal(rays[i], rays[j], e)) ++mismatches;
    }
  }
  out.at_most("ray_tails", static_cast<double>(mismatches), 0.0, "tails=" + join(tails));

  const auto starts = coray_starts(s, 8, opts.seed);
  for (std::size_t i = 0; i < rays.size(); ++i) {
    const auto c = verify_coray_cofinality(m, rays[i], starts, e);
    std::ostringstream d;
    d << "checked=" << c.checked << " too_short=" << c.too_short << " unstabilized=" << c.unstabilized;
    out.add("coray_cofinality " + s.rays[i].name, c.pass() && c.checked >= 8,
            static_cast<double>(c.violations.size() + c.too_short), 0.0, d.str());
  }

  std::vector<Named> sample;
  for (const auto& r : s.rays) {
    if (r.sample) sample.push_back({"busemann " + r.name, busemann_of(s, r, tol).field});
  }
  const auto pts = points_of(s, sample);
  const auto ex = exhaustion_for(s, pts);
  const auto ineq = verify_ends_inequality(e, pts, ex, eps_of(s, tol));
  out.add("ends_inequality", ineq.pass(), ineq.ends, ineq.clusters,
          "clusters=" + std::to_string(ineq.clusters) + " depth=" + std::to_string(ex.depth()) + " " +
              cluster_detail(ineq.clustering, pts));
  return out.take();
}

Report verify_busemann_closed_form(const Scenario& s, const VerifyOptions& opts) {
  if (s.name != "plane") throw Error(ErrorKind::invalid_input, "closed-form Busemann check needs the plane scenario");
  const auto& m = s.manifold;
  Checks out("busemann", s);
  const auto o = m.point(s.base);
  for (const char* name : {"0", "45", "90"}) {
    const auto& r = ray_named(s, name);
    const auto t = m.point(r.targets.back());
    const double du = t.u - o.u;
    const double dv = t.v - o.v;
    const double len = std::hypot(du, dv);
    const auto b = busemann_of(s, r, opts.tol);
    double err = 0.0;
    std::size_t n = 0;
    for (NodeId p = 0; p < m.size(); ++p) {
      if (!b.field.is_reliable(p)) continue;
      const auto x = m.point(p);
      const double exact = -((x.u - o.u) * du + (x.v - o.v) * dv) / len;
      err = std::max(err, std::abs(b.field[p] - exact));
      ++n;
    }
    out.at_most("closed_form " + std::string(name), err, 0.01 * s.window,
                "reliable=" + std::to_string(n) + " radius=" + format_real(b.report.reliable_radius));
  }
  return out.take();
}

Report verify_theorem1(const Scenario& s, const VerifyOptions& opts) {
  const auto& m = s.manifold;
  const auto& tol = opts.tol;
  const double gt = grad_tol(s, tol);
  const double sct = tol.semiconcavity_tol > 0 ? tol.semiconcavity_tol : default_semiconcavity_tol(m);
  const double h = m.spacing();
  Checks out("theorem1", s);
  // Distance identities use the raw fields; viscosity classification skips
  // the excluded nodes.
  const auto raw = battery(s, tol);
  auto fields = raw;
  for (auto& f : fields) f.field = masked(s, std::move(f.field));

  for (std::size_t k = 0; k < fields.size(); ++k) {
    const auto& [name, f] = fields[k];
    residual_check(out, s, name, f, gt);
    const auto segs = probe_segments(m, f, 200, opts.seed + k);
    const auto sc = semiconcavity_probe(f, segs);
    out.add("semiconcavity " + name, sc.segments > 0 && sc.worst_c <= sct, sc.worst_c, sct,
            "segments=" + std::to_string(sc.segments));
    reconstruction_check(out, s, name, raw[k].field);
    levelset_check(out, s, name, raw[k].field);
  }

  // Seeded min-combinations of the limit fields with integer shifts.
  std::size_t limits = 0;
  while (limits < fields.size() && fields[limits].name.rfind("min(", 0) != 0) ++limits;
  std::mt19937_64 rng(opts.seed);
  for (int k = 0; k < 5; ++k) {
    const std::size_t i = draw(rng, limits);
    const std::size_t j = (i + 1 + draw(rng, limits - 1)) % limits;
    const double c = static_cast<double>(draw(rng, 9)) - 4.0;
    const auto g = min_combine(fields[i].field, shifted(fields[j].field, c));
    residual_check(out, s, min_name(fields[i].name, fields[j].name, c), g, gt);
  }

  // Lattice laws of min hold exactly on the common region.
  {
    const auto& a = fields[0].field;
    const auto& b = fields[1 % limits].field;
    const auto& c = fields[2 % limits].field;
    const auto ab = min_combine(a, b), ba = min_combine(b, a), aa = min_combine(a, a);
    const auto ab_c = min_combine(ab, c), a_bc = min_combine(a, min_combine(b, c));
    std::size_t bad = 0, n = 0;
    for (NodeId p = 0; p < m.size(); ++p) {
      if (!ab_c.is_reliable(p)) continue;
      ++n;
      bad += aa[p] != a[p] || ab[p] != ba[p] || ab_c[p] != a_bc[p];
    }
    out.add("min_algebra", bad == 0 && n > 0, static_cast<double>(bad), 0.0, "nodes=" + std::to_string(n));
  }

  // Convex-kink control: |f - a| in a band about a level a of a limit field,
  // a = -depth / 4 off the plane so the kink sits inside one end.
  {
    ScalarField vee;
    if (s.name == "plane") {
      std::vector<double> v(m.size());
      for (NodeId p = 0; p < m.size(); ++p) v[p] = std::abs(m.point(p).u - m.point(s.base).u);
      vee = ScalarField::from_values(std::move(v), "control +|x|");
    } else {
      vee = fields[limits - 1].field;
      const double a = reliable_min(vee) / 4.0;
      for (auto& x : vee.values) x = std::abs(x - a);
      vee.label = "control +|" + fields[limits - 1].name + " + " + format_real(-a) + "|";
    }
    for (NodeId p = 0; p < m.size(); ++p) {
      if (vee[p] > 4.0 * h || m.is_cut(p)) vee.reliable[p] = 0;
    }
    const auto r = eikonal_residual(m, vee, gt, gt);
    out.add("control residual", !r.pass() && r.convex > 0, static_cast<double>(r.convex), 1.0,
            vee.label + " " + residual_detail(r));
    const auto sc = semiconcavity_probe(vee, probe_segments(m, vee, 200, opts.seed));
    out.at_least("control semiconcavity", sc.worst_c, 1.0 / (2.0 * h),
                 vee.label + " segments=" + std::to_string(sc.segments));
  }

  // C1 control: a linear field has no singular node.
  if (s.expected_c1_solution_exists) {
    std::vector<double> v(m.size());
    for (NodeId p = 0; p < m.size(); ++p) v[p] = -(m.point(p).u - m.point(s.base).u);
    const auto lin = ScalarField::from_values(std::move(v), "linear -x");
    const auto sing = singular_set(m, lin, gt);
    out.at_most("c1_control", static_cast<double>(sing.nodes.size()), 0.0, "linear -x");
  }

  // Reconstruction control on the plane: the tilted kink cos(a)|u| - sin(a) v
  // has unit slope on both sides; its deviation is at least (1 - sin a) R.
  if (s.name == "plane") {
    const double a = 20.0 * std::numbers::pi / 180.0;
    const auto o = m.point(s.base);
    std::vector<double> v(m.size());
    for (NodeId p = 0; p < m.size(); ++p) {
      const auto x = m.point(p);
      v[p] = std::cos(a) * std::abs(x.u - o.u) - std::sin(a) * (x.v - o.v);
    }
    const auto vee = ScalarField::from_values(std::move(v), "control tilted +|x|");
    const auto schedule = doubling_schedule(m, s.window / 2);
    double lowest = 1e300;
    std::string devs;
    for (double n : schedule) {
      const auto r = levelset_reconstruct(m, vee, s.base, n, -schedule.front());
      lowest = std::min(lowest, r.deviation / s.window);
      devs += (devs.empty() ? "" : ",") + format_real(n) + ":" + format_real(r.deviation);
    }
    out.at_least("control reconstruction", lowest, 0.5, "normalized by window; n:dev=" + devs);
  }
  return out.take();
}

Report verify_theorem3(const Scenario& s, const VerifyOptions& opts) {
  if (s.name != "capped_half_cylinder") {
    throw Error(ErrorKind::invalid_input, "theorem3 needs the capped_half_cylinder scenario");
  }
  const auto& m = s.manifold;
  const auto& tol = opts.tol;
  const double gt = grad_tol(s, tol);
  Checks out("theorem3", s);
  std::vector<Named> sample;
  for (const auto& r : s.rays) sample.push_back({"busemann " + r.name, busemann_of(s, r, tol).field});
  for (const auto& q : s.set_sequences) sample.push_back({"dl " + q.name, dl_of(s, q, tol).field});
  const auto pts = points_of(s, sample);
  const auto ex = exhaustion_for(s, pts);
  const auto c = cluster_boundary(pts, ex, eps_of(s, tol));
  out.add("singleton_boundary", c.count == 1, c.count, 1.0,
          "depth=" + std::to_string(ex.depth()) + " " + cluster_detail(c, pts));

  const auto& margin = boundary_margin(m);
  const double half = m.window_radius() / 2.0;
  for (const auto& [name, f] : sample) {
    NodeId top = s.base;
    for (NodeId p = 0; p < m.size(); ++p) {
      if (f.is_reliable(p) && f[p] > f[top]) top = p;
    }
    out.add("argmax_in_cap " + name, s.core[top] && margin[top] >= half, margin[top], half,
            "node=" + std::to_string(top) + " value=" + format_real(f[top]) + " in_cap=" + (s.core[top] ? "true" : "false"));
    const auto sing = singular_set(m, f, gt);
    std::size_t in_cap = 0;
    double nearest = std::numeric_limits<double>::infinity();
    const auto d = detail::dijkstra(m, NodeSet{top});
    for (NodeId p : sing.nodes) {
      if (!s.core[p]) continue;
      ++in_cap;
      nearest = std::min(nearest, d[p]);
    }
    out.add("singular_near_max " + name, in_cap > 0, static_cast<double>(in_cap), 1.0,
            "singular=" + std::to_string(sing.nodes.size()) +
                (in_cap > 0 ? " distance_to_max=" + format_real(nearest) : std::string()));
  }
  return out.take();
}

Report verify_theorem4(const Scenario& s, const VerifyOptions& opts) {
  if (s.name != "pants") throw Error(ErrorKind::invalid_input, "theorem4 needs the pants scenario");
  const auto& m = s.manifold;
  const auto& tol = opts.tol;
  const double gt = grad_tol(s, tol);
  Checks out("theorem4", s);
  const auto e = end_partition(m, s.base, s.end_radii);
  const auto starts = coray_starts(s, 8, opts.seed);
  std::vector<Named> ends;
  for (const auto& r : s.rays) {
    const auto ray = trace(s, r);
    const auto c = verify_coray_cofinality(m, ray, starts, e);
    std::ostringstream d;
    d << "checked=" << c.checked << " too_short=" << c.too_short << " unstabilized=" << c.unstabilized;
    out.add("coray_cofinality " + r.name, c.pass() && c.checked >= 8,
            static_cast<double>(c.violations.size() + c.too_short), 0.0, d.str());
    ends.push_back({"busemann " + r.name, busemann(m, ray, s.base, limit_options(s, tol)).field});
  }

  // Min-closure family: end fields, pairwise mins over a shift grid, triple min.
  std::vector<Named> family = ends;
  for (std::size_t i = 0; i < ends.size(); ++i) {
    for (std::size_t j = i + 1; j < ends.size(); ++j) {
      for (double c : {-8.0, -4.0, 0.0, 4.0, 8.0}) {
        family.push_back({min_name(ends[i].name, ends[j].name, c),
                          min_combine(ends[i].field, shifted(ends[j].field, c))});
      }
    }
  }
  family.push_back({"min(" + ends[0].name + ", " + ends[1].name + ", " + ends[2].name + ")",
                    min_combine(min_combine(ends[0].field, ends[1].field), ends[2].field)});
  // Near the cone points the fast-march slopes are off by a few percent, so
  // there only gaps of at least kConeGap count; elsewhere the usual threshold.
  constexpr double kConeGap = 0.5;
  for (const auto& [name, f] : family) {
    const auto sing = singular_set(m, f, gt);
    std::size_t certified = 0, cone = 0;
    for (std::size_t i = 0; i < sing.nodes.size(); ++i) {
      const NodeId p = sing.nodes[i];
      if (!s.core[p]) continue;
      if (!s.excluded[p]) {
        ++certified;
      } else if (sing.gap[i] >= kConeGap) {
        ++cone;
      }
    }
    out.add("singular_in_core " + name, certified + cone > 0, static_cast<double>(certified + cone), 1.0,
            "away_from_cones=" + std::to_string(certified) + " near_cones=" + std::to_string(cone));
  }

  const auto pts = points_of(s, ends);
  const auto ex = exhaustion_for(s, pts);
  const auto ineq = verify_ends_inequality(e, pts, ex, eps_of(s, tol));
  out.add("ends_inequality", ineq.pass() && ineq.ends == 3, ineq.ends, ineq.clusters,
          "clusters=" + std::to_string(ineq.clusters) + " " + cluster_detail(ineq.clustering, pts));
  return out.take();
}

Report verify_metric(const Scenario& s, const VerifyOptions& opts) {
  const auto& m = s.manifold;
  const auto& tol = opts.tol;
  const double gt = grad_tol(s, tol);
  Checks out("metric", s);
  const auto fields = battery(s, tol);
  std::vector<BoundaryPoint> pts = points_of(s, fields);

  std::mt19937_64 rng(opts.seed);
  double asym = 0.0, tri = 0.0, quo_excess = -1e300, quo_asym = 0.0, shift_dev = 0.0;
  std::size_t depth_min = 30;
  for (int k = 0; k < 20; ++k) {
    const std::size_t i = draw(rng, pts.size());
    const std::size_t j = (i + 1 + draw(rng, pts.size() - 1)) % pts.size();
    std::size_t l = draw(rng, pts.size() - 2);
    while (l == i || l == j) ++l;
    const double c = static_cast<double>(draw(rng, 1001)) / 100.0 - 5.0;
    const auto& u = pts[i].rep;
    const auto& v = pts[j].rep;
    const auto& w = pts[l].rep;
    const auto ex = exhaustion_within(m, s.base, common_region({&u, &v, &w}));
    depth_min = std::min(depth_min, ex.depth());
    const double uv = rho(u, v, ex).value, vu = rho(v, u, ex).value;
    const double uw = rho(u, w, ex).value, vw = rho(v, w, ex).value;
    asym = std::max(asym, std::abs(uv - vu));
    tri = std::max({tri, uw - uv - vw, uv - uw - vw, vw - uv - uw});
    const double q = rho_quotient(u, v, ex, tol.shift_tol).value;
    quo_excess = std::max(quo_excess, q - uv);
    quo_asym = std::max(quo_asym, std::abs(q - rho_quotient(v, u, ex, tol.shift_tol).value));
    shift_dev = std::max(shift_dev, std::abs(rho_quotient(shifted(u, c), v, ex, tol.shift_tol).value - q));
  }
  const std::string triples = "triples=20 min_depth=" + std::to_string(depth_min);
  out.at_most("rho_symmetry", asym, 1e-12, triples);
  out.at_most("rho_triangle", tri, 1e-12, triples);
  out.at_most("quotient_le_rho", quo_excess, 1e-12, triples);
  out.at_most("quotient_symmetry", quo_asym, 1e-12, triples);
  out.at_most("quotient_shift_invariance", shift_dev, tol.shift_tol, triples);

  // Connecting path between the fields of the first and last ray.
  const auto u = make_boundary_point(busemann_of(s, s.rays.front(), tol).field, s.base, s.rays.front().name).rep;
  const auto v = make_boundary_point(busemann_of(s, s.rays.back(), tol).field, s.base, s.rays.back().name).rep;
  const auto ex = exhaustion_within(m, s.base, common_region({&u, &v}));
  const auto th = path_thresholds(u, v, ex);
  // Unit spacing at least: the series sum_n min(2^-n, .) is not bounded by
  // |t - s| for |t - s| < 1.
  const double lo = std::floor(th.t_lo) - 2.0;
  const double hi = std::ceil(th.t_hi) + 2.0;
  const double step = std::max(1.0, std::ceil((hi - lo) / 32.0));
  std::vector<double> grid;
  for (double t = lo; t < hi + step; t += step) grid.push_back(t);
  const auto path = connect_path(u, v, grid);
  double lip = -1e300, end_u = 0.0, end_v = 0.0, rise = 0.0, worst_dev = 0.0;
  std::size_t failing = 0;
  double prev = 0.0;
  for (std::size_t a = 0; a < path.size(); ++a) {
    for (std::size_t b = a + 1; b < path.size(); ++b) {
      lip = std::max(lip, rho_quotient(path[a], path[b], ex, tol.shift_tol).value - std::abs(grid[a] - grid[b]));
    }
    const double to_v = rho_quotient(path[a], v, ex, tol.shift_tol).value;
    if (a > 0) rise = std::max(rise, to_v - prev);
    prev = to_v;
    if (grid[a] >= th.t_hi) end_v = std::max(end_v, to_v);
    if (grid[a] <= th.t_lo) end_u = std::max(end_u, rho_quotient(path[a], u, ex, tol.shift_tol).value);
    const auto r = eikonal_residual(m, masked(s, path[a]), gt, gt);
    worst_dev = std::max(worst_dev, r.max_abs_dev);
    failing += !r.pass() || r.evaluated == 0;
  }
  std::ostringstream d;
  d << "pair=" << s.rays.front().name << "," << s.rays.back().name << " t_lo=" << format_real(th.t_lo)
    << " t_hi=" << format_real(th.t_hi) << " samples=" << grid.size() << " step=" << format_real(step)
    << " depth=" << ex.depth();
  out.at_most("path_lipschitz", lip, 1e-9, d.str());
  out.at_most("path_endpoint_u", end_u, tol.path_tol, d.str());
  out.at_most("path_endpoint_v", end_v, tol.path_tol, d.str());
  out.at_most("path_approach_v", rise, 1e-12, "largest increase of rho_quotient(f_t, v) along the grid");
  out.add("path_residual", failing == 0, worst_dev, gt, "failing=" + std::to_string(failing));
  return out.take();
}

}  // namespace dlab
