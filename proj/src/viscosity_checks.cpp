#include "dlab/viscosity_checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "shortest_paths.hpp"

namespace dlab {

namespace {

double bound_of(const DiscreteManifold& m) { return stencil_bound(m.stencil_radius() > 0 ? m.stencil_radius() : 4); }

}  // namespace

double default_grad_tol(const DiscreteManifold& m) { return 3.0 * bound_of(m); }

double default_semiconcavity_tol(const DiscreteManifold& m) { return 10.0 * bound_of(m); }

double reconstruction_tol(const DiscreteManifold& m) {
  return bound_of(m) * m.window_radius() + 2.0 * m.spacing();
}

ResidualReport eikonal_residual(const DiscreteManifold& m, const ScalarField& f, double grad_tol,
                                double residual_tol) {
  if (grad_tol <= 0.0) grad_tol = default_grad_tol(m);
  if (residual_tol <= 0.0) residual_tol = default_grad_tol(m);
  ResidualReport r;
  r.tolerance = residual_tol;
  std::vector<NodeId> convex;
  const auto interior = reliable_interior(m, f);
  for (NodeId p = 0; p < m.size(); ++p) {
    if (!interior[p]) continue;
    ++r.evaluated;
    const LocalSlope s = local_slope(m, f, p);
    if (s.ascent < s.descent - grad_tol) {
      ++r.singular;
    } else if (s.ascent > s.descent + grad_tol) {
      ++r.convex;
      convex.push_back(p);
    } else {
      ++r.regular;
      const double dev = std::abs(s.descent - 1.0);
      r.max_abs_dev = std::max(r.max_abs_dev, dev);
      if (dev > residual_tol) r.offending_nodes.push_back(p);
    }
  }
  r.offending_nodes.insert(r.offending_nodes.end(), convex.begin(), convex.end());
  r.frac_regular = r.evaluated ? static_cast<double>(r.regular) / static_cast<double>(r.evaluated) : 0.0;
  return r;
}

SingularSet singular_set(const DiscreteManifold& m, const ScalarField& f, double grad_tol) {
  if (grad_tol <= 0.0) grad_tol = default_grad_tol(m);
  SingularSet s;
  const auto interior = reliable_interior(m, f);
  for (NodeId p = 0; p < m.size(); ++p) {
    if (!interior[p]) continue;
    const LocalSlope q = local_slope(m, f, p);
    if (q.ascent < q.descent - grad_tol) {
      s.nodes.push_back(p);
      s.witness.emplace_back(q.descent_to, q.ascent_to);
      s.gap.push_back(q.descent - q.ascent);
    }
  }
  return s;
}

std::vector<Path> probe_segments(const DiscreteManifold& m, const ScalarField& f, std::size_t count,
                                 std::uint64_t seed, double min_len, double max_len) {
  if (min_len <= 0.0) min_len = 1.5 * m.spacing();
  if (max_len <= 0.0) max_len = 4.0 * m.spacing();
  NodeSet pool;
  for (NodeId p = 0; p < m.size(); ++p) {
    if (f.is_reliable(p)) pool.push_back(p);
  }
  std::vector<Path> out;
  if (pool.empty()) return out;
  std::mt19937_64 rng(seed);
  detail::BoundedSearch search(m.size());
  NodeSet targets;
  // Bounded number of attempts so sparse regions cannot loop forever.
  for (std::size_t attempt = 0; out.size() < count && attempt < 20 * count; ++attempt) {
    const NodeId a = pool[rng() % pool.size()];
    search.run(m, a, max_len);
    targets.clear();
    for (NodeId q : search.settled()) {
      if (search.distance(q) > min_len && f.is_reliable(q)) targets.push_back(q);
    }
    if (targets.empty()) continue;
    const NodeId b = targets[rng() % targets.size()];
    auto nodes = detail::backtrack_with(m, [&](NodeId p) { return search.distance(p); }, b);
    std::reverse(nodes.begin(), nodes.end());
    if (!std::all_of(nodes.begin(), nodes.end(), [&](NodeId p) { return f.is_reliable(p); })) continue;
    out.push_back(Path::from_nodes(m, std::move(nodes)));
  }
  return out;
}

SemiconcavityReport semiconcavity_probe(const ScalarField& f, const std::vector<Path>& segments) {
  SemiconcavityReport r;
  r.segments = segments.size();
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const Path& s = segments[k];
    if (s.size() < 3) continue;
    const double d = s.length();
    std::size_t mid = 1;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      if (std::abs(s.cumlen[i] - 0.5 * d) < std::abs(s.cumlen[mid] - 0.5 * d)) mid = i;
    }
    const double l = s.cumlen[mid] / d;
    const double chord = (1.0 - l) * f[s.front()] + l * f[s.back()];
    const double c = std::max(0.0, (chord - f[s.nodes[mid]]) / (l * (1.0 - l) * d * d));
    if (c > r.worst_c) {
      r.worst_c = c;
      r.worst = k;
    }
  }
  return r;
}

ScalarField min_combine(const ScalarField& a, const ScalarField& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::invalid_input, "fields live on different node sets");
  ScalarField out;
  out.values.resize(a.size());
  out.reliable.resize(a.size());
  bool any = false;
  for (std::size_t p = 0; p < a.size(); ++p) {
    out.values[p] = std::min(a.values[p], b.values[p]);
    out.reliable[p] = a.reliable[p] && b.reliable[p];
    any = any || out.reliable[p];
  }
  if (!any) throw Error(ErrorKind::empty_set, "min_combine: reliable regions are disjoint");
  out.source = FieldSource::min_combination;
  out.label = "min(" + a.label + ", " + b.label + ")";
  return out;
}

std::vector<double> truncation_clearance(const DiscreteManifold& m, const ScalarField& f) {
  NodeSet outside;
  for (NodeId p = 0; p < m.size(); ++p) {
    if (!f.is_reliable(p)) outside.push_back(p);
  }
  if (outside.empty()) return std::vector<double>(m.size(), std::numeric_limits<double>::infinity());
  return detail::dijkstra(m, outside);
}

namespace {

bool clear_enough(const DiscreteManifold& m, double clearance, double f, double n) {
  return clearance > (1.0 + bound_of(m)) * (f + n) + 2.0 * m.spacing();
}

}  // namespace

std::size_t reconstruction_region_size(const DiscreteManifold& m, const ScalarField& f, double floor,
                                       double clear_at, const std::vector<double>& clearance) {
  std::size_t n = 0;
  for (NodeId p = 0; p < m.size(); ++p) {
    n += f.is_reliable(p) && f[p] >= floor && clear_enough(m, clearance[p], f[p], clear_at);
  }
  return n;
}

Reconstruction levelset_reconstruct(const DiscreteManifold& m, const ScalarField& f, NodeId x0, double n,
                                    std::optional<double> floor, std::optional<double> clear_at) {
  const double lo = floor.value_or(-n);
  if (lo < -n) throw Error(ErrorKind::invalid_input, "comparison floor must be >= -n");
  if (clear_at && *clear_at < n) throw Error(ErrorKind::invalid_input, "clear_at must be >= n");
  if (!(f[x0] > -n)) throw Error(ErrorKind::invalid_input, "f(x0) must exceed -n");
  NodeSet k;
  for (NodeId p = 0; p < m.size(); ++p) {
    if (f.is_reliable(p) && f[p] <= -n) k.push_back(p);
  }
  if (k.empty()) throw Error(ErrorKind::empty_set, "sublevel set is empty; increase window or decrease n");
  const auto d = distance_to_set(m, k);
  Reconstruction r;
  r.floor = lo;
  r.sources = k.size();
  r.field = normalized(d, x0);
  r.field.source = FieldSource::dl;
  r.field.label = "reconstruction";
  for (NodeId p = 0; p < m.size(); ++p) r.field.reliable[p] = d.reliable[p] && f.reliable[p];
  const double f0 = f[x0];
  std::vector<double> clearance;
  if (clear_at) clearance = truncation_clearance(m, f);
  for (NodeId p = 0; p < m.size(); ++p) {
    if (!f.is_reliable(p) || f[p] < lo) continue;
    if (clear_at && !clear_enough(m, clearance[p], f[p], *clear_at)) continue;
    ++r.evaluated;
    r.deviation = std::max(r.deviation, std::abs(r.field[p] - (f[p] - f0)));
  }
  return r;
}

LevelsetCheck levelset_distance_check(const DiscreteManifold& m, const ScalarField& f, double a1, double a2,
                                      bool clear_of_truncation) {
  if (!(a1 > a2)) throw Error(ErrorKind::invalid_input, "levelset_distance_check needs a1 > a2");
  const double h = m.spacing();
  std::vector<double> clearance;
  if (clear_of_truncation) clearance = truncation_clearance(m, f);
  const double needed = (1.0 + bound_of(m)) * (a1 - a2) + 2.0 * h;
  NodeSet k, band;
  for (NodeId p = 0; p < m.size(); ++p) {
    if (!f.is_reliable(p)) continue;
    if (f[p] <= a2) k.push_back(p);
    if (std::abs(f[p] - a1) <= h && (!clear_of_truncation || clearance[p] > needed)) band.push_back(p);
  }
  if (k.empty() || band.empty()) throw Error(ErrorKind::empty_set, "level band or sublevel set is empty");
  const auto d = distance_to_set(m, k);
  LevelsetCheck r;
  r.band = band.size();
  for (NodeId p : band) r.deviation = std::max(r.deviation, std::abs(d[p] - (a1 - a2)));
  return r;
}

}  // namespace dlab
