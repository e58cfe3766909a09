#include "dlab/ideal_boundary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dlab/viscosity_checks.hpp"
#include "shortest_paths.hpp"

namespace dlab {

CompactExhaustion make_exhaustion(const DiscreteManifold& m, NodeId x0, const std::vector<double>& radii) {
  if (radii.empty()) throw Error(ErrorKind::invalid_input, "exhaustion needs at least one radius");
  for (std::size_t k = 1; k < radii.size(); ++k) {
    if (!(radii[k] > radii[k - 1])) throw Error(ErrorKind::invalid_input, "exhaustion radii must increase");
  }
  CompactExhaustion e;
  e.base = x0;
  e.radii = radii;
  const NodeSet src{x0};
  e.distance = detail::dijkstra(m, src);
  e.ring.assign(m.size(), -1);
  e.sets.resize(radii.size());
  for (NodeId p = 0; p < m.size(); ++p) {
    const auto it = std::lower_bound(radii.begin(), radii.end(), e.distance[p] - 1e-12 * (1.0 + e.distance[p]));
    if (it == radii.end()) continue;
    e.ring[p] = static_cast<int>(it - radii.begin());
  }
  for (NodeId p = 0; p < m.size(); ++p) {
    for (int k = std::max(e.ring[p], 0); e.ring[p] >= 0 && k < static_cast<int>(radii.size()); ++k) {
      e.sets[static_cast<std::size_t>(k)].push_back(p);
    }
  }
  return e;
}

CompactExhaustion exhaustion_within(const DiscreteManifold& m, NodeId x0, const std::vector<char>& region,
                                    std::size_t max_depth) {
  const NodeSet src{x0};
  const auto d = detail::dijkstra(m, src);
  double outside = kInfinity, inside = 0.0;
  for (NodeId p = 0; p < m.size(); ++p) {
    if (region[p]) {
      inside = std::max(inside, d[p]);
    } else {
      outside = std::min(outside, d[p]);
    }
  }
  // Largest integer radius whose closed ball avoids every outside node.
  const double limit = std::isfinite(outside) ? outside : inside + 1.0;
  std::size_t n = 0;
  while (n < max_depth && static_cast<double>(n + 1) < limit) ++n;
  if (n == 0) throw Error(ErrorKind::empty_set, "reliable region holds no ball of radius 1 about the base");
  std::vector<double> radii(n);
  std::iota(radii.begin(), radii.end(), 1.0);
  return make_exhaustion(m, x0, radii);
}

BoundaryPoint make_boundary_point(const ScalarField& f, NodeId x0, std::string provenance) {
  return {normalized(f, x0), std::move(provenance)};
}

std::vector<char> common_region(const std::vector<const ScalarField*>& fields) {
  std::vector<char> out(fields.front()->size(), 1);
  for (const ScalarField* f : fields) {
    for (std::size_t p = 0; p < out.size(); ++p) out[p] = out[p] && f->reliable[p];
  }
  return out;
}

namespace {

// Per-ball extremes of w = u - v, accumulated outward.
struct BallExtremes {
  std::vector<double> hi, lo;
};

BallExtremes extremes(const ScalarField& u, const ScalarField& v, const CompactExhaustion& e) {
  const std::size_t n = e.depth();
  BallExtremes b{std::vector<double>(n, -kInfinity), std::vector<double>(n, kInfinity)};
  for (NodeId p = 0; p < u.size(); ++p) {
    const int k = e.ring[p];
    if (k < 0) continue;
    if (!u.is_reliable(p) || !v.is_reliable(p)) {
      throw Error(ErrorKind::invalid_input, "exhaustion exceeds the reliable region");
    }
    const double w = u[p] - v[p];
    b.hi[static_cast<std::size_t>(k)] = std::max(b.hi[static_cast<std::size_t>(k)], w);
    b.lo[static_cast<std::size_t>(k)] = std::min(b.lo[static_cast<std::size_t>(k)], w);
  }
  for (std::size_t k = 1; k < n; ++k) {
    b.hi[k] = std::max(b.hi[k], b.hi[k - 1]);
    b.lo[k] = std::min(b.lo[k], b.lo[k - 1]);
  }
  return b;
}

double series(const BallExtremes& b, double t) {
  double s = 0.0, cap = 1.0;
  for (std::size_t k = 0; k < b.hi.size(); ++k) {
    cap *= 0.5;
    const double sup = std::max(b.hi[k] + t, -(b.lo[k] + t));
    s += std::min(cap, sup);
  }
  return s;
}

}  // namespace

RhoValue rho(const ScalarField& u, const ScalarField& v, const CompactExhaustion& e) {
  const auto b = extremes(u, v, e);
  return {series(b, 0.0), std::ldexp(1.0, -static_cast<int>(e.depth())), e.depth()};
}

QuotientValue rho_quotient(const ScalarField& u, const ScalarField& v, const CompactExhaustion& e,
                           double shift_tol) {
  const auto b = extremes(u, v, e);
  QuotientValue q;
  q.tail = std::ldexp(1.0, -static_cast<int>(e.depth()));
  q.value = series(b, 0.0);
  auto consider = [&](double t) {
    const double g = series(b, t);
    if (g < q.value) {
      q.value = g;
      q.shift = t;
    }
  };
  const double big = std::max(std::abs(b.hi.back()), std::abs(b.lo.back()));
  if (big == 0.0) return q;

  constexpr int kGrid = 64;
  double best_t = 0.0, best_g = q.value;
  const double step = 2.0 * big / (kGrid - 1);
  for (int k = 0; k < kGrid; ++k) {
    const double t = -big + step * k;
    const double g = series(b, t);
    if (g < best_g) {
      best_g = g;
      best_t = t;
    }
  }
  consider(best_t);

  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = best_t - step, hi = best_t + step;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double g1 = series(b, x1), g2 = series(b, x2);
  while (hi - lo > shift_tol) {
    if (g1 <= g2) {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - phi * (hi - lo);
      g1 = series(b, x1);
    } else {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + phi * (hi - lo);
      g2 = series(b, x2);
    }
  }
  consider(0.5 * (lo + hi));

  // The objective is piecewise linear; its minimum sits at a breakpoint.
  double cap = 1.0;
  for (std::size_t k = 0; k < e.depth(); ++k) {
    cap *= 0.5;
    consider(-0.5 * (b.hi[k] + b.lo[k]));
    consider(cap - b.hi[k]);
    consider(-cap - b.lo[k]);
  }
  return q;
}

ScalarField shifted(const ScalarField& f, double c) {
  ScalarField g = f;
  for (double& x : g.values) x += c;
  g.base_node.reset();
  return g;
}

PathThresholds path_thresholds(const ScalarField& u, const ScalarField& v, const CompactExhaustion& e) {
  const auto b = extremes(u, v, e);
  // v - u = -w.
  return {-b.hi.back(), -b.lo.back()};
}

std::vector<ScalarField> connect_path(const ScalarField& u, const ScalarField& v, const std::vector<double>& t_grid) {
  std::vector<ScalarField> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    ScalarField f = min_combine(shifted(u, t), v);
    f.label = "min(u + " + format_real(t) + ", v)";
    out.push_back(std::move(f));
  }
  return out;
}

Clustering cluster_boundary(const std::vector<BoundaryPoint>& points, const CompactExhaustion& e, double eps) {
  const std::size_t n = points.size();
  Clustering c;
  c.distances.assign(n, std::vector<double>(n, 0.0));
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = rho_quotient(points[i].rep, points[j].rep, e).value;
      c.distances[i][j] = c.distances[j][i] = d;
      if (d <= eps) {
        const int a = find(static_cast<int>(i)), b = find(static_cast<int>(j));
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
      }
    }
  }
  // Labels in order of first appearance.
  std::vector<int> label_of(n, -1);
  c.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(find(static_cast<int>(i)));
    if (label_of[r] < 0) label_of[r] = c.count++;
    c.labels[i] = label_of[r];
  }
  return c;
}

bool bounded_by_distance(const BoundaryPoint& b, const CompactExhaustion& e, double slack) {
  for (NodeId p : e.largest()) {
    if (std::abs(b.rep[p]) > e.distance[p] + slack) return false;
  }
  return true;
}

}  // namespace dlab
