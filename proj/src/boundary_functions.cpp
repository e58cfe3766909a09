#include "dlab/boundary_functions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "shortest_paths.hpp"

namespace dlab {

namespace {

double finite_radius(const DiscreteManifold& m) {
  if (std::isfinite(m.window_radius())) return m.window_radius();
  const NodeSet src{m.center()};
  double r = 0.0;
  for (double d : detail::dijkstra(m, src)) r = std::max(r, d);
  return r;
}

// Connected component of x0 within `mask`.
std::vector<char> component_of(const DiscreteManifold& m, const std::vector<char>& mask, NodeId x0) {
  std::vector<char> out(m.size(), 0);
  if (!mask[x0]) return out;
  std::vector<NodeId> stack{x0};
  out[x0] = 1;
  while (!stack.empty()) {
    const NodeId p = stack.back();
    stack.pop_back();
    for (const Edge& e : m.neighbors(p)) {
      if (mask[e.to] && !out[e.to]) {
        out[e.to] = 1;
        stack.push_back(e.to);
      }
    }
  }
  return out;
}

// Graph distance from x0 to the nearest node outside the region.
double ball_radius(const DiscreteManifold& m, const std::vector<char>& region, NodeId x0) {
  if (!region[x0]) return 0.0;
  const NodeSet src{x0};
  const auto d = detail::dijkstra(m, src);
  double inside = 0.0, outside = kInfinity;
  for (NodeId p = 0; p < m.size(); ++p) {
    if (region[p]) {
      inside = std::max(inside, d[p]);
    } else {
      outside = std::min(outside, d[p]);
    }
  }
  return std::isfinite(outside) ? outside : inside;
}

struct Iterates {
  std::vector<NodeSet> sets;
  // Offsets subtracted for the monotonicity audit (busemann: t_k); empty skips it.
  std::vector<double> offsets;
};

Limit limit_of(const DiscreteManifold& m, const Iterates& it, NodeId x0, FieldSource source,
               const LimitOptions& opts) {
  if (x0 >= m.size()) throw Error(ErrorKind::invalid_input, "base node out of range");
  if (it.sets.size() < 2) throw Error(ErrorKind::invalid_input, "a limit needs at least two iterates");
  const Backend backend = opts.backend.value_or(default_limit_backend(m));
  const double tol = opts.limit_tol > 0.0 ? opts.limit_tol : default_limit_tol(m);
  const double min_radius = opts.min_radius > 0.0 ? opts.min_radius : m.max_edge_length();

  const std::size_t n = m.size();
  std::vector<char> joint(n, 1);
  std::vector<double> prev, cur, prev_raw;
  double last_offset = 0.0;
  double base_prev = -kInfinity;
  double excess = 0.0;
  std::vector<double> change(n, 0.0);
  for (std::size_t k = 0; k < it.sets.size(); ++k) {
    const auto d = distance_with(backend, m, it.sets[k]);
    const double base = d[x0];
    if (!(base > base_prev)) {
      throw Error(ErrorKind::not_escaping, "d(x0, K_n) must increase strictly along the sequence");
    }
    base_prev = base;
    cur.resize(n);
    for (NodeId p = 0; p < n; ++p) {
      cur[p] = d[p] - base;
      joint[p] = joint[p] && d.is_reliable(p);
    }
    if (!it.offsets.empty() && k > 0) {
      const double off = it.offsets[k];
      for (NodeId p = 0; p < n; ++p) {
        if (joint[p]) excess = std::max(excess, (d[p] - off) - (prev_raw[p] - last_offset));
      }
    }
    if (!it.offsets.empty()) {
      prev_raw = d.values;
      last_offset = it.offsets[k];
    }
    if (k + 1 == it.sets.size()) {
      for (NodeId p = 0; p < n; ++p) change[p] = std::abs(cur[p] - prev[p]);
    }
    prev.swap(cur);
  }
  // prev now holds the final normalized iterate.
  std::vector<char> stable(n, 0);
  for (NodeId p = 0; p < n; ++p) stable[p] = joint[p] && change[p] <= tol;
  const auto region = component_of(m, stable, x0);

  Limit out;
  out.field.values = std::move(prev);
  out.field.values[x0] = 0.0;
  out.field.reliable = region;
  out.field.base_node = x0;
  out.field.source = source;
  out.field.label = to_string(source);

  LimitReport& r = out.report;
  r.iterates_used = it.sets.size();
  r.limit_tol = tol;
  r.backend = backend;
  for (NodeId p = 0; p < n; ++p) {
    if (region[p]) r.sup_change_last = std::max(r.sup_change_last, change[p]);
  }
  r.reliable_radius = ball_radius(m, region, x0);
  r.converged = r.reliable_radius >= min_radius && r.sup_change_last <= tol;
  r.monotonicity_excess = excess;
  return out;
}

}  // namespace

double default_limit_tol(const DiscreteManifold& m) { return 1e-3 * finite_radius(m); }

Backend default_limit_backend(const DiscreteManifold& m) {
  if (!m.has_grid()) return Backend::graph;
  for (const GridChart& g : m.charts()) {
    for (int j = 0; j < g.nv; ++j) {
      for (int i = 0; i < g.nu; ++i) {
        if (g.metric_at(i, j).g12 != 0.0) return Backend::graph;
      }
    }
  }
  return Backend::fast_march;
}

Limit dl_function(const DiscreteManifold& m, const std::vector<NodeSet>& sets, NodeId x0, const LimitOptions& opts) {
  return limit_of(m, Iterates{sets, {}}, x0, FieldSource::dl, opts);
}

Limit horofunction(const DiscreteManifold& m, const std::vector<NodeId>& points, NodeId x0,
                   const LimitOptions& opts) {
  Iterates it;
  for (NodeId p : points) it.sets.push_back({p});
  return limit_of(m, it, x0, FieldSource::horofunction, opts);
}

std::vector<double> busemann_schedule(const DiscreteManifold& m, const Ray& gamma) {
  constexpr int kMaxIterates = 8;
  std::vector<double> ts;
  for (double t = gamma.certified_span; t >= m.max_edge_length() && ts.size() < kMaxIterates; t /= 2.0) {
    ts.push_back(t);
  }
  std::reverse(ts.begin(), ts.end());
  return ts;
}

Limit busemann(const DiscreteManifold& m, const Ray& gamma, NodeId x0, const LimitOptions& opts) {
  Iterates it;
  for (double t : busemann_schedule(m, gamma)) {
    const std::size_t k = gamma.path.index_at(t);
    if (!it.sets.empty() && it.sets.back().front() == gamma.path.nodes[k]) continue;
    it.sets.push_back({gamma.path.nodes[k]});
    it.offsets.push_back(gamma.path.cumlen[k]);
  }
  if (it.sets.size() < 2) throw Error(ErrorKind::no_stabilization, "ray span too short for a limit; increase window");
  return limit_of(m, it, x0, FieldSource::busemann, opts);
}

std::string to_text(const LimitReport& r) {
  std::ostringstream os;
  os << "iterates_used = " << r.iterates_used << '\n'
     << "sup_change_last = " << format_real(r.sup_change_last) << '\n'
     << "reliable_radius = " << format_real(r.reliable_radius) << '\n'
     << "converged = " << (r.converged ? "true" : "false") << '\n'
     << "limit_tol = " << format_real(r.limit_tol) << '\n'
     << "monotonicity_excess = " << format_real(r.monotonicity_excess) << '\n'
     << "backend = " << to_string(r.backend) << '\n';
  return os.str();
}

}  // namespace dlab
