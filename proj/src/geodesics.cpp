#include "dlab/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "dlab/eikonal.hpp"
#include "shortest_paths.hpp"

namespace dlab {

std::size_t Path::index_at(double t) const {
  const auto it = std::lower_bound(cumlen.begin(), cumlen.end(), t);
  return it == cumlen.end() ? cumlen.size() - 1 : static_cast<std::size_t>(it - cumlen.begin());
}

Path Path::prefix(std::size_t count) const {
  Path p;
  p.nodes.assign(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(count));
  p.cumlen.assign(cumlen.begin(), cumlen.begin() + static_cast<std::ptrdiff_t>(count));
  return p;
}

Path Path::tail(std::size_t first) const {
  Path p;
  p.nodes.assign(nodes.begin() + static_cast<std::ptrdiff_t>(first), nodes.end());
  for (std::size_t k = first; k < cumlen.size(); ++k) p.cumlen.push_back(cumlen[k] - cumlen[first]);
  return p;
}

Path Path::from_nodes(const DiscreteManifold& m, std::vector<NodeId> nodes) {
  Path p;
  p.nodes = std::move(nodes);
  p.cumlen.reserve(p.nodes.size());
  double s = 0.0;
  for (std::size_t k = 0; k < p.nodes.size(); ++k) {
    if (k > 0) {
      const auto len = m.edge_length(p.nodes[k - 1], p.nodes[k]);
      if (!len) throw Error(ErrorKind::invalid_input, "path vertices are not adjacent");
      s += *len;
    }
    p.cumlen.push_back(s);
  }
  return p;
}

double default_ray_tol(const DiscreteManifold& m, double span) {
  return 2.0 * stencil_bound(m.stencil_radius() > 0 ? m.stencil_radius() : 4) * span;
}

Path minimal_segment(const DiscreteManifold& m, NodeId x, NodeId y) {
  if (x >= m.size() || y >= m.size()) throw Error(ErrorKind::invalid_input, "node out of range");
  const NodeSet src{y};
  const auto d = detail::dijkstra(m, src, kInfinity, x);
  return Path::from_nodes(m, detail::backtrack(m, d, x));
}

double realization_deviation(const DiscreteManifold& m, const Path& p, std::size_t samples) {
  if (p.size() < 2) return 0.0;
  const std::size_t n = p.size();
  const std::size_t s = std::min(std::max<std::size_t>(samples, 2), n);
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < s; ++k) idx.push_back((k * (n - 1) + (s - 1) / 2) / (s - 1));
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());

  detail::BoundedSearch search(m.size());
  double worst = 0.0;
  for (std::size_t a = 0; a + 1 < idx.size(); ++a) {
    const double remaining = p.cumlen.back() - p.cumlen[idx[a]];
    search.run(m, p.nodes[idx[a]], remaining * (1.0 + 1e-12) + 1e-12);
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      const double d = search.distance(p.nodes[idx[b]]);
      worst = std::max(worst, std::abs(d - (p.cumlen[idx[b]] - p.cumlen[idx[a]])));
    }
  }
  return worst;
}

namespace {

std::size_t common_prefix(const Path& a, const Path& b) {
  const auto [ia, ib] = std::mismatch(a.nodes.begin(), a.nodes.end(), b.nodes.begin(), b.nodes.end());
  return static_cast<std::size_t>(ia - a.nodes.begin());
}

// Audit a stabilized prefix; halve it until the ray property holds.
Ray certify(const DiscreteManifold& m, const Path& prefix) {
  Ray r;
  std::size_t count = prefix.size();
  while (true) {
    r.path = prefix.prefix(count);
    r.ray_tol = default_ray_tol(m, r.path.length());
    r.max_deviation = realization_deviation(m, r.path);
    if (r.max_deviation <= r.ray_tol || count <= 2) break;
    count = (count + 1) / 2;
  }
  if (r.max_deviation > r.ray_tol) throw Error(ErrorKind::no_stabilization, "ray audit failed; increase window");
  r.certified_span = r.path.length();
  return r;
}

}  // namespace

Ray trace_ray(const DiscreteManifold& m, NodeId x, const std::vector<NodeId>& targets) {
  if (targets.size() < 2) throw Error(ErrorKind::invalid_input, "trace_ray needs at least two targets");
  const NodeSet src{x};
  const auto dx = detail::dijkstra(m, src);
  for (std::size_t k = 1; k < targets.size(); ++k) {
    if (!(dx[targets[k]] > dx[targets[k - 1]])) {
      throw Error(ErrorKind::not_escaping, "targets must move strictly away from the start node");
    }
  }
  const Path a = minimal_segment(m, x, targets[targets.size() - 2]);
  const Path b = minimal_segment(m, x, targets.back());
  const std::size_t shared = common_prefix(a, b);
  if (shared < 2) throw Error(ErrorKind::no_stabilization, "minimal segments did not stabilize; increase window");
  return certify(m, b.prefix(shared));
}

CorayResult coray(const DiscreteManifold& m, const Ray& gamma, NodeId x) {
  const double span = gamma.certified_span;
  const double reach = m.max_edge_length();
  std::vector<double> ts;
  for (double t = span; t >= reach; t /= 2.0) ts.push_back(t);
  std::reverse(ts.begin(), ts.end());
  if (ts.size() < 3) throw Error(ErrorKind::no_stabilization, "ray span too short for a coray; increase window");

  CorayResult out;
  out.iterates = ts.size();
  // Target index into gamma; when x lies on gamma restrict to targets past it.
  const auto on_ray = std::find(gamma.path.nodes.begin(), gamma.path.nodes.end(), x);
  const std::size_t start =
      on_ray == gamma.path.nodes.end() ? 0 : static_cast<std::size_t>(on_ray - gamma.path.nodes.begin());
  if (start == gamma.path.size() - 1) {
    throw Error(ErrorKind::no_stabilization, "start node is the end of the ray; increase window");
  }
  std::vector<Path> segs;
  for (double t : ts) {
    const std::size_t k = std::max(gamma.path.index_at(t), start + 1);
    if (!segs.empty() && segs.back().back() == gamma.path.nodes[k]) continue;
    segs.push_back(minimal_segment(m, x, gamma.path.nodes[k]));
  }
  if (segs.size() < 2) throw Error(ErrorKind::no_stabilization, "ray span too short for a coray; increase window");

  // Cluster iterates by first edge; keep clusters seen twice in the later half.
  std::map<NodeId, std::vector<std::size_t>> clusters;
  const std::size_t later = std::min(segs.size() / 2, segs.size() - 2);
  for (std::size_t k = later; k < segs.size(); ++k) clusters[segs[k].nodes[1]].push_back(k);
  std::vector<std::vector<std::size_t>> persistent;
  for (auto& [first, members] : clusters) {
    if (members.size() >= 2) persistent.push_back(members);
  }
  if (persistent.empty()) {
    // Lattice ties: fall back to the segment aimed farthest along gamma.
    out.stabilized = false;
    out.rays.push_back(certify(m, segs.back()));
    return out;
  }
  std::sort(persistent.begin(), persistent.end(),
            [](const auto& a, const auto& b) { return a.back() > b.back(); });
  for (const auto& members : persistent) {
    const Path& a = segs[members[members.size() - 2]];
    const Path& b = segs[members.back()];
    out.rays.push_back(certify(m, b.prefix(common_prefix(a, b))));
  }
  out.multiple = out.rays.size() > 1;
  return out;
}

bool is_line(const DiscreteManifold& m, const Path& p) {
  return realization_deviation(m, p) <= default_ray_tol(m, p.length());
}

void write_path_csv(std::ostream& os, const DiscreteManifold& m, const Path& p) {
  os << "node_id,u,v,cumlen\n";
  for (std::size_t k = 0; k < p.size(); ++k) {
    const NodePoint& pt = m.point(p.nodes[k]);
    os << p.nodes[k] << ',' << format_real(pt.u) << ',' << format_real(pt.v) << ',' << format_real(p.cumlen[k])
       << '\n';
  }
}

}  // namespace dlab
