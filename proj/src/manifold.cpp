#include "dlab/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "shortest_paths.hpp"

namespace dlab {

namespace {

struct RawEdge {
  NodeId p, q;  // p < q
  double length;
};

bool connected(std::size_t n, const std::vector<std::size_t>& offsets, const std::vector<Edge>& targets) {
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const NodeId p = stack.back();
    stack.pop_back();
    for (std::size_t k = offsets[p]; k < offsets[p + 1]; ++k) {
      const NodeId q = targets[k].to;
      if (!seen[q]) {
        seen[q] = 1;
        ++count;
        stack.push_back(q);
      }
    }
  }
  return count == n;
}

std::string describe_side(Side s) {
  switch (s) {
    case Side::u0: return "u0";
    case Side::u1: return "u1";
    case Side::v0: return "v0";
    case Side::v1: return "v1";
  }
  return "?";
}

}  // namespace

// Assembles the CSR graph and derived data shared by every construction path.
class ManifoldBuilder {
 public:
  static DiscreteManifold finish(std::string name, std::vector<NodePoint> points, std::vector<RawEdge> edges,
                                 std::vector<char> cut, std::vector<GridChart> charts, double spacing,
                                 int stencil_radius, NodeId center) {
    DiscreteManifold m;
    const std::size_t n = points.size();
    std::vector<std::size_t> degree(n + 1, 0);
    for (const RawEdge& e : edges) {
      if (!(e.length > 0.0) || !std::isfinite(e.length)) {
        std::ostringstream os;
        os << "edge " << e.p << "-" << e.q << " has non-positive length";
        throw Error(ErrorKind::invalid_input, os.str());
      }
      ++degree[e.p + 1];
      ++degree[e.q + 1];
    }
    std::partial_sum(degree.begin(), degree.end(), degree.begin());
    m.offsets_ = degree;
    m.targets_.resize(2 * edges.size());
    std::vector<std::size_t> fill(degree.begin(), degree.end() - 1);
    for (const RawEdge& e : edges) {
      m.targets_[fill[e.p]++] = {e.q, e.length};
      m.targets_[fill[e.q]++] = {e.p, e.length};
      m.max_edge_ = std::max(m.max_edge_, e.length);
    }
    for (std::size_t p = 0; p < n; ++p) {
      std::sort(m.targets_.begin() + m.offsets_[p], m.targets_.begin() + m.offsets_[p + 1],
                [](const Edge& a, const Edge& b) { return a.to < b.to; });
    }
    if (!connected(n, m.offsets_, m.targets_)) {
      throw Error(ErrorKind::disconnected, "manifold '" + name + "' is not connected");
    }
    m.name_ = std::move(name);
    m.points_ = std::move(points);
    m.cut_ = std::move(cut);
    m.charts_ = std::move(charts);
    m.spacing_ = spacing > 0.0 ? spacing : m.max_edge_;
    m.stencil_radius_ = stencil_radius;
    m.center_ = center;

    NodeSet cut_nodes;
    for (NodeId p = 0; p < n; ++p) {
      if (m.cut_[p]) cut_nodes.push_back(p);
    }
    m.margin_ = cut_nodes.empty() ? std::vector<double>(n, kInfinity) : detail::dijkstra(m, cut_nodes);
    return m;
  }

  static const std::vector<NodePoint>& points(const DiscreteManifold& m) { return m.points_; }
  static const std::vector<char>& cut(const DiscreteManifold& m) { return m.cut_; }
  static const std::vector<GridChart>& charts(const DiscreteManifold& m) { return m.charts_; }

  static DiscreteManifold recenter(DiscreteManifold m, NodeId c) {
    if (c >= m.size()) throw Error(ErrorKind::invalid_input, "center node out of range");
    m.center_ = c;
    return m;
  }
  static DiscreteManifold rename(DiscreteManifold m, std::string name) {
    m.name_ = std::move(name);
    return m;
  }
};

std::optional<double> DiscreteManifold::edge_length(NodeId p, NodeId q) const {
  for (const Edge& e : neighbors(p)) {
    if (e.to == q) return e.length;
  }
  return std::nullopt;
}

bool DiscreteManifold::has_cut() const {
  return std::any_of(cut_.begin(), cut_.end(), [](char c) { return c != 0; });
}

NodeId DiscreteManifold::grid_node(int chart, int i, int j) const {
  const GridChart& c = charts_.at(static_cast<std::size_t>(chart));
  if (c.periodic_u) i = ((i % c.nu) + c.nu) % c.nu;
  if (c.periodic_v) j = ((j % c.nv) + c.nv) % c.nv;
  if (i < 0 || i >= c.nu || j < 0 || j >= c.nv) {
    throw Error(ErrorKind::invalid_input, "grid index outside chart '" + c.name + "'");
  }
  return c.id(i, j);
}

DiscreteManifold DiscreteManifold::with_center(NodeId c) const { return ManifoldBuilder::recenter(*this, c); }

DiscreteManifold DiscreteManifold::with_name(std::string name) const {
  return ManifoldBuilder::rename(*this, std::move(name));
}

DiscreteManifold DiscreteManifold::from_edges(std::size_t n,
                                              const std::vector<std::tuple<NodeId, NodeId, double>>& edges,
                                              const std::vector<NodeId>& cut_nodes) {
  std::vector<RawEdge> raw;
  raw.reserve(edges.size());
  for (const auto& [p, q, len] : edges) {
    if (p >= n || q >= n || p == q) throw Error(ErrorKind::invalid_input, "bad edge endpoint");
    raw.push_back({std::min(p, q), std::max(p, q), len});
  }
  std::vector<char> cut(n, 0);
  for (NodeId p : cut_nodes) cut.at(p) = 1;
  return ManifoldBuilder::finish("graph", std::vector<NodePoint>(n), std::move(raw), std::move(cut), {}, 0.0, 0, 0);
}

std::vector<std::pair<int, int>> stencil_offsets(int radius) {
  std::vector<std::pair<int, int>> out;
  for (int b = -radius; b <= radius; ++b) {
    for (int a = -radius; a <= radius; ++a) {
      if ((a == 0 && b == 0) || std::gcd(std::abs(a), std::abs(b)) != 1) continue;
      out.emplace_back(a, b);
    }
  }
  return out;
}

double stencil_bound(int radius) {
  if (radius < 1) throw Error(ErrorKind::invalid_input, "stencil radius must be >= 1");
  // First-octant directions; the polygonal unit ball is symmetric under the octahedral group.
  std::vector<std::pair<int, int>> dirs;
  for (int a = 1; a <= radius; ++a) {
    for (int b = 0; b <= a; ++b) {
      if (std::gcd(a, b) == 1) dirs.emplace_back(a, b);
    }
  }
  std::sort(dirs.begin(), dirs.end(), [](auto x, auto y) { return x.second * y.first < y.second * x.first; });
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < dirs.size(); ++k) {
    const auto [p1, p2] = dirs[k];
    const auto [q1, q2] = dirs[k + 1];
    // Dual vector w of the face: w.p = |p|, w.q = |q|.
    const double lp = std::hypot(p1, p2), lq = std::hypot(q1, q2);
    const double det = static_cast<double>(p1) * q2 - static_cast<double>(p2) * q1;
    const double w1 = (lp * q2 - lq * p2) / det;
    const double w2 = (p1 * lq - q1 * lp) / det;
    worst = std::max(worst, std::hypot(w1, w2) - 1.0);
  }
  return worst;
}

DiscreteManifold build_chart_manifold(const ChartSpec& spec) {
  if (spec.nu < 2 || spec.nv < 2) throw Error(ErrorKind::invalid_input, "chart needs nu >= 2 and nv >= 2");
  if (!(spec.u1 > spec.u0) || !(spec.v1 > spec.v0)) {
    throw Error(ErrorKind::invalid_input, "chart parameter rectangle is empty");
  }
  if (spec.stencil_radius < 1) throw Error(ErrorKind::invalid_input, "stencil radius must be >= 1");
  const bool pu = spec.identify == Identification::periodic_u;
  const bool pv = spec.identify == Identification::periodic_v;
  if (spec.collapse_v0 && pv) throw Error(ErrorKind::invalid_input, "cannot collapse a periodic v row");
  for (Side s : spec.cut) {
    if ((pu && (s == Side::u0 || s == Side::u1)) || (pv && (s == Side::v0 || s == Side::v1)) ||
        (spec.collapse_v0 && s == Side::v0)) {
      throw Error(ErrorKind::invalid_input, "side " + describe_side(s) + " is identified and cannot be cut");
    }
  }

  GridChart chart;
  chart.name = spec.name;
  chart.nu = spec.nu;
  chart.nv = spec.nv;
  chart.u0 = spec.u0;
  chart.v0 = spec.v0;
  chart.du = (spec.u1 - spec.u0) / (pu ? spec.nu : spec.nu - 1);
  chart.dv = (spec.v1 - spec.v0) / (pv ? spec.nv : spec.nv - 1);
  chart.periodic_u = pu;
  chart.periodic_v = pv;
  chart.collapse_v0 = spec.collapse_v0;

  const std::size_t cells = static_cast<std::size_t>(spec.nu) * spec.nv;
  chart.ids.resize(cells);
  chart.metric.resize(cells);
  std::vector<NodePoint> points;
  points.reserve(cells);
  double spacing = 0.0;
  for (int j = 0; j < spec.nv; ++j) {
    for (int i = 0; i < spec.nu; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * spec.nu + i;
      const double u = chart.u_at(i), v = chart.v_at(j);
      const MetricTensor g = spec.metric(u, v);
      const bool pole = spec.collapse_v0 && j == 0;
      if (pole ? !(g.g22 > 0.0) : !g.positive_definite()) {
        std::ostringstream os;
        os << "metric not positive definite at node (" << i << ", " << j << ") of chart '" << spec.name
           << "': g11=" << g.g11 << " g12=" << g.g12 << " g22=" << g.g22;
        throw Error(ErrorKind::not_spd, os.str());
      }
      chart.metric[k] = g;
      if (pole && i > 0) {
        chart.ids[k] = chart.ids[0];
        continue;
      }
      chart.ids[k] = static_cast<NodeId>(points.size());
      points.push_back({0, i, j, u, v});
      if (!pole) spacing = std::max({spacing, std::sqrt(g.g11) * chart.du, std::sqrt(g.g22) * chart.dv});
    }
  }

  std::vector<RawEdge> edges;
  const auto offsets = stencil_offsets(spec.stencil_radius);
  edges.reserve(cells * offsets.size() / 2);
  for (int j = 0; j < spec.nv; ++j) {
    for (int i = 0; i < spec.nu; ++i) {
      const MetricTensor& gp = chart.metric_at(i, j);
      const NodeId p = chart.id(i, j);
      for (const auto& [a, b] : offsets) {
        int ti = i + a, tj = j + b;
        if (pu) ti = ((ti % spec.nu) + spec.nu) % spec.nu;
        if (pv) tj = ((tj % spec.nv) + spec.nv) % spec.nv;
        if (ti < 0 || ti >= spec.nu || tj < 0 || tj >= spec.nv) continue;
        const NodeId q = chart.id(ti, tj);
        if (q <= p) continue;
        const MetricTensor& gq = chart.metric_at(ti, tj);
        const double du = a * chart.du, dv = b * chart.dv;
        const double len = 0.5 * (std::sqrt(gp.quadratic(du, dv)) + std::sqrt(gq.quadratic(du, dv)));
        edges.push_back({p, q, len});
      }
    }
  }
  // Wrapped offsets and the pole can produce parallel edges; keep the shortest.
  std::sort(edges.begin(), edges.end(), [](const RawEdge& x, const RawEdge& y) {
    return x.p != y.p ? x.p < y.p : (x.q != y.q ? x.q < y.q : x.length < y.length);
  });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const RawEdge& x, const RawEdge& y) { return x.p == y.p && x.q == y.q; }),
              edges.end());

  std::vector<char> cut(points.size(), 0);
  for (Side s : spec.cut) {
    const bool alongu = s == Side::v0 || s == Side::v1;
    const int fixed = s == Side::u0 || s == Side::v0 ? 0 : (alongu ? spec.nv - 1 : spec.nu - 1);
    const int count = alongu ? spec.nu : spec.nv;
    for (int k = 0; k < count; ++k) cut[alongu ? chart.id(k, fixed) : chart.id(fixed, k)] = 1;
  }
  const NodeId center = chart.id(spec.nu / 2, spec.nv / 2);
  std::vector<GridChart> charts{std::move(chart)};
  return ManifoldBuilder::finish(spec.name, std::move(points), std::move(edges), std::move(cut), std::move(charts),
                                 spacing, spec.stencil_radius, center);
}

DiscreteManifold glue(const std::vector<DiscreteManifold>& parts, const std::vector<Seam>& seams) {
  if (parts.empty()) throw Error(ErrorKind::invalid_input, "nothing to glue");
  std::vector<std::size_t> base(parts.size() + 1, 0);
  for (std::size_t k = 0; k < parts.size(); ++k) base[k + 1] = base[k] + parts[k].size();
  const std::size_t total = base.back();

  std::vector<std::size_t> parent(total);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Seam& s : seams) {
    if (s.a >= parts.size() || s.b >= parts.size()) throw Error(ErrorKind::invalid_input, "seam names a missing part");
    if (s.a_nodes.size() != s.b_nodes.size()) {
      std::ostringstream os;
      os << "seam node counts differ: " << s.a_nodes.size() << " vs " << s.b_nodes.size();
      throw Error(ErrorKind::invalid_input, os.str());
    }
    for (std::size_t k = 0; k < s.a_nodes.size(); ++k) {
      if (s.a_nodes[k] >= parts[s.a].size() || s.b_nodes[k] >= parts[s.b].size()) {
        throw Error(ErrorKind::invalid_input, "seam node out of range");
      }
      const std::size_t x = find(base[s.a] + s.a_nodes[k]), y = find(base[s.b] + s.b_nodes[k]);
      if (x != y) parent[std::max(x, y)] = std::min(x, y);
    }
  }

  // Representatives are the smallest member, so ids follow first appearance.
  std::vector<NodeId> remap(total);
  std::vector<NodeId> rep_id(total, detail::kNoNode);
  std::vector<NodePoint> points;
  std::vector<char> cut;
  int chart_base = 0;
  std::size_t part = 0;
  for (std::size_t g = 0; g < total; ++g) {
    while (g >= base[part + 1]) {
      chart_base += static_cast<int>(ManifoldBuilder::charts(parts[part]).size());
      ++part;
    }
    const std::size_t r = find(g);
    const NodeId local = static_cast<NodeId>(g - base[part]);
    if (rep_id[r] == detail::kNoNode) {
      rep_id[r] = static_cast<NodeId>(points.size());
      NodePoint pt = ManifoldBuilder::points(parts[part])[local];
      if (pt.chart >= 0) pt.chart += chart_base;
      points.push_back(pt);
      cut.push_back(0);
    }
    remap[g] = rep_id[r];
    cut[remap[g]] |= ManifoldBuilder::cut(parts[part])[local];
  }

  struct Tagged {
    NodeId p, q;
    std::size_t part;
    double length;
  };
  std::vector<Tagged> tagged;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const DiscreteManifold& m = parts[k];
    for (NodeId p = 0; p < m.size(); ++p) {
      for (const Edge& e : m.neighbors(p)) {
        if (e.to <= p) continue;
        const NodeId a = remap[base[k] + p], b = remap[base[k] + e.to];
        if (a == b) continue;
        tagged.push_back({std::min(a, b), std::max(a, b), k, e.length});
      }
    }
  }
  std::sort(tagged.begin(), tagged.end(), [](const Tagged& x, const Tagged& y) {
    if (x.p != y.p) return x.p < y.p;
    if (x.q != y.q) return x.q < y.q;
    if (x.part != y.part) return x.part < y.part;
    return x.length < y.length;
  });
  std::vector<RawEdge> edges;
  for (std::size_t k = 0; k < tagged.size();) {
    std::size_t end = k;
    double sum = 0.0;
    int contributors = 0;
    while (end < tagged.size() && tagged[end].p == tagged[k].p && tagged[end].q == tagged[k].q) {
      // Shortest edge per part, then the mean over parts.
      if (end == k || tagged[end].part != tagged[end - 1].part) {
        sum += tagged[end].length;
        ++contributors;
      }
      ++end;
    }
    edges.push_back({tagged[k].p, tagged[k].q, sum / contributors});
    k = end;
  }

  std::vector<GridChart> charts;
  double spacing = 0.0;
  int radius = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    for (GridChart c : ManifoldBuilder::charts(parts[k])) {
      for (NodeId& id : c.ids) id = remap[base[k] + id];
      charts.push_back(std::move(c));
    }
    spacing = std::max(spacing, parts[k].spacing());
    radius = std::max(radius, parts[k].stencil_radius());
  }
  std::string name = parts[0].name();
  for (std::size_t k = 1; k < parts.size(); ++k) name += "+" + parts[k].name();
  return ManifoldBuilder::finish(std::move(name), std::move(points), std::move(edges), std::move(cut),
                                 std::move(charts), spacing, radius, remap[base[0] + parts[0].center()]);
}

const std::vector<double>& boundary_margin(const DiscreteManifold& m) { return m.margin(); }

NodeSet chart_row(const DiscreteManifold& m, int chart, int j) {
  const GridChart& c = m.charts()[static_cast<std::size_t>(chart)];
  NodeSet out;
  for (int i = 0; i < c.nu; ++i) out.push_back(m.grid_node(chart, i, j));
  return out;
}

NodeSet chart_column(const DiscreteManifold& m, int chart, int i) {
  const GridChart& c = m.charts()[static_cast<std::size_t>(chart)];
  NodeSet out;
  for (int j = 0; j < c.nv; ++j) out.push_back(m.grid_node(chart, i, j));
  return out;
}

}  // namespace dlab
