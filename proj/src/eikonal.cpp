#include "dlab/eikonal.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <ostream>
#include <queue>

#include "shortest_paths.hpp"

namespace dlab {

const char* to_string(FieldSource s) {
  switch (s) {
    case FieldSource::distance_to_set: return "distance-to-set";
    case FieldSource::busemann: return "busemann";
    case FieldSource::horofunction: return "horofunction";
    case FieldSource::dl: return "dl";
    case FieldSource::min_combination: return "min-combination";
    case FieldSource::external: return "external";
  }
  return "?";
}

const char* to_string(Backend b) { return b == Backend::graph ? "graph" : "fast-march"; }

std::size_t ScalarField::reliable_count() const {
  return static_cast<std::size_t>(std::count(reliable.begin(), reliable.end(), char{1}));
}

ScalarField ScalarField::from_values(std::vector<double> values, std::string label, FieldSource source) {
  ScalarField f;
  f.reliable.assign(values.size(), 1);
  f.values = std::move(values);
  f.label = std::move(label);
  f.source = source;
  return f;
}

namespace {

NodeSet checked_sources(const DiscreteManifold& m, const NodeSet& sources) {
  if (sources.empty()) throw Error(ErrorKind::empty_set, "distance source set is empty");
  NodeSet s = sources;
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  if (s.back() >= m.size()) throw Error(ErrorKind::invalid_input, "source node out of range");
  return s;
}

DistanceField make_distance_field(const DiscreteManifold& m, std::vector<double> values, NodeSet sources,
                                  const char* label) {
  DistanceField f;
  f.source = FieldSource::distance_to_set;
  f.label = label;
  f.reliable.resize(values.size());
  const auto& margin = m.margin();
  for (std::size_t p = 0; p < values.size(); ++p) f.reliable[p] = values[p] < margin[p] ? 1 : 0;
  f.values = std::move(values);
  f.source_set = std::move(sources);
  return f;
}

// Chart membership of a node: appears once per chart (twice or more on seams,
// once per u index on a collapsed pole).
struct Membership {
  int chart, i, j;
};

struct GridIndex {
  std::vector<std::size_t> offsets;
  std::vector<Membership> members;

  std::span<const Membership> of(NodeId p) const {
    return {members.data() + offsets[p], members.data() + offsets[p + 1]};
  }
};

GridIndex index_grid(const DiscreteManifold& m) {
  std::vector<std::vector<Membership>> lists(m.size());
  const auto charts = m.charts();
  for (std::size_t c = 0; c < charts.size(); ++c) {
    const GridChart& g = charts[c];
    for (int j = 0; j < g.nv; ++j) {
      for (int i = 0; i < g.nu; ++i) {
        const MetricTensor& t = g.metric_at(i, j);
        if (t.g12 != 0.0) {
          throw Error(ErrorKind::invalid_input, "fast_march requires a diagonal metric (g12 = 0) in chart '" +
                                                    g.name + "'; use the graph backend");
        }
        lists[g.id(i, j)].push_back({static_cast<int>(c), i, j});
      }
    }
  }
  GridIndex idx;
  idx.offsets.reserve(m.size() + 1);
  idx.offsets.push_back(0);
  for (NodeId p = 0; p < m.size(); ++p) {
    if (lists[p].empty()) {
      throw Error(ErrorKind::not_grid, "node outside every chart; fast_march needs a chart-structured region, "
                                       "use the graph backend");
    }
    idx.members.insert(idx.members.end(), lists[p].begin(), lists[p].end());
    idx.offsets.push_back(idx.members.size());
  }
  return idx;
}

std::optional<NodeId> grid_step(const GridChart& g, int i, int j, int di, int dj) {
  int a = i + di, b = j + dj;
  if (g.periodic_u) a = ((a % g.nu) + g.nu) % g.nu;
  if (g.periodic_v) b = ((b % g.nv) + g.nv) % g.nv;
  if (a < 0 || a >= g.nu || b < 0 || b >= g.nv) return std::nullopt;
  return g.id(a, b);
}

}  // namespace

DistanceField distance_to_set(const DiscreteManifold& m, const NodeSet& sources) {
  NodeSet s = checked_sources(m, sources);
  auto d = detail::dijkstra(m, s);
  return make_distance_field(m, std::move(d), std::move(s), "graph distance");
}

double pairwise_distance(const DiscreteManifold& m, NodeId x, NodeId y) {
  if (x >= m.size() || y >= m.size()) throw Error(ErrorKind::invalid_input, "node out of range");
  if (x == y) return 0.0;
  const NodeId from = std::min(x, y), to = std::max(x, y);
  const NodeSet src{from};
  return detail::dijkstra(m, src, kInfinity, to)[to];
}

DistanceField fast_march(const DiscreteManifold& m, const NodeSet& sources, std::span<const double> source_values) {
  if (!m.has_grid()) {
    throw Error(ErrorKind::not_grid, "fast_march needs a chart-structured region; use the graph backend");
  }
  NodeSet s = checked_sources(m, sources);
  if (!source_values.empty() && source_values.size() != sources.size()) {
    throw Error(ErrorKind::invalid_input, "source_values must parallel sources");
  }
  const GridIndex idx = index_grid(m);
  const auto charts = m.charts();

  std::vector<double> value(m.size(), kInfinity);
  std::vector<char> known(m.size(), 0);
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> trial;

  auto known_value = [&](std::optional<NodeId> q) { return q && known[*q] ? value[*q] : kInfinity; };

  auto solve = [&](NodeId p) {
    double best = kInfinity;
    for (const Membership& mb : idx.of(p)) {
      const GridChart& g = charts[static_cast<std::size_t>(mb.chart)];
      const MetricTensor& t = g.metric_at(mb.i, mb.j);
      const double hu = std::sqrt(t.g11) * g.du, hv = std::sqrt(t.g22) * g.dv;
      double a = kInfinity, b = kInfinity;
      if (hu > 0.0) {
        for (int di : {-1, 1}) {
          const auto q = grid_step(g, mb.i, mb.j, di, 0);
          if (q && *q != p) a = std::min(a, known_value(q));
        }
      }
      for (int dj : {-1, 1}) {
        const auto q = grid_step(g, mb.i, mb.j, 0, dj);
        if (q && *q != p) b = std::min(b, known_value(q));
      }
      double x = std::min(a + hu, b + hv);
      if (std::isfinite(a) && std::isfinite(b)) {
        // (x-a)^2/hu^2 + (x-b)^2/hv^2 = 1, upwind root.
        const double wu = 1.0 / (hu * hu), wv = 1.0 / (hv * hv);
        const double qa = wu + wv;
        const double qb = -2.0 * (wu * a + wv * b);
        const double qc = wu * a * a + wv * b * b - 1.0;
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc >= 0.0) {
          const double root = (-qb + std::sqrt(disc)) / (2.0 * qa);
          if (root >= std::max(a, b)) x = std::min(x, root);
        }
      }
      best = std::min(best, x);
    }
    return best;
  };

  if (source_values.empty()) {
    for (NodeId p : s) value[p] = 0.0;
  }
  for (std::size_t k = 0; k < source_values.size(); ++k) {
    if (!(source_values[k] >= 0.0)) throw Error(ErrorKind::invalid_input, "source values must be >= 0");
    value[sources[k]] = std::min(value[sources[k]], source_values[k]);
  }
  for (NodeId p : s) trial.emplace(value[p], p);
  std::vector<NodeId> around;
  while (!trial.empty()) {
    const auto [d, p] = trial.top();
    trial.pop();
    if (known[p] || d > value[p]) continue;
    known[p] = 1;
    around.clear();
    for (const Membership& mb : idx.of(p)) {
      const GridChart& g = charts[static_cast<std::size_t>(mb.chart)];
      for (auto [di, dj] : {std::pair{-1, 0}, {1, 0}, {0, -1}, {0, 1}}) {
        const auto q = grid_step(g, mb.i, mb.j, di, dj);
        if (q && !known[*q]) around.push_back(*q);
      }
    }
    std::sort(around.begin(), around.end());
    around.erase(std::unique(around.begin(), around.end()), around.end());
    for (NodeId q : around) {
      const double x = solve(q);
      if (x < value[q]) {
        value[q] = x;
        trial.emplace(x, q);
      }
    }
  }
  return make_distance_field(m, std::move(value), std::move(s), "fast-march distance");
}

DistanceField distance_with(Backend backend, const DiscreteManifold& m, const NodeSet& sources) {
  return backend == Backend::graph ? distance_to_set(m, sources) : fast_march(m, sources);
}

LocalSlope local_slope(const DiscreteManifold& m, const ScalarField& f, NodeId p) {
  LocalSlope s;
  s.descent_to = s.ascent_to = p;
  const double fp = f.values[p];
  for (const Edge& e : m.neighbors(p)) {
    const double fq = f.values[e.to];
    if (!std::isfinite(fq)) continue;
    const double q = (fp - fq) / e.length;
    if (q > s.descent) {
      s.descent = q;
      s.descent_to = e.to;
    }
    if (-q > s.ascent) {
      s.ascent = -q;
      s.ascent_to = e.to;
    }
  }
  return s;
}

std::vector<double> upwind_gradient_norm(const DiscreteManifold& m, const ScalarField& f) {
  std::vector<double> out(m.size(), 0.0);
  for (NodeId p = 0; p < m.size(); ++p) out[p] = local_slope(m, f, p).descent;
  return out;
}

std::vector<char> reliable_interior(const DiscreteManifold& m, const ScalarField& f) {
  std::vector<char> out(m.size(), 0);
  for (NodeId p = 0; p < m.size(); ++p) {
    if (!f.is_reliable(p) || m.is_cut(p)) continue;
    bool all = true;
    for (const Edge& e : m.neighbors(p)) all = all && f.is_reliable(e.to);
    out[p] = all ? 1 : 0;
  }
  return out;
}

ScalarField normalized(const ScalarField& f, NodeId x0) {
  ScalarField g = f;
  const double shift = f.values.at(x0);
  for (double& v : g.values) v -= shift;
  g.values[x0] = 0.0;
  g.base_node = x0;
  return g;
}

std::string format_real(double x) {
  if (x == 0.0) return "0";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

void write_field_csv(std::ostream& os, const DiscreteManifold& m, const ScalarField& f) {
  os << "node_id,u,v,value,reliable\n";
  for (NodeId p = 0; p < f.size(); ++p) {
    const NodePoint& pt = m.point(p);
    os << p << ',' << format_real(pt.u) << ',' << format_real(pt.v) << ',' << format_real(f.values[p]) << ','
       << (f.is_reliable(p) ? 1 : 0) << '\n';
  }
}

}  // namespace dlab
