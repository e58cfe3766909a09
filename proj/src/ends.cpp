#include "dlab/ends.hpp"

#include <algorithm>
#include <ostream>

#include "shortest_paths.hpp"

namespace dlab {

namespace {

bool inside(const EndPartition& e, NodeId p, std::size_t k) {
  return e.distance[p] <= e.radii[k] + 1e-12 * (1.0 + e.radii[k]);
}

// Flood fill of the ball complement; components without a cut node get -1.
std::vector<int> components(const DiscreteManifold& m, const EndPartition& e, std::size_t k, int& count) {
  std::vector<int> label(m.size(), -2);
  count = 0;
  std::vector<NodeId> stack, members;
  for (NodeId s = 0; s < m.size(); ++s) {
    if (label[s] != -2 || inside(e, s, k)) continue;
    members.clear();
    bool touches = false;
    stack.push_back(s);
    label[s] = -3;
    while (!stack.empty()) {
      const NodeId p = stack.back();
      stack.pop_back();
      members.push_back(p);
      touches = touches || m.is_cut(p);
      for (const auto& nb : m.neighbors(p)) {
        if (label[nb.to] != -2 || inside(e, nb.to, k)) continue;
        label[nb.to] = -3;
        stack.push_back(nb.to);
      }
    }
    const int c = touches ? count++ : -1;
    for (NodeId p : members) label[p] = c;
  }
  for (int& c : label) c = std::max(c, -1);
  return label;
}

}  // namespace

EndPartition end_partition(const DiscreteManifold& m, NodeId x0, const std::vector<double>& radii) {
  if (radii.size() < 3) throw Error(ErrorKind::invalid_input, "end_partition needs at least 3 radii");
  for (std::size_t k = 1; k < radii.size(); ++k) {
    if (!(radii[k] > radii[k - 1])) throw Error(ErrorKind::invalid_input, "end_partition radii must increase");
  }
  EndPartition e;
  e.base = x0;
  e.radii = radii;
  const NodeSet src{x0};
  e.distance = detail::dijkstra(m, src);
  const std::size_t n = radii.size();
  e.labels.resize(n);
  e.counts.resize(n);
  e.refinement.resize(n);
  for (std::size_t k = 0; k < n; ++k) e.labels[k] = components(m, e, k, e.counts[k]);
  for (std::size_t k = 1; k < n; ++k) {
    auto& map = e.refinement[k];
    map.assign(static_cast<std::size_t>(e.counts[k]), -1);
    for (NodeId p = 0; p < m.size(); ++p) {
      const int c = e.labels[k][p];
      if (c < 0) continue;
      const int parent = e.labels[k - 1][p];
      int& slot = map[static_cast<std::size_t>(c)];
      if (slot >= 0 && slot != parent) throw Error(ErrorKind::internal, "component refinement is inconsistent");
      slot = parent;
    }
  }
  const auto& last = e.refinement[n - 1];
  std::vector<int> sorted = last;
  std::sort(sorted.begin(), sorted.end());
  bool bijective = e.counts[n - 1] == e.counts[n - 2];
  for (std::size_t c = 0; bijective && c < sorted.size(); ++c) bijective = sorted[c] == static_cast<int>(c);
  e.stabilized = bijective && e.counts[n - 1] >= 1;
  e.stabilized_count = e.counts[n - 1];
  return e;
}

std::vector<int> tail_labels(const EndPartition& e, const Ray& ray) {
  const auto& nodes = ray.path.nodes;
  if (nodes.empty() || inside(e, nodes.back(), e.radii.size() - 1)) {
    throw Error(ErrorKind::invalid_input, "ray too short: certified part stays inside the largest ball");
  }
  std::vector<int> out(e.radii.size());
  // The vertex after the last visit to the ball lies in the tail's component.
  for (std::size_t k = 0; k < e.radii.size(); ++k) {
    std::size_t i = nodes.size() - 1;
    while (i > 0 && !inside(e, nodes[i - 1], k)) --i;
    out[k] = e.labels[k][nodes[i]];
  }
  return out;
}

int assign_tail(EndPartition& e, std::string name, const Ray& ray) {
  const int label = tail_labels(e, ray).back();
  e.tail_map.emplace_back(std::move(name), label);
  return label;
}

bool cofinal(const Ray& a, const Ray& b, const EndPartition& e) { return tail_labels(e, a) == tail_labels(e, b); }

CofinalityReport verify_coray_cofinality(const DiscreteManifold& m, const Ray& gamma, const NodeSet& starts,
                                         const EndPartition& e) {
  CofinalityReport r;
  const auto ref = tail_labels(e, gamma);
  for (NodeId x : starts) {
    const auto result = coray(m, gamma, x);
    const Ray& c = result.primary();
    ++r.checked;
    r.unstabilized += result.stabilized ? 0 : 1;
    std::vector<int> got;
    try {
      got = tail_labels(e, c);
    } catch (const Error&) {
      ++r.too_short;
      continue;
    }
    for (std::size_t k = 0; k < ref.size(); ++k) {
      if (got[k] != ref[k]) {
        r.violations.push_back({x, k});
        break;
      }
    }
  }
  return r;
}

EndsInequality verify_ends_inequality(const EndPartition& e, const std::vector<BoundaryPoint>& sample,
                                      const CompactExhaustion& ex, double eps) {
  EndsInequality r;
  r.ends = e.stabilized_count;
  r.clustering = cluster_boundary(sample, ex, eps);
  r.clusters = r.clustering.count;
  return r;
}

void write_partition(std::ostream& os, const EndPartition& e) {
  os << "base = " << e.base << '\n';
  os << "stabilized = " << (e.stabilized ? "true" : "false") << '\n';
  os << "ends = " << e.stabilized_count << '\n';
  for (std::size_t k = 0; k < e.radii.size(); ++k) {
    os << "radius = " << format_real(e.radii[k]) << " count = " << e.counts[k] << " refines =";
    for (int parent : e.refinement[k]) os << ' ' << parent;
    os << '\n';
  }
  for (const auto& [name, label] : e.tail_map) os << "tail " << name << " = " << label << '\n';
}

}  // namespace dlab
