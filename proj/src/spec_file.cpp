#include "dlab/spec_file.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "dlab/eikonal.hpp"
#include "dlab/ends.hpp"

namespace dlab {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct Entry {
  std::string key, value;
  int line = 0;
};

struct Section {
  std::string kind;
  int line = 0;
  std::vector<Entry> entries;
};

[[noreturn]] void fail(int line, const std::string& what) {
  throw Error(ErrorKind::invalid_input, "spec line " + std::to_string(line) + ": " + what);
}

double real_of(const Entry& e) {
  double x = 0.0;
  const char* end = e.value.data() + e.value.size();
  const auto r = std::from_chars(e.value.data(), end, x);
  if (r.ec != std::errc() || r.ptr != end || !std::isfinite(x)) fail(e.line, e.key + " is not a decimal: " + e.value);
  return x;
}

int int_of(const Entry& e) {
  int x = 0;
  const char* end = e.value.data() + e.value.size();
  const auto r = std::from_chars(e.value.data(), end, x);
  if (r.ec != std::errc() || r.ptr != end) fail(e.line, e.key + " is not an integer: " + e.value);
  return x;
}

bool bool_of(const Entry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  fail(e.line, e.key + " must be true or false");
}

Side side_of(const Entry& e, const std::string& word) {
  if (word == "u0") return Side::u0;
  if (word == "u1") return Side::u1;
  if (word == "v0") return Side::v0;
  if (word == "v1") return Side::v1;
  fail(e.line, "unknown side: " + word);
}

std::vector<Section> read_sections(std::istream& in) {
  std::vector<Section> out;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header");
      const std::string kind = trim(s.substr(1, s.size() - 2));
      if (kind != "chart" && kind != "metric" && kind != "identify" && kind != "seam" && kind != "base") {
        fail(line, "unknown section: " + kind);
      }
      out.push_back({kind, line, {}});
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    if (out.empty()) fail(line, "entry outside a section");
    Entry e{trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
    if (e.key.empty() || e.value.empty()) fail(line, "empty key or value");
    for (const auto& prev : out.back().entries) {
      if (prev.key == e.key) fail(line, "duplicate key: " + e.key);
    }
    out.back().entries.push_back(std::move(e));
  }
  return out;
}

struct SeamSpec {
  std::string a, b;
  Side a_side = Side::v0, b_side = Side::v0;
  int a_start = 0, b_start = 0, a_step = 1, b_step = 1;
  std::optional<int> count;
  int line = 0;
};

struct BaseSpec {
  std::optional<std::string> chart;
  std::optional<double> u, v;
};

int side_length(const ChartSpec& c, Side s) { return s == Side::u0 || s == Side::u1 ? c.nv : c.nu; }

NodeId side_node(const DiscreteManifold& part, const ChartSpec& c, Side s, int k) {
  switch (s) {
    case Side::u0: return part.grid_node(0, 0, k);
    case Side::u1: return part.grid_node(0, c.nu - 1, k);
    case Side::v0: return part.grid_node(0, k, 0);
    case Side::v1: return part.grid_node(0, k, c.nv - 1);
  }
  return 0;
}

bool in_range(const ChartSpec& c, Side s, int k) {
  const bool periodic = (s == Side::v0 || s == Side::v1) ? c.identify == Identification::periodic_u
                                                         : c.identify == Identification::periodic_v;
  return periodic || (k >= 0 && k < side_length(c, s));
}

}  // namespace

SpecManifold parse_manifold_spec(std::istream& in) {
  const auto sections = read_sections(in);
  std::vector<ChartSpec> charts;
  std::map<std::string, std::size_t> index;
  std::vector<SeamSpec> seams;
  BaseSpec base;
  bool have_base = false;
  const auto chart_ref = [&](const Section& sec) -> ChartSpec& {
    for (const auto& e : sec.entries) {
      if (e.key != "chart") continue;
      const auto it = index.find(e.value);
      if (it == index.end()) fail(e.line, "unknown chart: " + e.value);
      return charts[it->second];
    }
    if (charts.empty()) fail(sec.line, sec.kind + " before any chart");
    return charts.back();
  };
  for (const auto& sec : sections) {
    if (sec.kind == "chart") {
      ChartSpec c;
      c.name = "chart" + std::to_string(charts.size());
      std::map<std::string, bool> seen;
      for (const auto& e : sec.entries) {
        seen[e.key] = true;
        if (e.key == "name") c.name = e.value;
        else if (e.key == "u0") c.u0 = real_of(e);
        else if (e.key == "u1") c.u1 = real_of(e);
        else if (e.key == "v0") c.v0 = real_of(e);
        else if (e.key == "v1") c.v1 = real_of(e);
        else if (e.key == "nu") c.nu = int_of(e);
        else if (e.key == "nv") c.nv = int_of(e);
        else if (e.key == "collapse_v0") c.collapse_v0 = bool_of(e);
        else if (e.key == "stencil_radius") c.stencil_radius = int_of(e);
        else if (e.key == "cut") {
          std::istringstream words(e.value);
          for (std::string w; words >> w;) c.cut.push_back(side_of(e, w));
        } else fail(e.line, "unknown chart key: " + e.key);
      }
      for (const char* k : {"u0", "u1", "v0", "v1", "nu", "nv"}) {
        if (!seen[k]) fail(sec.line, std::string("chart is missing ") + k);
      }
      if (index.count(c.name)) fail(sec.line, "duplicate chart name: " + c.name);
      index[c.name] = charts.size();
      charts.push_back(std::move(c));
    } else if (sec.kind == "metric") {
      ChartSpec& c = chart_ref(sec);
      MetricTensor g;
      for (const auto& e : sec.entries) {
        if (e.key == "chart") continue;
        if (e.key == "g11") g.g11 = real_of(e);
        else if (e.key == "g12") g.g12 = real_of(e);
        else if (e.key == "g22") g.g22 = real_of(e);
        else fail(e.line, "unknown metric key: " + e.key);
      }
      if (!g.positive_definite()) fail(sec.line, "metric is not positive definite");
      c.metric = [g](double, double) { return g; };
    } else if (sec.kind == "identify") {
      ChartSpec& c = chart_ref(sec);
      bool typed = false;
      for (const auto& e : sec.entries) {
        if (e.key == "chart") continue;
        if (e.key != "type") fail(e.line, "unknown identify key: " + e.key);
        typed = true;
        if (e.value == "none") c.identify = Identification::none;
        else if (e.value == "periodic_u") c.identify = Identification::periodic_u;
        else if (e.value == "periodic_v") c.identify = Identification::periodic_v;
        else fail(e.line, "unknown identification: " + e.value);
      }
      if (!typed) fail(sec.line, "identify is missing type");
    } else if (sec.kind == "seam") {
      SeamSpec s;
      s.line = sec.line;
      for (const auto& e : sec.entries) {
        if (e.key == "a") s.a = e.value;
        else if (e.key == "b") s.b = e.value;
        else if (e.key == "a_side") s.a_side = side_of(e, e.value);
        else if (e.key == "b_side") s.b_side = side_of(e, e.value);
        else if (e.key == "a_start") s.a_start = int_of(e);
        else if (e.key == "b_start") s.b_start = int_of(e);
        else if (e.key == "a_step" || e.key == "b_step") {
          const int step = int_of(e);
          if (step != 1 && step != -1) fail(e.line, e.key + " must be 1 or -1");
          (e.key == "a_step" ? s.a_step : s.b_step) = step;
        } else if (e.key == "count") {
          s.count = int_of(e);
          if (*s.count < 1) fail(e.line, "count must be positive");
        } else fail(e.line, "unknown seam key: " + e.key);
      }
      if (s.a.empty() || s.b.empty()) fail(sec.line, "seam needs charts a and b");
      seams.push_back(std::move(s));
    } else {
      if (have_base) fail(sec.line, "duplicate base section");
      have_base = true;
      for (const auto& e : sec.entries) {
        if (e.key == "chart") base.chart = e.value;
        else if (e.key == "u") base.u = real_of(e);
        else if (e.key == "v") base.v = real_of(e);
        else fail(e.line, "unknown base key: " + e.key);
      }
    }
  }
  if (charts.empty()) throw Error(ErrorKind::invalid_input, "spec declares no chart");

  std::vector<DiscreteManifold> parts;
  for (const auto& c : charts) parts.push_back(build_chart_manifold(c));
  std::vector<Seam> glued;
  for (const auto& s : seams) {
    const auto ia = index.find(s.a), ib = index.find(s.b);
    if (ia == index.end()) fail(s.line, "unknown chart: " + s.a);
    if (ib == index.end()) fail(s.line, "unknown chart: " + s.b);
    const ChartSpec& ca = charts[ia->second];
    const ChartSpec& cb = charts[ib->second];
    const int count = s.count.value_or(side_length(ca, s.a_side));
    Seam g{ia->second, ib->second, {}, {}};
    for (int k = 0; k < count; ++k) {
      const int ka = s.a_start + s.a_step * k, kb = s.b_start + s.b_step * k;
      if (!in_range(ca, s.a_side, ka) || !in_range(cb, s.b_side, kb)) fail(s.line, "seam runs off a chart side");
      g.a_nodes.push_back(side_node(parts[ia->second], ca, s.a_side, ka));
      g.b_nodes.push_back(side_node(parts[ib->second], cb, s.b_side, kb));
    }
    glued.push_back(std::move(g));
  }
  SpecManifold out;
  out.manifold = parts.size() == 1 && glued.empty() ? parts.front() : glue(parts, glued);
  for (const auto& c : charts) out.charts.push_back(c.name);

  std::size_t chart = 0;
  if (base.chart) {
    const auto it = index.find(*base.chart);
    if (it == index.end()) throw Error(ErrorKind::invalid_input, "unknown base chart: " + *base.chart);
    chart = it->second;
  }
  const ChartSpec& c = charts[chart];
  const double u = base.u.value_or(0.5 * (c.u0 + c.u1));
  const double v = base.v.value_or(0.5 * (c.v0 + c.v1));
  out.base = nearest_node(out.manifold, static_cast<int>(chart), u, v);
  out.manifold = out.manifold.with_center(out.base);
  return out;
}

SpecManifold load_manifold_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::invalid_input, "cannot open spec file: " + path);
  return parse_manifold_spec(in);
}

NodeId nearest_node(const DiscreteManifold& m, int chart, double u, double v) {
  if (chart < 0 || static_cast<std::size_t>(chart) >= m.charts().size()) {
    throw Error(ErrorKind::not_grid, "nearest_node needs a chart index of the manifold");
  }
  const GridChart& g = m.charts()[static_cast<std::size_t>(chart)];
  const auto index = [](double x, double x0, double dx, int n, bool periodic) {
    const long k = std::lround((x - x0) / dx);
    if (periodic) return static_cast<int>(((k % n) + n) % n);
    return static_cast<int>(std::clamp<long>(k, 0, n - 1));
  };
  return g.id(index(u, g.u0, g.du, g.nu, g.periodic_u), index(v, g.v0, g.dv, g.nv, g.periodic_v));
}

void describe(std::ostream& os, const DiscreteManifold& m, NodeId base) {
  const double r = m.with_center(base).window_radius();
  os << "name = " << m.name() << '\n';
  os << "nodes = " << m.size() << '\n';
  os << "edges = " << m.edge_count() << '\n';
  os << "spacing = " << format_real(m.spacing()) << '\n';
  os << "base = " << base << '\n';
  os << "window_radius = " << format_real(r) << '\n';
  if (!std::isfinite(r) || r <= 0.0) {
    os << "ends = 0\n";
    return;
  }
  const auto e = end_partition(m, base, {r / 4, r / 3, r / 2});
  os << "ends_stabilized = " << (e.stabilized ? "true" : "false") << '\n';
  os << "ends = " << e.stabilized_count << '\n';
  const auto& last = e.labels.back();
  for (int c = 0; c < e.stabilized_count; ++c) {
    std::size_t nodes = 0;
    std::map<std::string, std::size_t> by_chart;
    for (NodeId p = 0; p < m.size(); ++p) {
      if (last[p] != c) continue;
      ++nodes;
      const int k = m.point(p).chart;
      ++by_chart[k >= 0 ? m.charts()[static_cast<std::size_t>(k)].name : std::string("graph")];
    }
    std::string label;
    std::size_t best = 0;
    for (const auto& [name, n] : by_chart) {
      if (n > best) best = n, label = name;
    }
    os << "end " << c << " = " << label << " nodes = " << nodes << '\n';
  }
}

}  // namespace dlab
