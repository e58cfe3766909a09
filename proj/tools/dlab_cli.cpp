#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dlab/scenarios.hpp"
#include "dlab/spec_file.hpp"

using namespace dlab;

namespace {

constexpr int kPass = 0;
constexpr int kCheckFail = 1;
constexpr int kUsage = 2;
constexpr int kNotEscaping = 3;
constexpr int kInternal = 4;
constexpr int kMinVerifyResolution = 16;

struct Config {
  std::string scenario;
  std::string spec;
  double window = 0.0;
  int resolution = 0;
  std::string out;
  std::uint64_t seed = 1;
  Tolerances tol;
  std::string backend;
  std::vector<std::string> sources;
  std::string direction;
  std::string points;
  std::string sets;
  std::string end;
  std::string which;
};

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct World {
  std::optional<Scenario> scenario;
  DiscreteManifold manifold;
  NodeId base = 0;
};

World load(const Config& c) {
  if (c.scenario.empty() == c.spec.empty()) throw Usage("exactly one of --scenario or --spec is required");
  World w;
  if (!c.scenario.empty()) {
    w.scenario = make_scenario(c.scenario, {c.window, c.resolution});
    w.manifold = w.scenario->manifold;
    w.base = w.scenario->base;
    return w;
  }
  if (c.window > 0.0 || c.resolution > 0) throw Usage("--window and --resolution apply to scenarios only");
  auto s = load_manifold_spec(c.spec);
  w.manifold = std::move(s.manifold);
  w.base = s.base;
  return w;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

double number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    throw Usage("not a number in " + what + ": " + s);
  }
  if (used != s.size() || !std::isfinite(x)) throw Usage("not a number in " + what + ": " + s);
  return x;
}

int base_chart(const World& w) {
  const int chart = w.manifold.point(w.base).chart;
  if (chart < 0) throw Usage("coordinates need a chart manifold");
  return chart;
}

// "u,v[;u,v...]", "node i[,j...]", "ball r" or "circle z".
NodeSet parse_source(const World& w, const std::string& text) {
  const auto& m = w.manifold;
  NodeSet out;
  if (text.rfind("node ", 0) == 0) {
    for (const auto& item : split(text.substr(5), ',')) {
      const double x = number(item, "node list");
      if (x < 0 || x >= static_cast<double>(m.size()) || x != std::floor(x)) throw Usage("no such node: " + item);
      out.push_back(static_cast<NodeId>(x));
    }
  } else if (text.rfind("ball ", 0) == 0) {
    const double r = number(text.substr(5), "ball radius");
    if (r < 0.0) throw Usage("ball radius must be non-negative");
    const auto d = distance_to_set(m, {w.base});
    for (NodeId p = 0; p < m.size(); ++p) {
      if (d[p] <= r) out.push_back(p);
    }
  } else if (text.rfind("circle ", 0) == 0) {
    const double z = number(text.substr(7), "circle height");
    const int chart = base_chart(w);
    const auto& g = m.charts()[static_cast<std::size_t>(chart)];
    const long j = std::lround((z - g.v0) / g.dv);
    if (j < 0 || j >= g.nv) throw Usage("circle outside the chart: " + text);
    out = chart_row(m, chart, static_cast<int>(j));
  } else {
    const int chart = base_chart(w);
    for (const auto& pair : split(text, ';')) {
      const auto uv = split(pair, ',');
      if (uv.size() != 2) throw Usage("expected u,v coordinates: " + pair);
      out.push_back(nearest_node(m, chart, number(uv[0], "source"), number(uv[1], "source")));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw Usage("empty source set: " + text);
  return out;
}

// Chart line from the base at `degrees`, one target per doubling of the
// distance while it stays a stencil reach inside the window.
std::vector<NodeId> line_targets(const World& w, double degrees) {
  const auto& m = w.manifold;
  const int chart = base_chart(w);
  const auto& g = m.charts()[static_cast<std::size_t>(chart)];
  const auto o = m.point(w.base);
  const double a = degrees * std::numbers::pi / 180.0;
  const double reach = m.stencil_radius() * m.spacing();
  std::vector<NodeId> out;
  for (double d = 2.0 * reach;; d *= 2.0) {
    const double u = o.u + d * std::cos(a), v = o.v + d * std::sin(a);
    const bool inside_u = g.periodic_u || (u >= g.u0 && u <= g.u_at(g.nu - 1));
    const bool inside_v = g.periodic_v || (v >= g.v0 && v <= g.v_at(g.nv - 1));
    if (!inside_u || !inside_v) break;
    const NodeId p = nearest_node(m, chart, u, v);
    if (m.margin()[p] < reach) break;
    if (out.empty() || out.back() != p) out.push_back(p);
  }
  if (out.size() < 2) throw Usage("direction leaves the window too soon: " + std::to_string(degrees));
  return out;
}

const RaySpec* named_ray(const World& w, const std::string& name) {
  if (!w.scenario) return nullptr;
  for (const auto& r : w.scenario->rays) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

Ray ray_for(const World& w, const std::string& direction) {
  if (direction.empty()) throw Usage("--direction is required");
  if (const RaySpec* r = named_ray(w, direction)) return trace(*w.scenario, *r);
  return trace_ray(w.manifold, w.base, line_targets(w, number(direction, "--direction")));
}

std::vector<NodeId> points_for(const World& w, const Config& c) {
  if (!c.points.empty()) {
    std::vector<NodeId> out;
    for (const auto& pair : split(c.points, ';')) {
      const auto p = parse_source(w, pair);
      out.push_back(p.front());
    }
    return out;
  }
  if (c.direction.empty()) throw Usage("horo needs --points or --direction");
  if (const RaySpec* r = named_ray(w, c.direction)) return r->targets;
  return line_targets(w, number(c.direction, "--direction"));
}

std::vector<NodeSet> sets_for(const World& w, const Config& c) {
  if (!c.sources.empty()) {
    std::vector<NodeSet> out;
    for (const auto& s : c.sources) out.push_back(parse_source(w, s));
    return out;
  }
  if (c.sets.empty() || c.end.empty()) throw Usage("dl needs --set sources or --sets with --end");
  if (w.scenario) {
    const std::string name = c.sets + " " + c.end;
    for (const auto& q : w.scenario->set_sequences) {
      if (q.name == name) return q.sets;
    }
  }
  throw Usage("no set sequence named '" + c.sets + " " + c.end + "'");
}

LimitOptions limit_options(const World& w, const Config& c) {
  LimitOptions o;
  if (w.scenario) o.backend = w.scenario->backend;
  if (!c.backend.empty()) o.backend = c.backend == "graph" ? Backend::graph : Backend::fast_march;
  o.limit_tol = c.tol.limit_tol;
  return o;
}

// Writes to <out>/<stem>.<ext>, or to `fallback` without --out.
void emit(const Config& c, const std::string& file, const std::string& text, std::ostream& fallback) {
  if (c.out.empty()) {
    fallback << text;
    return;
  }
  std::filesystem::create_directories(c.out);
  std::ofstream f(std::filesystem::path(c.out) / file, std::ios::binary);
  f << text;
  if (!f) throw Error(ErrorKind::invalid_input, "cannot write " + file + " in " + c.out);
}

std::string csv_of(const World& w, const ScalarField& f) {
  std::ostringstream os;
  write_field_csv(os, w.manifold, f);
  return os.str();
}

int cmd_describe(const Config& c) {
  const auto w = load(c);
  std::ostringstream os;
  describe(os, w.manifold, w.base);
  emit(c, "describe.txt", os.str(), std::cout);
  return kPass;
}

int cmd_dist(const Config& c) {
  if (c.sources.empty()) throw Usage("dist needs --source");
  const auto w = load(c);
  NodeSet sources;
  for (const auto& s : c.sources) {
    const auto part = parse_source(w, s);
    sources.insert(sources.end(), part.begin(), part.end());
  }
  std::sort(sources.begin(), sources.end());
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
  const Backend b = c.backend == "fast_march" ? Backend::fast_march : Backend::graph;
  const auto f = distance_with(b, w.manifold, sources);
  std::ostringstream summary;
  double reach = 0.0;
  for (NodeId p = 0; p < f.size(); ++p) {
    if (f.is_reliable(p)) reach = std::max(reach, f[p]);
  }
  summary << "backend = " << to_string(b) << '\n'
          << "sources = " << sources.size() << '\n'
          << "nodes = " << f.size() << '\n'
          << "reliable = " << f.reliable_count() << '\n'
          << "max_reliable_value = " << format_real(reach) << '\n';
  emit(c, "dist.csv", csv_of(w, f), std::cout);
  emit(c, "dist.txt", summary.str(), std::cerr);
  return kPass;
}

int finish_limit(const Config& c, const World& w, const std::string& stem, const Limit& l) {
  emit(c, stem + ".csv", csv_of(w, l.field), std::cout);
  emit(c, stem + ".txt", to_text(l.report), std::cerr);
  if (!l.report.converged) {
    std::cerr << "error: limit did not converge\n";
    return kCheckFail;
  }
  return kPass;
}

int cmd_busemann(const Config& c) {
  const auto w = load(c);
  const auto ray = ray_for(w, c.direction);
  return finish_limit(c, w, "busemann", busemann(w.manifold, ray, w.base, limit_options(w, c)));
}

int cmd_horo(const Config& c) {
  const auto w = load(c);
  const auto pts = points_for(w, c);
  return finish_limit(c, w, "horo", horofunction(w.manifold, pts, w.base, limit_options(w, c)));
}

int cmd_dl(const Config& c) {
  const auto w = load(c);
  const auto sets = sets_for(w, c);
  return finish_limit(c, w, "dl", dl_function(w.manifold, sets, w.base, limit_options(w, c)));
}

int cmd_verify(const Config& c) {
  if (!c.spec.empty()) throw Usage("verify needs a named --scenario");
  if (c.resolution != 0 && c.resolution < kMinVerifyResolution) {
    throw Usage("verify needs --resolution >= " + std::to_string(kMinVerifyResolution));
  }
  const auto w = load(c);
  VerifyOptions o;
  o.seed = c.seed;
  o.tol = c.tol;
  const Scenario& s = *w.scenario;
  Report r;
  if (c.which == "theorem1") r = verify_theorem1(s, o);
  else if (c.which == "theorem3") r = verify_theorem3(s, o);
  else if (c.which == "theorem4") r = verify_theorem4(s, o);
  else if (c.which == "ends") r = verify_ends(s, o);
  else if (c.which == "metric") r = verify_metric(s, o);
  else r = verify_busemann_closed_form(s, o);
  emit(c, "verify_" + c.which + ".txt", to_text(r), std::cout);
  if (const Check* bad = r.first_failure()) {
    std::cerr << "check failed: " << bad->name << '\n';
    return kCheckFail;
  }
  return kPass;
}

void print_tolerances() {
  for (const auto& row : tolerance_table()) {
    std::string flag = row.name;
    if (flag.size() > 4 && flag.ends_with("_tol")) flag.resize(flag.size() - 4);
    std::cout << row.name << " (--tol-" << flag << ") default = " << row.default_value << ": " << row.meaning << '\n';
  }
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::not_escaping: return kNotEscaping;
    case ErrorKind::no_stabilization: return kCheckFail;
    case ErrorKind::internal: return kInternal;
    default: return kUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distance-like functions on discretized surfaces."};
  app.footer(
      "Exit status: 0 pass, 1 failed check or unconverged limit, 2 usage error or unsupported\n"
      "scenario/verification pairing, 3 sequence does not escape the window, 4 internal error.");
  app.fallthrough();
  app.require_subcommand(0, 1);
  Config c;
  bool help_tolerances = false;
  app.add_flag("--help-tolerances", help_tolerances, "Print the tolerance table and exit");
  app.add_option("--scenario", c.scenario, "Named scenario")->check(CLI::IsMember(scenario_names()));
  app.add_option("--spec", c.spec, "Manifold spec file");
  app.add_option("--window", c.window, "Window radius (scenario default when omitted)")->check(CLI::PositiveNumber);
  app.add_option("--resolution", c.resolution, "Grid resolution (scenario default when omitted)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", c.out, "Output directory (stdout/stderr when omitted)");
  app.add_option("--seed", c.seed, "Seed for sampled start points");
  app.add_option("--backend", c.backend, "Distance backend")->check(CLI::IsMember({"graph", "fast_march"}));
  app.add_option("--tol-limit", c.tol.limit_tol, "limit_tol")->check(CLI::PositiveNumber);
  app.add_option("--tol-grad", c.tol.grad_tol, "grad_tol")->check(CLI::PositiveNumber);
  app.add_option("--tol-ray", c.tol.ray_tol, "ray_tol")->check(CLI::PositiveNumber);
  app.add_option("--tol-shift", c.tol.shift_tol, "shift_tol")->check(CLI::PositiveNumber);
  app.add_option("--tol-eps", c.tol.eps, "eps")->check(CLI::PositiveNumber);
  app.add_option("--tol-semiconcavity", c.tol.semiconcavity_tol, "semiconcavity_tol")->check(CLI::PositiveNumber);
  app.add_option("--tol-path", c.tol.path_tol, "path_tol")->check(CLI::PositiveNumber);

  auto* describe_cmd = app.add_subcommand("describe", "Node count, edge count, window radius and ends");
  auto* dist = app.add_subcommand("dist", "Distance to a source set");
  dist->add_option("--source", c.sources, "u,v[;u,v], 'node i,j', 'ball r' or 'circle z'");
  auto* bus = app.add_subcommand("busemann", "Busemann function of a ray");
  bus->add_option("--direction", c.direction, "Scenario ray name or chart angle in degrees");
  auto* horo = app.add_subcommand("horo", "Horofunction of a point sequence");
  horo->add_option("--points", c.points, "u,v;u,v;... escaping points");
  horo->add_option("--direction", c.direction, "Use the targets of a ray instead");
  auto* dl = app.add_subcommand("dl", "dl-function of a set sequence");
  dl->add_option("--sets", c.sets, "Scenario set sequence family (e.g. circles)");
  dl->add_option("--end", c.end, "End of the set sequence (e.g. up)");
  dl->add_option("--set", c.sources, "Explicit set, repeated, as for --source");
  auto* verify = app.add_subcommand("verify", "Run a verification driver");
  verify->add_option("which", c.which, "Verification")
      ->required()
      ->check(CLI::IsMember({"theorem1", "theorem3", "theorem4", "ends", "metric", "busemann"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  if (help_tolerances) {
    print_tolerances();
    return kPass;
  }
  try {
    if (describe_cmd->parsed()) return cmd_describe(c);
    if (dist->parsed()) return cmd_dist(c);
    if (bus->parsed()) return cmd_busemann(c);
    if (horo->parsed()) return cmd_horo(c);
    if (dl->parsed()) return cmd_dl(c);
    if (verify->parsed()) return cmd_verify(c);
    std::cerr << app.help();
    return kUsage;
  } catch (const Usage& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
}
