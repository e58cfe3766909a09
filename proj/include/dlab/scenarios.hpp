#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dlab/boundary_functions.hpp"
#include "dlab/ends.hpp"
#include "dlab/ideal_boundary.hpp"
#include "dlab/viscosity_checks.hpp"

namespace dlab {

/// A ray named by its end, traced from `origin` toward `targets`.
struct RaySpec {
  std::string name;
  std::string end;
  NodeId origin = 0;
  std::vector<NodeId> targets;
  /// Part of the Busemann sample for the ends inequality.
  bool sample = true;
};

/// A named set sequence escaping into one end, for dl-fields.
struct SetSequence {
  std::string name;
  std::string end;
  std::vector<NodeSet> sets;
};

struct ScenarioOptions {
  /// <= 0 selects the scenario default.
  double window = 0.0;
  /// Grid nodes per axis (plane) or around the narrowest tube; <= 0 selects the default.
  int resolution = 0;
};

struct Scenario {
  std::string name;
  DiscreteManifold manifold;
  NodeId base = 0;
  double window = 0.0;
  int resolution = 0;
  int known_ends = 0;
  int known_minfty_lower_bound = 0;
  bool expected_c1_solution_exists = false;
  std::vector<double> end_radii;
  /// Clustering threshold for rho_quotient.
  double eps = 0.0;
  /// Compact core (pants) or cap region (capped half-cylinder); empty otherwise.
  std::vector<char> core;
  std::vector<RaySpec> rays;
  std::vector<SetSequence> set_sequences;
  /// Nodes near cone points of the metric (pants); viscosity checks skip them.
  std::vector<char> excluded;
  /// Backend for every limit field of the scenario.
  Backend backend = Backend::fast_march;
  /// Region from which coray starts are drawn.
  double start_radius = 0.0;
};

std::vector<std::string> scenario_names();

/// Throws invalid_input for unknown names or unusable options.
Scenario make_scenario(std::string_view name, const ScenarioOptions& opts = {});

Ray trace(const Scenario& s, const RaySpec& r);

/// Every tolerance the verification drivers use; <= 0 selects the default.
struct Tolerances {
  double limit_tol = 0.0;
  double grad_tol = 0.0;
  double ray_tol = 0.0;
  double shift_tol = 1e-4;
  double eps = 0.0;
  double semiconcavity_tol = 0.0;
  double path_tol = 1e-9;
};

struct ToleranceRow {
  std::string name;
  std::string default_value;
  std::string meaning;
};

/// The table printed by --help-tolerances.
std::vector<ToleranceRow> tolerance_table();

struct VerifyOptions {
  std::uint64_t seed = 1;
  Tolerances tol;
};

struct Check {
  std::string name;
  bool pass = false;
  double metric = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct Report {
  std::string verification;
  std::string scenario;
  std::vector<Check> checks;

  bool pass() const;
  /// First failing check, or nullptr.
  const Check* first_failure() const;
};

/// check / status / metric / tolerance / detail lines per check.
void write_report(std::ostream& os, const Report& r);
std::string to_text(const Report& r);

/// Viscosity battery: residual, semiconcavity, reconstruction, level-set
/// identity, min-stability and a convex-kink control.
Report verify_theorem1(const Scenario& s, const VerifyOptions& opts = {});
/// Singleton boundary on the capped half-cylinder; invalid_input elsewhere.
Report verify_theorem3(const Scenario& s, const VerifyOptions& opts = {});
/// Cofinality and singular sets on the pants; invalid_input elsewhere.
Report verify_theorem4(const Scenario& s, const VerifyOptions& opts = {});
/// End count, coray cofinality and the ends inequality.
Report verify_ends(const Scenario& s, const VerifyOptions& opts = {});
/// rho / rho_quotient properties and the connecting path.
Report verify_metric(const Scenario& s, const VerifyOptions& opts = {});

/// Closed-form Busemann check (plane only).
Report verify_busemann_closed_form(const Scenario& s, const VerifyOptions& opts = {});

}  // namespace dlab
