#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dlab/eikonal.hpp"
#include "dlab/geodesics.hpp"

namespace dlab {

struct LimitOptions {
  /// Default: fast_march on chart-structured manifolds, graph otherwise.
  std::optional<Backend> backend;
  /// <= 0 selects 1e-3 x window radius.
  double limit_tol = 0.0;
  /// Smallest reliable radius accepted as converged; <= 0 selects one stencil reach.
  double min_radius = 0.0;
};

struct LimitReport {
  std::size_t iterates_used = 0;
  double sup_change_last = 0.0;
  double reliable_radius = 0.0;
  bool converged = false;
  double limit_tol = 0.0;
  /// Largest increase of the unnormalized iterate d(., S_k) - d(x0, S_k)
  /// between consecutive iterates on the reliable region.
  double monotonicity_excess = 0.0;
  Backend backend = Backend::graph;
};

struct Limit {
  ScalarField field;
  LimitReport report;
};

double default_limit_tol(const DiscreteManifold& m);
Backend default_limit_backend(const DiscreteManifold& m);

/// Limit of d(., K_n) - d(x0, K_n). Throws not_escaping unless d(x0, K_n)
/// strictly increases.
Limit dl_function(const DiscreteManifold& m, const std::vector<NodeSet>& sets, NodeId x0,
                  const LimitOptions& opts = {});

/// dl_function of singletons.
Limit horofunction(const DiscreteManifold& m, const std::vector<NodeId>& points, NodeId x0,
                   const LimitOptions& opts = {});

/// Horofunction of gamma(t_k) with t_k = T / 2^j doubling up to the certified
/// span T, normalized at x0.
Limit busemann(const DiscreteManifold& m, const Ray& gamma, NodeId x0, const LimitOptions& opts = {});

/// Ray parameters used by busemann.
std::vector<double> busemann_schedule(const DiscreteManifold& m, const Ray& gamma);

/// key=value lines.
std::string to_text(const LimitReport& r);

}  // namespace dlab
