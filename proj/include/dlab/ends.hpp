#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dlab/geodesics.hpp"
#include "dlab/ideal_boundary.hpp"

namespace dlab {

/// Components of the complement of closed balls about a base node. Only
/// components touching a cut node are kept (the unbounded ones).
struct EndPartition {
  NodeId base = 0;
  std::vector<double> radii;
  /// Graph distance from the base.
  std::vector<double> distance;
  /// Per radius, per node: component label or -1.
  std::vector<std::vector<int>> labels;
  std::vector<int> counts;
  /// refinement[k][c]: label at radius k-1 containing component c at radius
  /// k; refinement[0] is empty.
  std::vector<std::vector<int>> refinement;
  bool stabilized = false;
  /// Count at the largest radius (valid as the end count when stabilized).
  int stabilized_count = 0;
  /// Named ray tails and their end label at the largest radius.
  std::vector<std::pair<std::string, int>> tail_map;
};

/// Stabilized when the last two counts agree and the last refinement map is
/// a bijection. Needs at least 3 increasing radii.
EndPartition end_partition(const DiscreteManifold& m, NodeId x0, const std::vector<double>& radii);

/// Per radius: label of the ray tail beyond that radius. Throws
/// invalid_input when the certified ray does not leave the largest ball.
std::vector<int> tail_labels(const EndPartition& e, const Ray& ray);

/// Records the tail label of `ray` under `name`; returns it.
int assign_tail(EndPartition& e, std::string name, const Ray& ray);

/// Tails lie in the same component at every tested radius.
bool cofinal(const Ray& a, const Ray& b, const EndPartition& e);

struct CofinalityViolation {
  NodeId start = 0;
  /// Index of the first radius at which the tails separate.
  std::size_t radius_index = 0;
};

struct CofinalityReport {
  std::size_t checked = 0;
  /// Starts whose coray left no certified tail past the largest ball.
  std::size_t too_short = 0;
  /// Corays that fell back to a single segment (see CorayResult::stabilized).
  std::size_t unstabilized = 0;
  std::vector<CofinalityViolation> violations;

  bool pass() const { return checked > 0 && violations.empty() && too_short == 0; }
};

/// Traces the primary coray to gamma from each start and compares tails.
CofinalityReport verify_coray_cofinality(const DiscreteManifold& m, const Ray& gamma, const NodeSet& starts,
                                         const EndPartition& e);

struct EndsInequality {
  int ends = 0;
  int clusters = 0;
  Clustering clustering;

  bool pass() const { return ends >= 1 && ends <= clusters; }
};

EndsInequality verify_ends_inequality(const EndPartition& e, const std::vector<BoundaryPoint>& sample,
                                      const CompactExhaustion& ex, double eps);

/// Lines: radius, count, refinement map, then ray tails.
void write_partition(std::ostream& os, const EndPartition& e);

}  // namespace dlab
