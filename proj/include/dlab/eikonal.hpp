#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dlab/manifold.hpp"

namespace dlab {

enum class FieldSource { distance_to_set, busemann, horofunction, dl, min_combination, external };

const char* to_string(FieldSource s);

/// Real values on the node set with a declared reliable region.
struct ScalarField {
  std::vector<double> values;
  FieldSource source = FieldSource::external;
  std::vector<char> reliable;
  std::optional<NodeId> base_node;
  std::string label;

  std::size_t size() const { return values.size(); }
  bool is_reliable(NodeId p) const { return reliable[p] != 0; }
  std::size_t reliable_count() const;
  double operator[](NodeId p) const { return values[p]; }

  /// Field with every node reliable.
  static ScalarField from_values(std::vector<double> values, std::string label = {},
                                 FieldSource source = FieldSource::external);
};

struct DistanceField : ScalarField {
  NodeSet source_set;
};

enum class Backend { graph, fast_march };

const char* to_string(Backend b);

/// Exact multi-source shortest-path distance on the graph.
DistanceField distance_to_set(const DiscreteManifold& m, const NodeSet& sources);

/// Symmetric graph distance (always solved from the smaller index).
double pairwise_distance(const DiscreteManifold& m, NodeId x, NodeId y);

/// First-order upwind solution of |grad u|_g = 1 with u = 0 on the sources.
/// Works chart by chart across glued seams; requires g12 = 0.
/// Optional source_values (parallel to sources, >= 0) seed the front with
/// known values, e.g. exact distances in a small ball around a point source.
DistanceField fast_march(const DiscreteManifold& m, const NodeSet& sources,
                         std::span<const double> source_values = {});

DistanceField distance_with(Backend backend, const DiscreteManifold& m, const NodeSet& sources);

/// Steepest one-sided decrease rate max_q (f(p) - f(q)) / |pq|, clipped at 0.
std::vector<double> upwind_gradient_norm(const DiscreteManifold& m, const ScalarField& f);

/// Best descent and ascent difference quotients over incident edges.
struct LocalSlope {
  double descent = 0.0;
  NodeId descent_to = 0;
  double ascent = 0.0;
  NodeId ascent_to = 0;
};

LocalSlope local_slope(const DiscreteManifold& m, const ScalarField& f, NodeId p);

/// Reliable nodes off the cut whose neighbours are all reliable.
std::vector<char> reliable_interior(const DiscreteManifold& m, const ScalarField& f);

/// Copy shifted so that f(x0) = 0 exactly.
ScalarField normalized(const ScalarField& f, NodeId x0);

/// Rows: node_id,u,v,value,reliable ordered by node_id.
void write_field_csv(std::ostream& os, const DiscreteManifold& m, const ScalarField& f);

/// Shortest decimal that round-trips; "0" for either signed zero.
std::string format_real(double x);

}  // namespace dlab
