// Physical-proximity and AI-enabled virtual interaction graphs over wards.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "negai/dynamics.hpp"
#include "negai/params.hpp"
#include "negai/types.hpp"

namespace negai {

enum class GraphKind { Physical, Virtual, Combined };

std::string to_string(GraphKind k);

struct GraphEdge {
  std::size_t source = 0;  // source < target
  std::size_t target = 0;
  double weight = 0;
};

struct SpatialGraph {
  GraphKind kind = GraphKind::Physical;
  int year = 0;
  std::vector<std::string> node_ids;
  std::vector<Position> layout;
  std::vector<double> adoption;  // node color field
  Eigen::MatrixXd weights;       // symmetric, zero diagonal
  std::vector<GraphEdge> edges;  // positive weights only, row-major order

  std::size_t node_count() const { return node_ids.size(); }
  std::vector<int> degree() const;
  // Weighted degree; exported as the node's connectivity.
  std::vector<double> strength() const;
  double total_strength() const;  // sum over edges
};

// Edges d_ij^-phi for every pair with d_ij <= threshold.
SpatialGraph build_physical_graph(const EconomyState& state, double distance_threshold_km,
                                  const ModelParams& params);
// Edges V_ij from the virtual-agglomeration mechanism, wherever positive.
SpatialGraph build_virtual_graph(const EconomyState& state, const ModelParams& params);
// Physical (unthresholded) plus virtual weights: the exported connection strength.
SpatialGraph build_combined_graph(const EconomyState& state, const ModelParams& params);

nlohmann::json to_node_link(const SpatialGraph& g);
std::string edge_list_csv(const SpatialGraph& g);

struct DistanceSensitivity {
  std::vector<int> years;
  std::vector<double> slopes;  // d log(interaction) / d log(distance)
  // Relative yearly decline of |slope| from a log-linear trend; positive when
  // distance matters less over time.
  double relative_decline = 0;
};

// Per year, OLS of log(d^-phi + V) on log d over all ward pairs.
double distance_slope(const EconomyState& state, const ModelParams& params);
DistanceSensitivity distance_sensitivity(const std::vector<EconomyState>& states, const ModelParams& params);
DistanceSensitivity distance_sensitivity(const Trajectory& t, const ModelParams& params);

}  // namespace negai
