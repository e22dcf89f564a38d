#include "negai/network.hpp"

#include <cmath>
#include <sstream>

#include "negai/errors.hpp"
#include "negai/io.hpp"
#include "negai/mechanisms.hpp"

namespace negai {
namespace {

SpatialGraph empty_graph(const EconomyState& s, GraphKind kind) {
  SpatialGraph g;
  g.kind = kind;
  g.year = s.year;
  const auto n = s.wards.size();
  for (const auto& w : s.wards) {
    g.node_ids.push_back(w.ward_id);
    g.layout.push_back(w.position);
    g.adoption.push_back(w.ai_adoption);
  }
  g.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  return g;
}

void collect_edges(SpatialGraph& g) {
  const auto n = g.weights.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (g.weights(i, j) > 0)
        g.edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), g.weights(i, j)});
}

}  // namespace

std::string to_string(GraphKind k) {
  switch (k) {
    case GraphKind::Physical: return "physical";
    case GraphKind::Virtual: return "virtual";
    case GraphKind::Combined: return "combined";
  }
  return "physical";
}

std::vector<int> SpatialGraph::degree() const {
  std::vector<int> d(node_count(), 0);
  for (const auto& e : edges) {
    ++d[e.source];
    ++d[e.target];
  }
  return d;
}

std::vector<double> SpatialGraph::strength() const {
  std::vector<double> s(node_count(), 0.0);
  for (const auto& e : edges) {
    s[e.source] += e.weight;
    s[e.target] += e.weight;
  }
  return s;
}

double SpatialGraph::total_strength() const {
  double t = 0;
  for (const auto& e : edges) t += e.weight;
  return t;
}

SpatialGraph build_physical_graph(const EconomyState& s, double threshold, const ModelParams& p) {
  if (!(threshold > 0)) throw ConfigError("distance threshold must be positive");
  auto g = empty_graph(s, GraphKind::Physical);
  const auto n = g.weights.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = s.distances(i, j);
      if (d > 0 && d <= threshold) g.weights(i, j) = g.weights(j, i) = std::pow(d, -p.phi);
    }
  collect_edges(g);
  return g;
}

SpatialGraph build_virtual_graph(const EconomyState& s, const ModelParams& p) {
  auto g = empty_graph(s, GraphKind::Virtual);
  const auto n = g.weights.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      g.weights(i, j) = g.weights(j, i) =
          virtual_agglomeration(s.wards[i].ai_adoption, s.wards[j].ai_adoption, s.connectivity(i, j), p);
  collect_edges(g);
  return g;
}

SpatialGraph build_combined_graph(const EconomyState& s, const ModelParams& p) {
  const double dmax = s.distances.maxCoeff();
  auto g = build_physical_graph(s, dmax > 0 ? dmax : 1.0, p);
  g.weights += build_virtual_graph(s, p).weights;
  g.kind = GraphKind::Combined;
  g.edges.clear();
  collect_edges(g);
  return g;
}

nlohmann::json to_node_link(const SpatialGraph& g) {
  const auto strength = g.strength();
  const auto degree = g.degree();
  nlohmann::json nodes = nlohmann::json::array(), links = nlohmann::json::array();
  for (std::size_t i = 0; i < g.node_count(); ++i)
    nodes.push_back({{"id", g.node_ids[i]},
                     {"x_km", g.layout[i].x_km},
                     {"y_km", g.layout[i].y_km},
                     {"ai_adoption", g.adoption[i]},
                     {"degree", degree[i]},
                     {"strength", strength[i]}});
  for (const auto& e : g.edges)
    links.push_back({{"source", g.node_ids[e.source]}, {"target", g.node_ids[e.target]}, {"weight", e.weight}});
  return {{"kind", to_string(g.kind)}, {"year", g.year}, {"directed", false},
          {"nodes", nodes},           {"links", links}};
}

std::string edge_list_csv(const SpatialGraph& g) {
  std::ostringstream out;
  out << "kind,year,source,target,weight\n";
  for (const auto& e : g.edges)
    out << to_string(g.kind) << ',' << g.year << ',' << g.node_ids[e.source] << ',' << g.node_ids[e.target]
        << ',' << fmt_double(e.weight) << '\n';
  return out.str();
}

double distance_slope(const EconomyState& s, const ModelParams& p) {
  const auto n = s.distances.rows();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = s.distances(i, j);
      if (!(d > 0)) throw DomainError("distance_slope: nonpositive distance between distinct wards");
      const double v =
          virtual_agglomeration(s.wards[i].ai_adoption, s.wards[j].ai_adoption, s.connectivity(i, j), p);
      const double x = std::log(d), y = std::log(std::pow(d, -p.phi) + v);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      m += 1;
    }
  if (m < 2) throw UndefinedError("distance_slope: fewer than two ward pairs");
  const double vx = sxx - sx * sx / m;
  if (!(vx > 1e-12 * std::max(1.0, sxx))) throw UndefinedError("distance_slope: all distances equal");
  return (sxy - sx * sy / m) / vx;
}

DistanceSensitivity distance_sensitivity(const std::vector<EconomyState>& states, const ModelParams& p) {
  if (states.size() < 5) throw UndefinedError("distance_sensitivity: fewer than 5 years");
  DistanceSensitivity out;
  for (const auto& s : states) {
    out.years.push_back(s.year);
    out.slopes.push_back(distance_slope(s, p));
  }
  // log|b_t| = a + g t; decline = 1 - exp(g).
  double st = 0, sl = 0, stt = 0, stl = 0;
  const double m = static_cast<double>(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    const double b = std::abs(out.slopes[k]);
    if (!(b > 0)) throw UndefinedError("distance_sensitivity: zero slope in year " + std::to_string(out.years[k]));
    const double t = out.years[k], l = std::log(b);
    st += t;
    sl += l;
    stt += t * t;
    stl += t * l;
  }
  const double g = (stl - st * sl / m) / (stt - st * st / m);
  out.relative_decline = 1.0 - std::exp(g);
  return out;
}

DistanceSensitivity distance_sensitivity(const Trajectory& t, const ModelParams& p) {
  return distance_sensitivity(t.states, p);
}

}  // namespace negai
