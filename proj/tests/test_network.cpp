#include <doctest.h>

#include <cmath>

#include "negai/dynamics.hpp"
#include "negai/geography.hpp"
#include "negai/mechanisms.hpp"
#include "negai/network.hpp"
#include "support.hpp"

using namespace negai;

TEST_CASE("physical graph: threshold and d^-phi weights") {
  ModelParams p;
  p.phi = 1;
  const auto s = test::line_state(4, 2.0);
  const auto g = build_physical_graph(s, 4.0, p);
  CHECK(g.kind == GraphKind::Physical);
  CHECK(g.node_count() == 4);
  // pairs at 2 km (3) and 4 km (2); 6 km excluded.
  CHECK(g.edges.size() == 5);
  CHECK(g.weights(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g.weights(0, 2) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(g.weights(0, 3) == 0.0);
  CHECK(g.weights.isApprox(g.weights.transpose(), 0.0));
  for (const auto& e : g.edges) CHECK(e.source < e.target);
  const auto deg = g.degree();
  CHECK(deg[0] == 2);
  CHECK(deg[1] == 3);
  double sum = 0;
  for (double x : g.strength()) sum += x;
  CHECK(g.total_strength() == doctest::Approx(sum / 2).epsilon(1e-14));
}

TEST_CASE("virtual graph matches the virtual agglomeration mechanism") {
  const auto p = ModelParams::defaults();
  auto s = test::line_state(3, 1.0);
  s.connectivity.setConstant(0.5);
  s.connectivity.diagonal().setZero();
  CHECK(build_virtual_graph(s, p).edges.empty());
  test::set_adoption(s, {0.1, 0.2, 0.0});
  const auto g = build_virtual_graph(s, p);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.weights(0, 1) == virtual_agglomeration(0.1, 0.2, 0.5, p));
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) CHECK(g.weights(i, j) < p.c_max);
}

TEST_CASE("combined graph adds physical and virtual weights") {
  const auto p = ModelParams::defaults();
  const auto s = build_initial_state(p);
  const auto c = build_combined_graph(s, p);
  const auto v = build_virtual_graph(s, p);
  const auto ph = build_physical_graph(s, 1e9, p);
  CHECK((c.weights - v.weights - ph.weights).cwiseAbs().maxCoeff() <= 1e-12);
  const auto j = to_node_link(c);
  CHECK(j["nodes"].size() == 23);
  CHECK(j["links"].size() == c.edges.size());
  const auto csv = edge_list_csv(c);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(c.edges.size() + 1));
}

TEST_CASE("distance slope without virtual interaction equals -phi") {
  auto p = ModelParams::defaults();
  p.phi = 1.3;
  auto s = build_initial_state(p);
  pin_adoption_to_zero(s, p);
  CHECK(distance_slope(s, p) == doctest::Approx(-1.3).epsilon(1e-10));
}

TEST_CASE("distance matters less as adoption spreads") {
  const auto p = ModelParams::defaults();
  const auto t = run(build_initial_state(p), p, DemographicPath::historical(p), 2023);
  const auto ds = distance_sensitivity(t, p);
  REQUIRE(ds.years.size() == 24);
  CHECK(std::abs(ds.slopes.back()) < std::abs(ds.slopes.front()));
  CHECK(ds.relative_decline > 0);

  auto off = p;
  off.lambda = 0;
  const auto t0 = run(build_initial_state(off), off, DemographicPath::historical(off), 2023);
  CHECK(distance_sensitivity(t0, off).relative_decline == doctest::Approx(0.0).epsilon(1e-12));
}
