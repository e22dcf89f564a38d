#include <doctest.h>

#include <set>

#include "negai/errors.hpp"
#include "negai/geography.hpp"
#include "negai/params.hpp"
#include "negai/types.hpp"

using namespace negai;

TEST_CASE("parameter ledger round-trips through JSON") {
  const auto p = ModelParams::defaults();
  const auto q = ModelParams::from_json(p.to_json());
  CHECK(q.to_json() == p.to_json());
  CHECK(q.to_json().dump() == p.to_json().dump());
}

TEST_CASE("out-of-range parameters are rejected at construction") {
  auto bad = [](const char* key, nlohmann::json v) {
    auto j = ModelParams::defaults().to_json();
    j[key] = v;
    return j;
  };
  CHECK_THROWS_AS(ModelParams::from_json(bad("alpha_mix", 1.5)), ConfigError);
  CHECK_THROWS_AS(ModelParams::from_json(bad("c_max", 0.0)), ConfigError);
  CHECK_THROWS_AS(ModelParams::from_json(bad("ces_exponent", 1.5)), ConfigError);
  CHECK_THROWS_AS(ModelParams::from_json(bad("phi", -1.0)), ConfigError);
  CHECK_THROWS_AS(ModelParams::from_json(bad("shock_probability", 2.0)), ConfigError);
  CHECK_THROWS_AS(ModelParams::from_json(bad("beta_learning", "x")), ConfigError);
  auto j = ModelParams::defaults().to_json();
  j["no_such_parameter"] = 1;
  CHECK_THROWS_AS(ModelParams::from_json(j), ConfigError);
  CHECK_THROWS_AS(ModelParams::from_json(nlohmann::json::array()), ConfigError);
}

TEST_CASE("default geography: 23 wards, five central, well-formed matrices") {
  const auto s = build_initial_state(ModelParams::defaults());
  REQUIRE(s.ward_count() == 23);
  int central = 0;
  std::set<std::string> ids;
  for (const auto& w : s.wards) {
    central += w.is_central;
    ids.insert(w.ward_id);
    CHECK(w.ai_adoption >= 0);
    CHECK(w.ai_adoption <= 1);
    CHECK(w.digital_infrastructure > 0);
    CHECK(w.human_capital > 0);
    CHECK(w.population.young >= 0);
    CHECK(w.population.elderly >= 0);
    for (double e : w.employment_by_industry) CHECK(e >= 0);
  }
  CHECK(central == 5);
  CHECK(ids.size() == 23);
  CHECK_NOTHROW(s.validate());
  CHECK(s.distances.isApprox(s.distances.transpose(), 0.0));
  CHECK(s.distances.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.connectivity.minCoeff() >= 0);
  CHECK(s.connectivity.maxCoeff() <= 1);
  CHECK(ward_index(s, "Shibuya") < 23);
  CHECK_THROWS_AS(ward_index(s, "Atlantis"), ConfigError);
}

TEST_CASE("readiness classes partition the six industries") {
  std::map<std::string, Readiness> r;
  for (const auto& ind : default_industries()) r[ind.industry_id] = ind.ai_readiness;
  REQUIRE(r.size() == 6);
  CHECK(r["IT"] == Readiness::High);
  CHECK(r["Finance"] == Readiness::High);
  CHECK(r["Professional"] == Readiness::High);
  CHECK(r["Manufacturing"] == Readiness::Medium);
  CHECK(r["Healthcare"] == Readiness::Medium);
  CHECK(r["Retail"] == Readiness::Low);
}

TEST_CASE("reference moments match the baseline table") {
  std::map<std::string, IndustryProfile> m;
  for (const auto& ind : default_industries()) m[ind.industry_id] = ind;
  CHECK(m["IT"].baseline_lq == 3.42);
  CHECK(m["IT"].baseline_gini == 0.68);
  CHECK(m["IT"].baseline_ai_rate == 0.347);
  CHECK(m["IT"].primary_ward == "Shibuya");
  CHECK(m["Finance"].baseline_lq == 2.87);
  CHECK(m["Manufacturing"].baseline_lq == 0.78);
  CHECK(m["Healthcare"].baseline_gini == 0.28);
}

TEST_CASE("state validation catches broken invariants") {
  auto s = build_initial_state(ModelParams::defaults());
  auto t = s;
  t.distances(0, 1) += 1;
  CHECK_THROWS_AS(t.validate(), DomainError);
  t = s;
  t.connectivity(2, 3) = 1.2;
  CHECK_THROWS_AS(t.validate(), DomainError);
  t = s;
  t.network_weights = Eigen::MatrixXd::Zero(3, 3);
  CHECK_THROWS_AS(t.validate(), StructuralError);
}

TEST_CASE("initial state is deterministic") {
  const auto a = build_initial_state(ModelParams::defaults());
  const auto b = build_initial_state(ModelParams::defaults());
  CHECK(a.adoption() == b.adoption());
  CHECK(a.employment_matrix() == b.employment_matrix());
}
