#include <doctest.h>

#include <set>

#include "negai/errors.hpp"
#include "negai/panel.hpp"
#include "support.hpp"

using namespace negai;

TEST_CASE("default DGP: 23 x 6 x 24 balanced, staggered, deterministic") {
  DgpConfig d;
  const auto p = generate_panel(d);
  CHECK(p.rows.size() == 23 * 6 * 24);
  CHECK(p.balanced());
  CHECK_NOTHROW(p.validate());
  const auto ix = p.index();
  CHECK(ix.wards.size() == 23);
  CHECK(ix.industries.size() == 6);
  CHECK(ix.years.size() == 24);
  CHECK(p.treated_units() == 13 * 6);
  std::set<int> cohorts;
  for (const auto& r : p.rows)
    if (r.treat_year != kNeverTreated) {
      cohorts.insert(r.treat_year);
      CHECK(r.treat_year >= 2014);
      CHECK(r.treat_year <= 2019);
    }
  CHECK(cohorts.size() > 1);
  CHECK(panel_csv(generate_panel(d)) == panel_csv(p));
  d.seed = 2;
  CHECK(panel_csv(generate_panel(d)) != panel_csv(p));
}

TEST_CASE("planted effects") {
  DgpConfig d;
  PanelRow r;
  r.treat_year = 2015;
  r.readiness = Readiness::Low;
  CHECK(planted_effect(d, r, 2014) == 0.0);
  CHECK(planted_effect(d, r, 2015) == 0.045);
  d.heterogeneous = true;
  CHECK(planted_effect(d, r, 2016) == 0.012);
  d.heterogeneous = false;
  d.dynamic_profile = {0.030, 0.045, 0.058, 0.050, 0.045};
  CHECK(planted_effect(d, r, 2017) == 0.058);
  CHECK(planted_effect(d, r, 2030) == 0.045);
  r.treat_year = kNeverTreated;
  CHECK(planted_effect(d, r, 2030) == 0.0);
}

TEST_CASE("DGP config JSON and validation") {
  DgpConfig d;
  d.effect = 0.07;
  d.dynamic_profile = {0.01, 0.02};
  const auto e = DgpConfig::from_json(d.to_json());
  CHECK(e.to_json() == d.to_json());
  auto j = d.to_json();
  j["bogus"] = 1;
  CHECK_THROWS_AS(DgpConfig::from_json(j), ConfigError);
  DgpConfig bad;
  bad.treated_wards = 30;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = DgpConfig{};
  bad.cohort_last = 2030;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("CSV round trip and malformed input") {
  const auto p = test::tiny_panel(4, 2, 5, 2, 3, 9);
  const auto csv = panel_csv(p);
  CHECK(csv.rfind("ward,industry,year,y,treat_year,infra_quartile,hc_tertile,readiness,infrastructure,human_capital\n", 0) ==
        0);
  CHECK(csv.find(",never,") != std::string::npos);
  const auto q = parse_panel_csv(csv);
  CHECK(panel_csv(q) == csv);

  try {
    parse_panel_csv(csv.substr(0, csv.find('\n') + 1) + "w0,i0,notayear,0.1,never,1,1,High,0,0\n");
    FAIL("expected an input error");
  } catch (const InputError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_panel_csv("a,b\n1,2\n"), InputError);
}

TEST_CASE("validation catches gaps, duplicates and shifting treatment") {
  auto p = test::tiny_panel(3, 1, 4, 1, 2, 1);
  auto gap = p;
  gap.rows.erase(gap.rows.begin() + 1);
  CHECK_THROWS_AS(gap.validate(), InputError);
  auto dup = p;
  dup.rows.push_back(dup.rows.front());
  CHECK_THROWS_AS(dup.validate(), InputError);
  auto shift = p;
  shift.rows[1].treat_year = 2001;
  CHECK_THROWS_AS(shift.validate(), InputError);
  auto unbalanced = p;
  unbalanced.rows.erase(unbalanced.rows.end() - 1);
  CHECK_NOTHROW(unbalanced.validate());
  CHECK_FALSE(unbalanced.balanced());
}
