#include <doctest.h>

#include <cmath>

#include "negai/hypotheses.hpp"
#include "negai/geography.hpp"

using namespace negai;

namespace {

Trajectory history(const ModelParams& p, int horizon = 2023) {
  return run(build_initial_state(p), p, DemographicPath::historical(p), horizon);
}

}  // namespace

TEST_CASE("log trend recovers an exact exponential") {
  std::vector<int> years;
  std::vector<double> v;
  for (int y = 2000; y < 2010; ++y) {
    years.push_back(y);
    v.push_back(3.0 * std::exp(0.07 * (y - 2000)));
  }
  const auto t = log_trend(years, v);
  CHECK(t.slope == doctest::Approx(0.07).epsilon(1e-12));
  CHECK(t.se <= 1e-12);
}

TEST_CASE("calibrated run supports all six hypotheses") {
  const auto p = ModelParams::defaults();
  const auto r = validate_hypotheses(history(p), p, hypothesis_evidence(generate_panel(hypothesis_dgp())));
  REQUIRE(r.results.size() == 6);
  for (const auto& h : r.results) {
    INFO("H" << h.id << " " << h.statistic_label << " = " << h.statistic << " vs " << h.threshold);
    CHECK(h.testable);
    CHECK(h.supported);
    CHECK(h.supported == (h.statistic > h.threshold));
  }
  CHECK(r.supported() == 6);
  CHECK(r.first_year == 2000);
  CHECK(r.last_year == 2023);
  CHECK(r.to_json()["hypotheses"].size() == 6);
  CHECK(r.table().find("H6") != std::string::npos);
}

TEST_CASE("switching the mechanisms off breaks H3 and H5") {
  auto p = ModelParams::defaults();
  p.beta_learning = 0;
  p.gamma_network = 0;
  p.lambda = 0;
  const auto r = validate_hypotheses(history(p), p, hypothesis_evidence(generate_panel(hypothesis_dgp())));
  CHECK_FALSE(r.results[2].supported);
  CHECK_FALSE(r.results[4].supported);
}

TEST_CASE("short trajectories leave trend hypotheses untestable") {
  const auto p = ModelParams::defaults();
  const auto r = validate_hypotheses(history(p, 2005), p, hypothesis_evidence(generate_panel(hypothesis_dgp())));
  for (int id : {1, 3, 4, 5}) {
    CHECK_FALSE(r.results[static_cast<std::size_t>(id - 1)].testable);
    CHECK_FALSE(r.results[static_cast<std::size_t>(id - 1)].supported);
  }
  CHECK(r.results[1].testable);
  CHECK(r.results[5].testable);
  CHECK_FALSE(r.all_testable());
}

TEST_CASE("network exposure fit: network effect exceeds own adoption") {
  const auto p = ModelParams::defaults();
  const auto f = network_exposure_fit(history(p), p);
  CHECK(f.n_obs == 23 * 24);
  CHECK(f.own > 0);
  CHECK(f.network > f.own);
  CHECK(f.difference_se > 0);
}
