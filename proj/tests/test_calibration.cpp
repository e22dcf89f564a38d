#include <doctest.h>

#include "negai/calibration.hpp"
#include "negai/errors.hpp"
#include "negai/params.hpp"

using namespace negai;

TEST_CASE("targets round-trip and reject malformed input") {
  const auto t = reference_targets();
  REQUIRE(t.industries.size() == 6);
  const auto u = CalibrationTargets::from_json(t.to_json());
  CHECK(u.to_json() == t.to_json());
  auto j = t.to_json();
  j["industries"][0].erase("gini");
  CHECK_THROWS_AS(CalibrationTargets::from_json(j), ConfigError);
}

TEST_CASE("the simulator's own moments have zero loss") {
  const auto p = ModelParams::defaults();
  const auto r = simulated_moments(p, 2019);
  const auto self = targets_from_report(r);
  CHECK(calibration_loss(r, self) == 0.0);
  for (const auto& f : moment_fits(r, self)) {
    CHECK(f.abs_error() == 0.0);
    CHECK(f.within());
  }
}

TEST_CASE("shipped parameters reproduce the reference moments") {
  const auto p = ModelParams::defaults();
  const auto fits = moment_fits(simulated_moments(p, 2019), reference_targets());
  CHECK(fits.size() == 24);
  for (const auto& f : fits) {
    INFO(f.industry_id << " " << f.moment << " target " << f.target << " achieved " << f.achieved);
    CHECK(f.within());
  }
}

TEST_CASE("moment fits carry the acceptance bands") {
  const auto fits = moment_fits(simulated_moments(ModelParams::defaults(), 2019), reference_targets());
  for (const auto& f : fits) {
    if (f.moment == "gini") CHECK(f.tolerance == 0.05);
    if (f.moment == "location_quotient") CHECK(f.tolerance == 0.1);
    if (f.moment == "ai_adoption_rate") CHECK(f.tolerance == 0.02);
    if (f.moment == "hhi") CHECK(f.tolerance == 0.0);
  }
}

TEST_CASE("a perturbed start is pulled back toward the targets") {
  auto p = ModelParams::defaults();
  for (auto& k : p.industries) k.central_tilt += 0.3;
  const auto targets = reference_targets();
  CalibrationOptions opt;
  opt.max_sweeps = 3;
  const auto res = calibrate_baseline(targets, p, opt);
  CHECK(res.loss < res.initial_loss);
  CHECK(res.evaluations > 0);
  CHECK(res.fits.size() == 24);
  const auto worst = res.worst(3);
  REQUIRE(worst.size() == 3);
  CHECK(res.report().contains("moments"));
}

TEST_CASE("calibration is deterministic") {
  auto p = ModelParams::defaults();
  p.industries[0].adoption_seed *= 1.5;
  CalibrationOptions opt;
  opt.max_sweeps = 1;
  const auto a = calibrate_baseline(reference_targets(), p, opt);
  const auto b = calibrate_baseline(reference_targets(), p, opt);
  CHECK(a.params.to_json().dump() == b.params.to_json().dump());
  CHECK(a.loss == b.loss);
}
