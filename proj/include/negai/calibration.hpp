// Fitting the synthetic 2000 geography so that the simulated 2019 cross-section
// reproduces the reference concentration moments.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "negai/metrics.hpp"
#include "negai/params.hpp"

namespace negai {

struct IndustryTarget {
  std::string industry_id;
  double location_quotient = 1;
  double gini = 0;
  double hhi = 0;
  double ai_adoption_rate = 0;  // fraction
};

struct CalibrationTargets {
  int year = 2019;
  std::vector<IndustryTarget> industries;
  double gini_tolerance = 0.05;
  double lq_tolerance = 0.1;
  double adoption_tolerance = 0.02;

  static CalibrationTargets from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// The shipped 2019 reference moments.
CalibrationTargets reference_targets();
CalibrationTargets load_targets(const std::string& path);

// Concentration report of the baseline run at `year`.
ConcentrationReport simulated_moments(const ModelParams& params, int year);
// Targets equal to the simulator's own output.
CalibrationTargets targets_from_report(const ConcentrationReport& report);

struct MomentFit {
  std::string industry_id;
  std::string moment;  // location_quotient | gini | hhi | ai_adoption_rate
  double target = 0;
  double achieved = 0;
  double tolerance = 0;  // 0 when the moment carries no acceptance band
  double abs_error() const;
  bool within() const;
};

// Squared relative deviations; HHI enters with a small weight.
double calibration_loss(const ConcentrationReport& sim, const CalibrationTargets& targets);
std::vector<MomentFit> moment_fits(const ConcentrationReport& sim, const CalibrationTargets& targets);

struct CalibrationOptions {
  int max_sweeps = 60;
  double min_step = 1e-4;
  double loss_tolerance = 1e-12;
};

struct CalibrationResult {
  ModelParams params;
  double loss = 0;
  double initial_loss = 0;
  int sweeps = 0;
  int evaluations = 0;
  std::vector<MomentFit> fits;
  bool converged = false;  // every banded moment within tolerance

  // Moments sorted by error relative to tolerance, worst first.
  std::vector<MomentFit> worst(std::size_t n) const;
  nlohmann::json report() const;
};

// Coordinate descent over the per-industry knobs central_tilt,
// anchor_decay_km and adoption_seed.
CalibrationResult calibrate_baseline(const CalibrationTargets& targets, const ModelParams& init,
                                     const CalibrationOptions& options = {});

}  // namespace negai
