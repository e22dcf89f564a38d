// The six model hypotheses, each reduced to one statistic compared against a
// fixed threshold. H1, H3, H4 and H5 read a simulated trajectory; H2 and H6
// read estimates from a planted panel.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "negai/dynamics.hpp"
#include "negai/estimators.hpp"
#include "negai/panel.hpp"
#include "negai/params.hpp"

namespace negai {

// Trend hypotheses need at least this many years of trajectory.
inline constexpr int kMinHypothesisSpan = 10;

struct HypothesisResult {
  int id = 0;
  std::string name;
  std::string statistic_label;
  double statistic = 0;
  double threshold = 0;
  bool supported = false;  // statistic > threshold, and testable
  double p_value = 1;      // one-sided, against the threshold
  bool testable = true;
  std::string note;

  nlohmann::json to_json() const;
};

// Panel-side inputs for H2 and H6.
struct HypothesisEvidence {
  HeterogeneityResult heterogeneity;  // by readiness
  EstimateResult hc_interaction;
};

HypothesisEvidence hypothesis_evidence(const PanelDataset& panel);

// Readiness-heterogeneous plant with an AI x human-capital interaction.
DgpConfig hypothesis_dgp(std::uint64_t seed = 1);

struct HypothesisReport {
  std::vector<HypothesisResult> results;
  int first_year = 0;
  int last_year = 0;

  int supported() const;
  bool all_testable() const;
  nlohmann::json to_json() const;
  std::string table() const;  // fixed-width, one row per hypothesis
};

HypothesisReport validate_hypotheses(const Trajectory& trajectory, const ModelParams& params,
                                     const HypothesisEvidence& evidence);

// Exposure regression behind H3: log output per worker on own adoption and
// network-weighted neighbour adoption, ward and year effects, CR1 by ward.
struct NetworkExposureFit {
  double own = 0;
  double network = 0;
  double own_se = 0;
  double network_se = 0;
  double difference_se = 0;  // se of network - own
  std::size_t n_obs = 0;
};

NetworkExposureFit network_exposure_fit(const Trajectory& trajectory, const ModelParams& params);

// Log-linear trend log v_t = a + g t by OLS, with the classical se of g.
struct LogTrend {
  double slope = 0;
  double se = 0;
};

LogTrend log_trend(const std::vector<int>& years, const std::vector<double>& values);

}  // namespace negai
