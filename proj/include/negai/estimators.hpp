// The five causal estimators (DiD, event study, synthetic control, IV, PSM),
// subgroup heterogeneity, and the pooled effects table.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "negai/panel.hpp"
#include "negai/regression.hpp"

namespace negai {

enum class Method { DiD, EventStudy, SyntheticControl, IV, PSM };

inline constexpr Method kMethods[] = {Method::DiD, Method::EventStudy, Method::SyntheticControl, Method::IV,
                                      Method::PSM};

std::string to_string(Method m);  // display label
std::string method_tag(Method m);  // did, event_study, synthetic_control, iv, psm
Method method_from_string(const std::string& s);  // accepts tags; ConfigError otherwise

struct EstimateResult {
  std::string method;
  double effect = 0;
  double se = 0;
  double ci_lower = 0;
  double ci_upper = 0;
  double p_value = 1;
  std::size_t n_obs = 0;
  nlohmann::json diagnostics = nlohmann::json::object();
  std::string error;  // non-empty when the estimator failed

  bool ok() const { return error.empty(); }
  bool covers(double value) const { return ok() && ci_lower <= value && value <= ci_upper; }
  nlohmann::json to_json() const;
};

// effect +- 1.96 se and the two-sided normal p-value.
EstimateResult make_estimate(std::string method, double effect, double se, std::size_t n_obs);

struct EstimatorSpec {
  int window_min = -5;  // event-time window; endpoints bin everything beyond
  int window_max = 10;
  int instrument_year = 2014;  // IV instrument: infrastructure x 1[year >= this]
  double caliper = 0.05;       // PSM, propensity scale, strict
  int bootstrap_draws = 200;   // PSM ward-cluster bootstrap
  // PSM propensity covariates, entered as category dummies: any of
  // infra_quartile, hc_tertile, readiness.
  std::vector<std::string> psm_covariates{"infra_quartile"};
  double sc_tolerance = 1e-10;  // projected-gradient norm
  double sc_rmse_cap = 0.05;    // pre-period fit above this gets a warning
  std::uint64_t seed = 1;
};

// TWFE with unit (ward x industry) and year effects, CR1 by ward.
EstimateResult estimate_did(const PanelDataset& panel, const EstimatorSpec& spec = {});

struct EventCoefficient {
  int k = 0;
  bool missing = false;   // empty cell: reported, not imputed
  bool reference = false; // k = -1, fixed at 0
  double beta = 0;
  double se = 0;
  double ci_lower = 0;
  double ci_upper = 0;
  std::size_t n_obs = 0;  // treated observations in the cell
};

struct EventStudyResult {
  std::vector<EventCoefficient> coefficients;  // window_min..window_max
  WaldTest pre_trend;  // joint test of k < -1
  EstimateResult aggregate;  // observation-weighted mean of k >= 0

  const EventCoefficient& at(int k) const;
};

EventStudyResult estimate_event_study(const PanelDataset& panel, const EstimatorSpec& spec = {});

enum class Grouping { Readiness, Infrastructure, HumanCapital };

struct SubgroupEffect {
  std::string label;
  double effect = 0;
  double se = 0;
  double p_value = 1;
  std::size_t n_obs = 0;  // observations in the subgroup
};

struct HeterogeneityResult {
  Grouping grouping = Grouping::Readiness;
  std::vector<SubgroupEffect> groups;
  WaldTest equality;  // all subgroup effects equal
  double coefficient_of_variation() const;
};

// Infrastructure groups: bottom quartile, middle two, top quartile.
HeterogeneityResult estimate_heterogeneity(const PanelDataset& panel, Grouping grouping);

// Coefficient on treatment x standardized human capital, TWFE, CR1.
EstimateResult estimate_hc_interaction(const PanelDataset& panel);

// 2SLS with infrastructure x post(instrument_year) as instrument.
EstimateResult estimate_iv(const PanelDataset& panel, const EstimatorSpec& spec = {});
// Same with a caller-supplied instrument, one value per panel row.
EstimateResult estimate_iv(const PanelDataset& panel, const Eigen::VectorXd& instrument);

// Logit propensity on covariate category dummies, exact match on
// industry, 1-NN with replacement within the caliper; long-difference ATT.
EstimateResult estimate_psm(const PanelDataset& panel, const EstimatorSpec& spec = {});

struct SyntheticWeights {
  Eigen::VectorXd weights;
  double pre_rmse = 0;
  int iterations = 0;
  bool converged = false;
};

// Simplex-constrained least squares min |D w - t|^2 by accelerated projected
// gradient. Columns of D are donors, rows are pre-period years.
SyntheticWeights fit_synthetic_weights(const Eigen::MatrixXd& donors, const Eigen::VectorXd& treated,
                                       double tolerance = 1e-10);

// One treated ward against never-treated donors (ward means over industries,
// each series centered on its pre-period mean).
EstimateResult estimate_synthetic_control(const PanelDataset& panel, const std::string& treated_ward,
                                          const EstimatorSpec& spec = {});
// Mean over all treated wards; SE combines a jackknife over treated wards with
// the donor noise the synthetics share.
EstimateResult estimate_synthetic_control(const PanelDataset& panel, const EstimatorSpec& spec = {});

EstimateResult estimate(Method m, const PanelDataset& panel, const EstimatorSpec& spec = {});

struct EffectsTable {
  std::vector<EstimateResult> rows;
  EstimateResult average;  // column means over successful rows

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

// Runs the selected methods (failures recorded per row) and the average row.
EffectsTable estimate_table(const PanelDataset& panel, const std::vector<Method>& methods,
                            const EstimatorSpec& spec = {});

}  // namespace negai
