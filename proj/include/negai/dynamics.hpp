// Annual law of motion and trajectories.
#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "negai/demography.hpp"
#include "negai/params.hpp"
#include "negai/types.hpp"

namespace negai {

// Output per worker, ward x industry:
// exp(shock) * (1 + R_i) * F(k_i, L_CES(H_i, floor + a_ik), 1).
Eigen::MatrixXd productivity_per_worker(const EconomyState& state, const ModelParams& params);

// Six-industry output over the 15+ resident population.
double aggregate_productivity(const EconomyState& state, const ModelParams& params);

// Mean virtual access of each ward: (1/(n-1)) sum_j V_ij / c_max.
Eigen::VectorXd virtual_access(const EconomyState& state, const ModelParams& params);

// Attractiveness u_ik including amenities (zero everywhere at t0): log
// productivity, virtual access, a central pull scaled by the young share, and
// own-industry density with elasticity mu_ik - congestion.
Eigen::MatrixXd attractiveness(const EconomyState& state, const ModelParams& params);

// Sets amenities so that attractiveness is identically zero.
void equilibrate_amenities(EconomyState& state, const ModelParams& params);

// Recomputes A, S and N on a state in place.
void refresh_fields(EconomyState& state, const ModelParams& params);

// Zeroes every adoption share (the AI-pinned-off counterfactual).
void pin_adoption_to_zero(EconomyState& state, const ModelParams& params);

// One annual transition t -> t+1.
EconomyState step(const EconomyState& state, const ModelParams& params, const DemographicPath& demo);

struct YearMetrics {
  int year = 0;
  double concentration_index = 0;
  double productivity = 0;
  double employment = 0;          // six industries
  double central_employment_share = 0;
  double aging_index = 0;         // elderly share of 15+ residents
  double mean_adoption = 0;
  double adoption_variance = 0;   // population variance across wards
  double young_central_share = 0; // share of young residents living in central wards
};

YearMetrics year_metrics(const EconomyState& state, const ModelParams& params);

struct Trajectory {
  std::vector<EconomyState> states;
  std::vector<YearMetrics> derived;

  const EconomyState& front() const { return states.front(); }
  const EconomyState& back() const { return states.back(); }
  const EconomyState& at_year(int year) const;
};

// Runs from initial.year to horizon inclusive. Errors from step are rethrown
// with the failing year attached.
Trajectory run(const EconomyState& initial, const ModelParams& params, const DemographicPath& demo,
               int horizon);

// One row per ward-industry-year.
std::string trajectory_csv(const Trajectory& t);
// Per-year aggregates.
nlohmann::json trajectory_summary(const Trajectory& t);

}  // namespace negai
