// Ward x industry x year panels: the CSV schema read by the estimators and a
// planted data-generating process with known effects.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "negai/types.hpp"

namespace negai {

inline constexpr int kNeverTreated = 0;

struct PanelRow {
  std::string ward;
  std::string industry;
  int year = 0;
  double y = 0;
  int treat_year = kNeverTreated;
  int infra_quartile = 1;  // 1 (lowest) .. 4
  int hc_tertile = 1;      // 1 .. 3
  Readiness readiness = Readiness::Medium;
  double infrastructure = 0;  // standardized predetermined infrastructure
  double human_capital = 0;   // standardized ward human capital

  bool treated_at(int t) const { return treat_year != kNeverTreated && t >= treat_year; }
};

// Index maps built once per panel. Units are ward x industry cells; clusters
// are wards.
struct PanelIndex {
  std::vector<std::string> wards, industries;
  std::vector<int> years;
  std::vector<int> ward_of_row, unit_of_row, year_of_row;
  std::vector<int> ward_of_unit;
  std::size_t unit_count = 0;
};

struct PanelDataset {
  std::vector<PanelRow> rows;

  // Throws InputError when years are not contiguous per unit, a unit's
  // treatment year changes, or a ward/industry pair repeats a year.
  void validate() const;
  bool balanced() const;
  PanelIndex index() const;
  std::size_t treated_units() const;
};

struct DgpConfig {
  std::size_t wards = 23;
  int first_year = 2000;
  int years = 24;

  double intercept = 0.366;
  double effect = 0.045;
  // Per-readiness effect (High, Medium, Low); overrides `effect` when set.
  bool heterogeneous = false;
  std::array<double, 3> readiness_effect{0.084, 0.041, 0.012};
  // Effect at event time k = 0, 1, ...; the last entry persists. Overrides
  // `effect` when non-empty.
  std::vector<double> dynamic_profile;
  double hc_interaction = 0.0;  // extra effect per sd of ward human capital

  double ward_fe_sd = 0.05;
  double industry_fe_sd = 0.05;
  double unit_fe_sd = 0.02;
  double year_fe_sd = 0.02;
  double ward_year_sd = 0.06;  // common shock within a ward-year, AR(1)
  double ward_year_rho = 0.0;  // persistence of the ward-year shock
  double noise_sd = 0.01;

  // Staggering: wards ranked by instrument_strength * infrastructure +
  // selection_confounder * u + selection_noise * e; the top `treated_wards`
  // are treated, earlier for higher rank, spread over [cohort_first, cohort_last].
  std::size_t treated_wards = 13;
  int cohort_first = 2014;
  int cohort_last = 2019;
  double instrument_strength = 1.0;
  double selection_confounder = 0.0;
  double selection_noise = 0.5;
  // Outcome loads confounding * u after cohort_first (biases OLS, not IV).
  double confounding = 0.0;
  // Outcome trend per year per unit of centered infrastructure quartile
  // (biases DiD, removed by matching on the quartile).
  double covariate_trend = 0.0;

  std::uint64_t seed = 1;

  void validate() const;  // ConfigError on infeasible schedules
  static DgpConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Deterministic given the config (including seed).
PanelDataset generate_panel(const DgpConfig& dgp);

// The planted effect for a row in a given year (0 before treatment).
double planted_effect(const DgpConfig& dgp, const PanelRow& row, int year);

// CSV header: ward,industry,year,y,treat_year,infra_quartile,hc_tertile,
// readiness,infrastructure,human_capital. treat_year is "never" for controls.
std::string panel_csv(const PanelDataset& panel);
PanelDataset parse_panel_csv(const std::string& text);  // InputError with line
PanelDataset load_panel(const std::string& path);

}  // namespace negai
