// The 3x3x3 scenario grid, 2024-2050 projections and the aging offset.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "negai/demography.hpp"
#include "negai/dynamics.hpp"
#include "negai/params.hpp"

namespace negai {

enum class AiPolicy { Conservative, Moderate, Aggressive };
enum class EconomyRegime { CrisisProne, Baseline, Stable };

std::string to_string(AiPolicy p);
std::string to_string(EconomyRegime e);
AiPolicy ai_policy_from_string(const std::string& s);
EconomyRegime economy_from_string(const std::string& s);

struct Scenario {
  std::string id;  // e.g. "medium-moderate-baseline"
  Fertility demographic = Fertility::Medium;
  AiPolicy ai_policy = AiPolicy::Moderate;
  EconomyRegime economy = EconomyRegime::Baseline;
  std::size_t index = 0;  // position in the grid
  std::string tag;        // "pessimistic", "baseline", "optimistic" or empty
};

// Demographic-major Cartesian product; 27 entries.
std::vector<Scenario> build_grid();
const Scenario& find_scenario(const std::vector<Scenario>& grid, const std::string& id_or_tag);

struct PolicyLevers {
  double adoption_multiplier = 1.0;     // scales the logistic adoption rate
  double infrastructure_growth = 0.02;  // yearly growth of D
};

struct EconomyLevers {
  double shock_probability = 0.0;
  double shock_magnitude = 0.05;
  double shock_persistence = 0.7;
};

// Frozen lever magnitudes and seeds for the grid.
struct ScenarioManifest {
  int start_year = 2024;
  int end_year = kProjectionEndYear;
  std::uint64_t seed = 2024;
  std::map<AiPolicy, PolicyLevers> policy;
  std::map<Fertility, RegimeSpec> demographic;
  std::map<EconomyRegime, EconomyLevers> economy;

  // Untuned starting point for calibrate_manifest.
  static ScenarioManifest prior();
  // Levers frozen from calibrate_manifest(ModelParams::defaults(), prior()).
  static ScenarioManifest defaults();
  static ScenarioManifest from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
};

ScenarioManifest load_manifest(const std::string& path);

// Calibrated parameters with the scenario's levers applied.
ModelParams scenario_params(const Scenario& s, const ModelParams& calibrated, const ScenarioManifest& m);
DemographicPath scenario_demography(const Scenario& s, const ModelParams& calibrated, const ScenarioManifest& m);

// Baseline history run from 2000 up to the manifest start year.
EconomyState initial_projection_state(const ModelParams& calibrated, const ScenarioManifest& m);

struct ScenarioOutcome {
  std::string scenario_id;
  std::string tag;
  double delta_concentration_pct = 0;
  double delta_productivity_pct = 0;
  double delta_employment_pct = 0;
  double final_mean_adoption = 0;
  std::vector<YearMetrics> series;
};

ScenarioOutcome summarize(const Scenario& s, const Trajectory& t);

ScenarioOutcome project(const Scenario& s, const ModelParams& calibrated, const EconomyState& initial,
                        const ScenarioManifest& m);
// Same scenario with every adoption share pinned to zero from the start.
Trajectory project_without_ai(const Scenario& s, const ModelParams& calibrated, const EconomyState& initial,
                              const ScenarioManifest& m);
Trajectory project_trajectory(const Scenario& s, const ModelParams& calibrated, const EconomyState& initial,
                              const ScenarioManifest& m);

struct AgingOffset {
  double fraction = 0;  // unclipped
  double reported = 0;  // clipped to [0, 1.5]
  bool out_of_range = false;
};

// (P_ai - P_no_ai) / (P_base - P_no_ai) at the final year, with P_base the
// no-AI run's first-year productivity; all three are deflated by the shock level.
AgingOffset aging_offset(const Trajectory& no_ai_run, const Trajectory& ai_run);

struct GridResult {
  std::vector<Scenario> scenarios;
  std::vector<std::optional<ScenarioOutcome>> outcomes;  // nullopt on failure
  std::vector<std::string> errors;                       // per scenario, empty on success
  std::map<Fertility, AgingOffset> offsets;              // Aggressive policy, Baseline economy
  std::map<Fertility, std::string> offset_errors;
};

// Runs every scenario whose id or tag contains `filter` (all if empty), in
// parallel. Failures are isolated per scenario.
GridResult run_grid(const ModelParams& calibrated, const ScenarioManifest& m, const std::string& filter = "",
                    bool with_offsets = true);

// Headline targets the scenario levers are fitted to.
struct ScenarioTargets {
  double pessimistic_concentration = -25;  // percent
  double pessimistic_productivity = -18;
  double optimistic_concentration = 19;
  double optimistic_productivity = 43;
  double baseline_concentration = 0;
  double medium_offset = 0.7;
  double tolerance_pct = 5;
  double offset_low = 0.6, offset_high = 0.8;
};

struct HeadlineResult {
  ScenarioOutcome pessimistic, baseline, optimistic;
  AgingOffset medium_offset;
  // Pessimistic < Baseline < Optimistic in productivity change.
  bool monotone() const;
  bool within(const ScenarioTargets& t) const;
};

HeadlineResult evaluate_headlines(const ModelParams& calibrated, const ScenarioManifest& m);

struct ManifestFit {
  ScenarioManifest manifest;
  HeadlineResult headlines;
  int evaluations = 0;
  bool converged = false;  // every headline within tolerance
  nlohmann::json report() const;
};

// Levenberg-Marquardt on the policy and demographic levers (Moderate policy,
// Medium elderly share and the economy regimes stay fixed), with a weak
// prior towards the starting manifest.
ManifestFit calibrate_manifest(const ModelParams& calibrated, const ScenarioManifest& start,
                               const ScenarioTargets& targets = {});

std::string outcomes_csv(const GridResult& g);
std::string series_csv(const ScenarioOutcome& o);
std::string offsets_csv(const GridResult& g);

}  // namespace negai
