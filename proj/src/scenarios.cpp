#include "negai/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "negai/errors.hpp"
#include "negai/geography.hpp"
#include "negai/io.hpp"

namespace negai {
namespace {

constexpr std::array<Fertility, 3> kFertility{Fertility::Low, Fertility::Medium, Fertility::High};
constexpr std::array<AiPolicy, 3> kPolicy{AiPolicy::Conservative, AiPolicy::Moderate, AiPolicy::Aggressive};
constexpr std::array<EconomyRegime, 3> kEconomy{EconomyRegime::CrisisProne, EconomyRegime::Baseline,
                                                EconomyRegime::Stable};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double pct_change(double from, double to) {
  if (!(std::abs(from) > 0)) throw UndefinedError("percentage change from zero");
  return 100.0 * (to / from - 1.0);
}

}  // namespace

std::string to_string(AiPolicy p) {
  switch (p) {
    case AiPolicy::Conservative: return "Conservative";
    case AiPolicy::Moderate: return "Moderate";
    case AiPolicy::Aggressive: return "Aggressive";
  }
  return "Moderate";
}

std::string to_string(EconomyRegime e) {
  switch (e) {
    case EconomyRegime::CrisisProne: return "Crisis-prone";
    case EconomyRegime::Baseline: return "Baseline";
    case EconomyRegime::Stable: return "Stable";
  }
  return "Baseline";
}

AiPolicy ai_policy_from_string(const std::string& s) {
  for (auto p : kPolicy)
    if (to_string(p) == s) return p;
  throw ConfigError("unknown AI policy '" + s + "'");
}

EconomyRegime economy_from_string(const std::string& s) {
  for (auto e : kEconomy)
    if (to_string(e) == s) return e;
  throw ConfigError("unknown economy regime '" + s + "'");
}

std::vector<Scenario> build_grid() {
  std::vector<Scenario> grid;
  for (auto f : kFertility)
    for (auto p : kPolicy)
      for (auto e : kEconomy) {
        Scenario s;
        s.demographic = f;
        s.ai_policy = p;
        s.economy = e;
        s.index = grid.size();
        s.id = lower(to_string(f)) + "-" + lower(to_string(p)) + "-" + lower(to_string(e));
        if (f == Fertility::Low && p == AiPolicy::Conservative && e == EconomyRegime::CrisisProne)
          s.tag = "pessimistic";
        else if (f == Fertility::Medium && p == AiPolicy::Moderate && e == EconomyRegime::Baseline)
          s.tag = "baseline";
        else if (f == Fertility::High && p == AiPolicy::Aggressive && e == EconomyRegime::Stable)
          s.tag = "optimistic";
        grid.push_back(s);
      }
  return grid;
}

const Scenario& find_scenario(const std::vector<Scenario>& grid, const std::string& key) {
  for (const auto& s : grid)
    if (s.id == key || (!s.tag.empty() && s.tag == key)) return s;
  throw ConfigError("no scenario '" + key + "'");
}

ScenarioManifest ScenarioManifest::prior() {
  ScenarioManifest m;
  m.policy = {{AiPolicy::Conservative, {0.5, 0.0}},
              {AiPolicy::Moderate, {1.0, 0.02}},
              {AiPolicy::Aggressive, {2.0, 0.04}}};
  for (auto f : kFertility) m.demographic[f] = default_regime(f);
  m.economy = {{EconomyRegime::CrisisProne, {0.15, 0.05, 0.7}},
               {EconomyRegime::Baseline, {0.05, 0.05, 0.7}},
               {EconomyRegime::Stable, {0.0, 0.05, 0.7}}};
  return m;
}

ScenarioManifest ScenarioManifest::defaults() {
  ScenarioManifest m;
  m.policy = {{AiPolicy::Conservative, {0.166473, 0.0419673}},
              {AiPolicy::Moderate, {1.0, 0.0519673}},
              {AiPolicy::Aggressive, {1.75059, 0.0619673}}};
  m.demographic = {{Fertility::Low, {0.301, 0.151437, 1.0, -0.004}},
                   {Fertility::Medium, {0.405513, 0.273547, 1.0, -0.002}},
                   {Fertility::High, {0.142698, 0.322294, 1.0521, 0.002}}};
  m.economy = {{EconomyRegime::CrisisProne, {0.15, 0.05, 0.7}},
               {EconomyRegime::Baseline, {0.05, 0.05, 0.7}},
               {EconomyRegime::Stable, {0.0, 0.05, 0.7}}};
  return m;
}

void ScenarioManifest::validate() const {
  if (start_year <= kBaseYear || end_year <= start_year || end_year > kProjectionEndYear)
    throw ConfigError("manifest years must satisfy 2000 < start < end <= 2050");
  for (auto p : kPolicy) {
    if (!policy.count(p)) throw ConfigError("manifest lacks policy " + to_string(p));
    const auto& l = policy.at(p);
    if (!(l.adoption_multiplier >= 0) || !(l.infrastructure_growth > -1))
      throw ConfigError("policy levers out of range for " + to_string(p));
  }
  for (auto f : kFertility)
    if (!demographic.count(f)) throw ConfigError("manifest lacks regime " + to_string(f));
  for (auto e : kEconomy) {
    if (!economy.count(e)) throw ConfigError("manifest lacks economy " + to_string(e));
    const auto& l = economy.at(e);
    if (!(l.shock_probability >= 0 && l.shock_probability <= 1) || !(l.shock_magnitude >= 0 && l.shock_magnitude < 1) ||
        !(std::abs(l.shock_persistence) < 1))
      throw ConfigError("economy levers out of range for " + to_string(e));
  }
}

ScenarioManifest ScenarioManifest::from_json(const nlohmann::json& j) {
  ScenarioManifest m = defaults();
  try {
    m.start_year = j.value("start_year", m.start_year);
    m.end_year = j.value("end_year", m.end_year);
    m.seed = j.value("seed", m.seed);
    if (j.contains("ai_policy"))
      for (const auto& [k, v] : j.at("ai_policy").items()) {
        auto& l = m.policy[ai_policy_from_string(k)];
        l.adoption_multiplier = v.value("adoption_multiplier", l.adoption_multiplier);
        l.infrastructure_growth = v.value("infrastructure_growth", l.infrastructure_growth);
      }
    if (j.contains("demographic"))
      for (const auto& [k, v] : j.at("demographic").items()) {
        auto& r = m.demographic[fertility_from_string(k)];
        r.elderly_share_2050 = v.value("elderly_share_2050", r.elderly_share_2050);
        r.young_share_2050 = v.value("young_share_2050", r.young_share_2050);
        r.young_inflow_2050 = v.value("young_inflow_2050", r.young_inflow_2050);
        r.population_growth = v.value("population_growth", r.population_growth);
      }
    if (j.contains("economy"))
      for (const auto& [k, v] : j.at("economy").items()) {
        auto& l = m.economy[economy_from_string(k)];
        l.shock_probability = v.value("shock_probability", l.shock_probability);
        l.shock_magnitude = v.value("shock_magnitude", l.shock_magnitude);
        l.shock_persistence = v.value("shock_persistence", l.shock_persistence);
      }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed scenario manifest: ") + e.what());
  }
  m.validate();
  return m;
}

nlohmann::json ScenarioManifest::to_json() const {
  nlohmann::json pol, dem, eco;
  for (const auto& [k, l] : policy)
    pol[to_string(k)] = {{"adoption_multiplier", l.adoption_multiplier},
                         {"infrastructure_growth", l.infrastructure_growth}};
  for (const auto& [k, r] : demographic)
    dem[to_string(k)] = {{"elderly_share_2050", r.elderly_share_2050},
                         {"young_share_2050", r.young_share_2050},
                         {"young_inflow_2050", r.young_inflow_2050},
                         {"population_growth", r.population_growth}};
  for (const auto& [k, l] : economy)
    eco[to_string(k)] = {{"shock_probability", l.shock_probability},
                         {"shock_magnitude", l.shock_magnitude},
                         {"shock_persistence", l.shock_persistence}};
  return {{"start_year", start_year}, {"end_year", end_year}, {"seed", seed},
          {"ai_policy", pol},         {"demographic", dem},   {"economy", eco}};
}

ScenarioManifest load_manifest(const std::string& path) { return ScenarioManifest::from_json(read_json_file(path)); }

ModelParams scenario_params(const Scenario& s, const ModelParams& calibrated, const ScenarioManifest& m) {
  ModelParams p = calibrated;
  const auto& pol = m.policy.at(s.ai_policy);
  const auto& eco = m.economy.at(s.economy);
  p.adoption_rate = calibrated.adoption_rate * pol.adoption_multiplier;
  p.infrastructure_growth = pol.infrastructure_growth;
  p.shock_probability = eco.shock_probability;
  p.shock_magnitude = eco.shock_magnitude;
  p.shock_persistence = eco.shock_persistence;
  p.seed = derive_seed(m.seed, s.index);
  p.validate();
  return p;
}

DemographicPath scenario_demography(const Scenario& s, const ModelParams& calibrated, const ScenarioManifest& m) {
  return DemographicPath::make(s.demographic, m.demographic.at(s.demographic), calibrated);
}

EconomyState initial_projection_state(const ModelParams& calibrated, const ScenarioManifest& m) {
  m.validate();
  const auto demo = DemographicPath::make(Fertility::Medium, m.demographic.at(Fertility::Medium), calibrated);
  return run(build_initial_state(calibrated), calibrated, demo, m.start_year).back();
}

Trajectory project_trajectory(const Scenario& s, const ModelParams& calibrated, const EconomyState& initial,
                              const ScenarioManifest& m) {
  if (initial.year != m.start_year)
    throw ConfigError("projection state is for " + std::to_string(initial.year) + ", manifest starts " +
                      std::to_string(m.start_year));
  return run(initial, scenario_params(s, calibrated, m), scenario_demography(s, calibrated, m), m.end_year);
}

Trajectory project_without_ai(const Scenario& s, const ModelParams& calibrated, const EconomyState& initial,
                              const ScenarioManifest& m) {
  auto start = initial;
  const auto p = scenario_params(s, calibrated, m);
  pin_adoption_to_zero(start, p);
  return project_trajectory(s, calibrated, start, m);
}

ScenarioOutcome summarize(const Scenario& s, const Trajectory& t) {
  ScenarioOutcome o;
  o.scenario_id = s.id;
  o.tag = s.tag;
  const auto& a = t.derived.front();
  const auto& b = t.derived.back();
  o.delta_concentration_pct = pct_change(a.concentration_index, b.concentration_index);
  o.delta_productivity_pct = pct_change(a.productivity, b.productivity);
  o.delta_employment_pct = pct_change(a.employment, b.employment);
  o.final_mean_adoption = b.mean_adoption;
  o.series = t.derived;
  return o;
}

ScenarioOutcome project(const Scenario& s, const ModelParams& calibrated, const EconomyState& initial,
                        const ScenarioManifest& m) {
  return summarize(s, project_trajectory(s, calibrated, initial, m));
}

AgingOffset aging_offset(const Trajectory& no_ai, const Trajectory& ai) {
  if (no_ai.derived.empty() || ai.derived.empty()) throw UndefinedError("aging offset needs two trajectories");
  if (no_ai.derived.back().year != ai.derived.back().year)
    throw ConfigError("aging offset runs end in different years");
  // Productivity scales with exp(shock_level); deflating keeps transient
  // shocks out of what is meant to be the aging decline.
  auto net = [](const Trajectory& t, bool last) {
    const auto& m = last ? t.derived.back() : t.derived.front();
    const auto& s = last ? t.states.back() : t.states.front();
    return m.productivity * std::exp(-s.shock_level);
  };
  if (no_ai.states.size() != no_ai.derived.size() || ai.states.size() != ai.derived.size())
    throw ConfigError("aging offset needs full trajectories");
  const double base = net(no_ai, false);
  const double p_no = net(no_ai, true);
  const double p_ai = net(ai, true);
  const double decline = base - p_no;
  if (!(std::abs(decline) > 1e-12 * std::abs(base)))
    throw UndefinedError("aging offset undefined: no productivity decline without AI");
  AgingOffset o;
  o.fraction = (p_ai - p_no) / decline;
  o.reported = std::clamp(o.fraction, 0.0, 1.5);
  o.out_of_range = o.fraction < 0.0 || o.fraction > 1.5;
  return o;
}

GridResult run_grid(const ModelParams& calibrated, const ScenarioManifest& m, const std::string& filter,
                    bool with_offsets) {
  m.validate();
  GridResult g;
  const auto grid = build_grid();
  for (const auto& s : grid)
    if (filter.empty() || s.id.find(lower(filter)) != std::string::npos || s.tag == lower(filter))
      g.scenarios.push_back(s);
  g.outcomes.resize(g.scenarios.size());
  g.errors.resize(g.scenarios.size());
  const auto initial = initial_projection_state(calibrated, m);

  // Offset runs: one AI and one no-AI projection per demographic regime.
  std::vector<const Scenario*> offset_cases;
  if (with_offsets)
    for (auto f : kFertility)
      for (const auto& s : grid)
        if (s.demographic == f && s.ai_policy == AiPolicy::Aggressive && s.economy == EconomyRegime::Baseline)
          offset_cases.push_back(&s);
  std::vector<std::optional<AgingOffset>> offsets(offset_cases.size());
  std::vector<std::string> offset_err(offset_cases.size());

  const std::size_t jobs = g.scenarios.size() + offset_cases.size();
  parallel_for(jobs, [&](std::size_t j) {
    if (j < g.scenarios.size()) {
      try {
        g.outcomes[j] = project(g.scenarios[j], calibrated, initial, m);
      } catch (const std::exception& e) {
        g.errors[j] = e.what();
      }
      return;
    }
    const auto k = j - g.scenarios.size();
    const auto& s = *offset_cases[k];
    try {
      offsets[k] = aging_offset(project_without_ai(s, calibrated, initial, m),
                                project_trajectory(s, calibrated, initial, m));
    } catch (const std::exception& e) {
      offset_err[k] = e.what();
    }
  });
  for (std::size_t k = 0; k < offset_cases.size(); ++k) {
    const auto f = offset_cases[k]->demographic;
    if (offsets[k])
      g.offsets[f] = *offsets[k];
    else
      g.offset_errors[f] = offset_err[k];
  }
  return g;
}

std::string outcomes_csv(const GridResult& g) {
  std::ostringstream out;
  out << "scenario,tag,demographic,ai_policy,economy,delta_concentration_pct,delta_productivity_pct,"
         "delta_employment_pct,final_mean_adoption,error\n";
  for (std::size_t i = 0; i < g.scenarios.size(); ++i) {
    const auto& s = g.scenarios[i];
    out << s.id << ',' << s.tag << ',' << to_string(s.demographic) << ',' << to_string(s.ai_policy) << ','
        << to_string(s.economy) << ',';
    if (const auto& o = g.outcomes[i]) {
      out << fmt_double(o->delta_concentration_pct) << ',' << fmt_double(o->delta_productivity_pct) << ','
          << fmt_double(o->delta_employment_pct) << ',' << fmt_double(o->final_mean_adoption) << ",\n";
    } else {
      std::string msg = g.errors[i];
      std::replace(msg.begin(), msg.end(), ',', ';');
      out << ",,,," << msg << '\n';
    }
  }
  return out.str();
}

std::string series_csv(const ScenarioOutcome& o) {
  std::ostringstream out;
  out << "scenario,year,concentration_index,productivity,employment,central_employment_share,aging_index,"
         "mean_adoption,adoption_variance\n";
  for (const auto& m : o.series)
    out << o.scenario_id << ',' << m.year << ',' << fmt_double(m.concentration_index) << ','
        << fmt_double(m.productivity) << ',' << fmt_double(m.employment) << ','
        << fmt_double(m.central_employment_share) << ',' << fmt_double(m.aging_index) << ','
        << fmt_double(m.mean_adoption) << ',' << fmt_double(m.adoption_variance) << '\n';
  return out.str();
}

std::string offsets_csv(const GridResult& g) {
  std::ostringstream out;
  out << "demographic,ai_policy,economy,offset_fraction,reported,out_of_range,error\n";
  for (auto f : kFertility) {
    out << to_string(f) << ",Aggressive,Baseline,";
    if (auto it = g.offsets.find(f); it != g.offsets.end())
      out << fmt_double(it->second.fraction) << ',' << fmt_double(it->second.reported) << ','
          << (it->second.out_of_range ? "true" : "false") << ",\n";
    else if (auto e = g.offset_errors.find(f); e != g.offset_errors.end())
      out << ",,," << e->second << '\n';
    else
      out << ",,,not computed\n";
  }
  return out.str();
}

bool HeadlineResult::monotone() const {
  return pessimistic.delta_productivity_pct < baseline.delta_productivity_pct &&
         baseline.delta_productivity_pct < optimistic.delta_productivity_pct &&
         pessimistic.delta_concentration_pct < baseline.delta_concentration_pct &&
         baseline.delta_concentration_pct < optimistic.delta_concentration_pct;
}

bool HeadlineResult::within(const ScenarioTargets& t) const {
  auto near = [&](double v, double target) { return std::abs(v - target) <= t.tolerance_pct; };
  return near(pessimistic.delta_concentration_pct, t.pessimistic_concentration) &&
         near(pessimistic.delta_productivity_pct, t.pessimistic_productivity) &&
         near(optimistic.delta_concentration_pct, t.optimistic_concentration) &&
         near(optimistic.delta_productivity_pct, t.optimistic_productivity) &&
         near(baseline.delta_concentration_pct, t.baseline_concentration) &&
         medium_offset.fraction >= t.offset_low && medium_offset.fraction <= t.offset_high;
}

HeadlineResult evaluate_headlines(const ModelParams& calibrated, const ScenarioManifest& m) {
  m.validate();
  const auto grid = build_grid();
  const auto initial = initial_projection_state(calibrated, m);
  HeadlineResult h;
  h.pessimistic = project(find_scenario(grid, "pessimistic"), calibrated, initial, m);
  h.baseline = project(find_scenario(grid, "baseline"), calibrated, initial, m);
  h.optimistic = project(find_scenario(grid, "optimistic"), calibrated, initial, m);
  const auto& med = find_scenario(grid, "medium-aggressive-baseline");
  h.medium_offset = aging_offset(project_without_ai(med, calibrated, initial, m),
                                 project_trajectory(med, calibrated, initial, m));
  return h;
}

namespace {

constexpr int kLevers = 13;
constexpr double kPolicyRatio = 1.25;  // minimum adoption ratio between policy levels
constexpr double kPolicyGap = 0.01;    // minimum infrastructure-growth gap
constexpr int kHeadlines = 6;
constexpr double kPriorWeight = 0.05;

Eigen::VectorXd levers_of(const ScenarioManifest& m) {
  Eigen::VectorXd x(kLevers);
  x << std::log(m.policy.at(AiPolicy::Conservative).adoption_multiplier),
      std::log(m.policy.at(AiPolicy::Aggressive).adoption_multiplier),
      m.policy.at(AiPolicy::Conservative).infrastructure_growth,
      m.policy.at(AiPolicy::Aggressive).infrastructure_growth, m.demographic.at(Fertility::Low).young_share_2050,
      m.demographic.at(Fertility::Low).elderly_share_2050, m.demographic.at(Fertility::High).young_share_2050,
      m.demographic.at(Fertility::High).elderly_share_2050,
      std::log(m.demographic.at(Fertility::High).young_inflow_2050),
      m.demographic.at(Fertility::Medium).young_share_2050,
      m.economy.at(EconomyRegime::CrisisProne).shock_magnitude,
      m.demographic.at(Fertility::Medium).elderly_share_2050,
      m.policy.at(AiPolicy::Moderate).infrastructure_growth;
  return x;
}

ScenarioManifest with_levers(ScenarioManifest m, const Eigen::VectorXd& x, double elderly_2023) {
  auto clampv = [](double v, double lo, double hi) { return std::clamp(v, lo, hi); };
  // Levels stay ordered: Conservative < Moderate < Aggressive on both policy
  // levers; young shares Low <= Medium <= High. Fertility barely reaches the
  // 15+ population by 2050, so elderly shares are only floored at the 2023 level
  // for Low and Medium and capped at Medium for High.
  m.policy[AiPolicy::Moderate].infrastructure_growth = clampv(x[12], -0.03, 0.1);
  const auto& mod = m.policy.at(AiPolicy::Moderate);
  const double med_young = clampv(x[9], 0.1, 0.5);
  const double med_elderly = clampv(x[11], elderly_2023 + 1e-3, 0.5);
  m.demographic[Fertility::Medium].elderly_share_2050 = med_elderly;
  m.policy[AiPolicy::Conservative].adoption_multiplier = clampv(std::exp(x[0]), 0.01, mod.adoption_multiplier / kPolicyRatio);
  m.policy[AiPolicy::Aggressive].adoption_multiplier = clampv(std::exp(x[1]), mod.adoption_multiplier * kPolicyRatio, 20.0);
  m.policy[AiPolicy::Conservative].infrastructure_growth = clampv(x[2], -0.05, mod.infrastructure_growth - kPolicyGap);
  m.policy[AiPolicy::Aggressive].infrastructure_growth = clampv(x[3], mod.infrastructure_growth + kPolicyGap, 0.2);
  m.demographic[Fertility::Low].young_share_2050 = clampv(x[4], 0.05, med_young);
  m.demographic[Fertility::Low].elderly_share_2050 = clampv(x[5], elderly_2023 + 1e-3, 0.6);
  m.demographic[Fertility::High].young_share_2050 = clampv(x[6], med_young, 0.5);
  m.demographic[Fertility::High].elderly_share_2050 = clampv(x[7], 0.1, med_elderly);
  m.demographic[Fertility::High].young_inflow_2050 = clampv(std::exp(x[8]), 0.5, 2.0);
  m.demographic[Fertility::Medium].young_share_2050 = med_young;
  m.economy[EconomyRegime::CrisisProne].shock_magnitude =
      clampv(x[10], m.economy.at(EconomyRegime::Baseline).shock_magnitude, 0.3);
  return m;
}

struct LeverResiduals {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const ModelParams* params;
  const ScenarioManifest* start;
  const ScenarioTargets* targets;
  Eigen::VectorXd x0, scale;
  double elderly_2023;
  int* evaluations;

  int inputs() const { return kLevers; }
  int values() const { return kHeadlines + kLevers; }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    ++*evaluations;
    f.resize(values());
    const auto& t = *targets;
    try {
      const auto h = evaluate_headlines(*params, with_levers(*start, x, elderly_2023));
      f[0] = (h.pessimistic.delta_concentration_pct - t.pessimistic_concentration) / t.tolerance_pct;
      f[1] = (h.pessimistic.delta_productivity_pct - t.pessimistic_productivity) / t.tolerance_pct;
      f[2] = (h.optimistic.delta_concentration_pct - t.optimistic_concentration) / t.tolerance_pct;
      f[3] = (h.optimistic.delta_productivity_pct - t.optimistic_productivity) / t.tolerance_pct;
      f[4] = (h.baseline.delta_concentration_pct - t.baseline_concentration) / t.tolerance_pct;
      f[5] = (h.medium_offset.fraction - t.medium_offset) / (0.5 * (t.offset_high - t.offset_low));
    } catch (const std::exception&) {
      f.head(kHeadlines).setConstant(1e3);
    }
    f.tail(kLevers) = kPriorWeight * (x - x0).cwiseQuotient(scale);
    return 0;
  }
};

}  // namespace

nlohmann::json ManifestFit::report() const {
  auto row = [](const ScenarioOutcome& o) {
    return nlohmann::json{{"scenario", o.scenario_id},
                          {"delta_concentration_pct", o.delta_concentration_pct},
                          {"delta_productivity_pct", o.delta_productivity_pct},
                          {"delta_employment_pct", o.delta_employment_pct}};
  };
  return {{"converged", converged},
          {"evaluations", evaluations},
          {"pessimistic", row(headlines.pessimistic)},
          {"baseline", row(headlines.baseline)},
          {"optimistic", row(headlines.optimistic)},
          {"medium_aggressive_offset", headlines.medium_offset.fraction},
          {"monotone", headlines.monotone()},
          {"manifest", manifest.to_json()}};
}

ManifestFit calibrate_manifest(const ModelParams& calibrated, const ScenarioManifest& start,
                               const ScenarioTargets& targets) {
  start.validate();
  ManifestFit fit;
  const auto demo = DemographicPath::historical(calibrated);
  LeverResiduals fn{&calibrated, &start, &targets, levers_of(start), Eigen::VectorXd(kLevers),
                    demo.elderly_share(kHistoryEndYear), &fit.evaluations};
  fn.scale << 1.0, 1.0, 0.02, 0.02, 0.05, 0.05, 0.05, 0.05, 0.2, 0.05, 0.05, 0.05, 0.02;

  Eigen::NumericalDiff<LeverResiduals> nd(fn);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<LeverResiduals>> lm(nd);
  lm.parameters.maxfev = 400;
  lm.parameters.xtol = 1e-8;
  lm.parameters.ftol = 1e-10;
  Eigen::VectorXd x = fn.x0;
  lm.minimize(x);

  fit.manifest = with_levers(start, x, fn.elderly_2023);
  fit.headlines = evaluate_headlines(calibrated, fit.manifest);
  fit.converged = fit.headlines.within(targets);
  return fit;
}

}  // namespace negai
