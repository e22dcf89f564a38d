#include "negai/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "negai/demography.hpp"
#include "negai/dynamics.hpp"
#include "negai/errors.hpp"
#include "negai/geography.hpp"
#include "negai/io.hpp"

namespace negai {
namespace {

constexpr double kHhiWeight = 0.01;

const IndustryConcentration& find_industry(const ConcentrationReport& r, const std::string& id) {
  for (const auto& c : r.industries)
    if (c.industry_id == id) return c;
  throw ConfigError("calibration target names unknown industry '" + id + "'");
}

double rel_sq(double sim, double target) {
  const double scale = std::max(std::abs(target), 1e-3);
  const double r = (sim - target) / scale;
  return r * r;
}

// One searchable coordinate: a knob with its step scale and bounds. Decay and
// seed move multiplicatively.
struct Coordinate {
  std::size_t industry;
  int knob;  // 0 tilt, 1 decay, 2 seed
};

double get(const ModelParams& p, const Coordinate& c) {
  const auto& k = p.industries[c.industry];
  return c.knob == 0 ? k.central_tilt : c.knob == 1 ? k.anchor_decay_km : k.adoption_seed;
}

bool set(ModelParams& p, const Coordinate& c, double v) {
  auto& k = p.industries[c.industry];
  switch (c.knob) {
    case 0:
      if (std::abs(v) > 10) return false;
      k.central_tilt = v;
      return true;
    case 1:
      if (v < 0.2 || v > 200) return false;
      k.anchor_decay_km = v;
      return true;
    default:
      if (v <= 1e-5 || v > 0.5) return false;
      k.adoption_seed = v;
      return true;
  }
}

double moved(double v, int knob, double step) {
  return knob == 0 ? v + step : v * std::exp(step);
}

}  // namespace

CalibrationTargets CalibrationTargets::from_json(const nlohmann::json& j) {
  CalibrationTargets t;
  try {
    t.year = j.value("year", 2019);
    t.gini_tolerance = j.value("gini_tolerance", t.gini_tolerance);
    t.lq_tolerance = j.value("lq_tolerance", t.lq_tolerance);
    t.adoption_tolerance = j.value("adoption_tolerance", t.adoption_tolerance);
    for (const auto& row : j.at("industries")) {
      IndustryTarget it;
      it.industry_id = row.at("industry").get<std::string>();
      it.location_quotient = row.at("location_quotient").get<double>();
      it.gini = row.at("gini").get<double>();
      it.hhi = row.at("hhi").get<double>();
      it.ai_adoption_rate = row.at("ai_adoption_rate").get<double>();
      t.industries.push_back(it);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed targets: ") + e.what());
  }
  if (t.industries.empty()) throw ConfigError("targets list no industries");
  if (t.year <= kBaseYear) throw ConfigError("target year must follow the base year");
  return t;
}

nlohmann::json CalibrationTargets::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& it : industries)
    rows.push_back({{"industry", it.industry_id},
                    {"location_quotient", it.location_quotient},
                    {"gini", it.gini},
                    {"hhi", it.hhi},
                    {"ai_adoption_rate", it.ai_adoption_rate}});
  return {{"year", year},
          {"gini_tolerance", gini_tolerance},
          {"lq_tolerance", lq_tolerance},
          {"adoption_tolerance", adoption_tolerance},
          {"industries", rows}};
}

CalibrationTargets reference_targets() {
  CalibrationTargets t;
  for (const auto& p : default_industries())
    t.industries.push_back({p.industry_id, p.baseline_lq, p.baseline_gini, p.baseline_hhi, p.baseline_ai_rate});
  return t;
}

CalibrationTargets load_targets(const std::string& path) {
  return CalibrationTargets::from_json(read_json_file(path));
}

ConcentrationReport simulated_moments(const ModelParams& params, int year) {
  const auto initial = build_initial_state(params);
  const auto demo = DemographicPath::historical(params);
  const auto traj = run(initial, params, demo, year);
  return concentration_report(traj.back());
}

CalibrationTargets targets_from_report(const ConcentrationReport& report) {
  CalibrationTargets t;
  t.year = report.year;
  for (const auto& c : report.industries)
    t.industries.push_back({c.industry_id, c.central_lq, c.gini, c.hhi, c.ai_adoption_rate});
  return t;
}

double MomentFit::abs_error() const { return std::abs(achieved - target); }
bool MomentFit::within() const { return tolerance <= 0 || abs_error() <= tolerance; }

double calibration_loss(const ConcentrationReport& sim, const CalibrationTargets& targets) {
  double loss = 0;
  for (const auto& t : targets.industries) {
    const auto& c = find_industry(sim, t.industry_id);
    loss += rel_sq(c.central_lq, t.location_quotient) + rel_sq(c.gini, t.gini) +
            rel_sq(c.ai_adoption_rate, t.ai_adoption_rate) + kHhiWeight * rel_sq(c.hhi, t.hhi);
  }
  return loss;
}

std::vector<MomentFit> moment_fits(const ConcentrationReport& sim, const CalibrationTargets& targets) {
  std::vector<MomentFit> out;
  for (const auto& t : targets.industries) {
    const auto& c = find_industry(sim, t.industry_id);
    out.push_back({t.industry_id, "location_quotient", t.location_quotient, c.central_lq, targets.lq_tolerance});
    out.push_back({t.industry_id, "gini", t.gini, c.gini, targets.gini_tolerance});
    out.push_back({t.industry_id, "hhi", t.hhi, c.hhi, 0.0});
    out.push_back({t.industry_id, "ai_adoption_rate", t.ai_adoption_rate, c.ai_adoption_rate,
                   targets.adoption_tolerance});
  }
  return out;
}

std::vector<MomentFit> CalibrationResult::worst(std::size_t n) const {
  auto sorted = fits;
  auto score = [](const MomentFit& f) {
    return f.tolerance > 0 ? f.abs_error() / f.tolerance : 0.1 * f.abs_error();
  };
  std::stable_sort(sorted.begin(), sorted.end(),
                   [&](const MomentFit& a, const MomentFit& b) { return score(a) > score(b); });
  sorted.resize(std::min(n, sorted.size()));
  return sorted;
}

nlohmann::json CalibrationResult::report() const {
  auto row = [](const MomentFit& f) {
    return nlohmann::json{{"industry", f.industry_id}, {"moment", f.moment},
                          {"target", f.target},        {"achieved", f.achieved},
                          {"abs_error", f.abs_error()}, {"tolerance", f.tolerance},
                          {"within", f.within()}};
  };
  nlohmann::json all = nlohmann::json::array(), bad = nlohmann::json::array();
  for (const auto& f : fits) all.push_back(row(f));
  for (const auto& f : worst(5)) bad.push_back(row(f));
  return {{"converged", converged}, {"loss", loss},          {"initial_loss", initial_loss},
          {"sweeps", sweeps},       {"evaluations", evaluations}, {"moments", all},
          {"worst_moments", bad}};
}

CalibrationResult calibrate_baseline(const CalibrationTargets& targets, const ModelParams& init,
                                     const CalibrationOptions& options) {
  init.validate();
  CalibrationResult res;
  res.params = init;
  auto eval = [&](const ModelParams& p) {
    ++res.evaluations;
    return calibration_loss(simulated_moments(p, targets.year), targets);
  };
  res.loss = res.initial_loss = eval(init);

  std::vector<Coordinate> coords;
  std::vector<double> steps;
  for (std::size_t k = 0; k < init.industries.size(); ++k)
    for (int knob = 0; knob < 3; ++knob) {
      coords.push_back({k, knob});
      steps.push_back(knob == 0 ? 0.5 : 0.3);
    }

  while (res.loss > options.loss_tolerance && res.sweeps < options.max_sweeps) {
    ++res.sweeps;
    bool any_step = false;
    for (std::size_t c = 0; c < coords.size(); ++c) {
      if (steps[c] < options.min_step) continue;
      any_step = true;
      bool improved = false;
      for (double dir : {1.0, -1.0}) {
        ModelParams trial = res.params;
        if (!set(trial, coords[c], moved(get(res.params, coords[c]), coords[c].knob, dir * steps[c])))
          continue;
        double l;
        try {
          l = eval(trial);
        } catch (const SimulationError&) {
          continue;
        }
        if (l < res.loss) {
          res.loss = l;
          res.params = trial;
          improved = true;
          break;
        }
      }
      steps[c] *= improved ? 1.5 : 0.5;
    }
    if (!any_step) break;
  }

  res.fits = moment_fits(simulated_moments(res.params, targets.year), targets);
  res.converged = std::all_of(res.fits.begin(), res.fits.end(), [](const MomentFit& f) { return f.within(); });
  return res;
}

}  // namespace negai
