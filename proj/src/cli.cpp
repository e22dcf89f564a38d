#include "negai/cli.hpp"

#include <filesystem>
#include <iomanip>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "negai/calibration.hpp"
#include "negai/demography.hpp"
#include "negai/dynamics.hpp"
#include "negai/errors.hpp"
#include "negai/geography.hpp"
#include "negai/hypotheses.hpp"
#include "negai/io.hpp"
#include "negai/metrics.hpp"
#include "negai/network.hpp"
#include "negai/panel.hpp"
#include "negai/params.hpp"
#include "negai/scenarios.hpp"

#ifndef NEGAI_DATA_DIR
#define NEGAI_DATA_DIR "data"
#endif

namespace fs = std::filesystem;

namespace negai {

RunConfig RunConfig::defaults() {
  RunConfig c;
  const fs::path data(NEGAI_DATA_DIR);
  c.params = (data / "params_calibrated.json").string();
  c.targets = (data / "reference_targets.json").string();
  c.manifest = (data / "scenario_manifest.json").string();
  return c;
}

namespace {

std::string resolve(const std::string& base_dir, const std::string& p) {
  if (p.empty() || p == "self" || fs::path(p).is_absolute() || base_dir.empty()) return p;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

template <class T>
T get(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j, const std::string& base_dir, RunConfig c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{"params", "targets",  "manifest", "panel",        "out",
                                           "seed",   "filter",   "methods",  "scenario",     "horizon",
                                           "fit_manifest", "overrides", "dgp", "estimator"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ConfigError("unknown config key '" + k + "'");
  if (j.contains("params")) c.params = resolve(base_dir, get<std::string>(j, "params"));
  if (j.contains("targets")) c.targets = resolve(base_dir, get<std::string>(j, "targets"));
  if (j.contains("manifest")) c.manifest = resolve(base_dir, get<std::string>(j, "manifest"));
  if (j.contains("panel")) c.panel = resolve(base_dir, get<std::string>(j, "panel"));
  if (j.contains("out")) c.out = resolve(base_dir, get<std::string>(j, "out"));
  if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("filter")) c.filter = get<std::string>(j, "filter");
  if (j.contains("methods")) c.methods = get<std::vector<std::string>>(j, "methods");
  if (j.contains("scenario")) c.scenario = get<std::string>(j, "scenario");
  if (j.contains("horizon")) c.horizon = get<int>(j, "horizon");
  if (j.contains("fit_manifest")) c.fit_manifest = get<bool>(j, "fit_manifest");
  for (const char* k : {"overrides", "dgp", "estimator"})
    if (j.contains(k) && !j.at(k).is_object()) throw ConfigError(std::string("config key '") + k + "' must be an object");
  if (j.contains("overrides")) c.overrides = j.at("overrides");
  if (j.contains("dgp")) c.dgp = j.at("dgp");
  if (j.contains("estimator")) c.estimator = j.at("estimator");
  return c;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j{{"command", command},   {"params", params},   {"targets", targets},
                   {"manifest", manifest}, {"panel", panel},     {"out", out},
                   {"filter", filter},     {"methods", methods}, {"scenario", scenario},
                   {"horizon", horizon},   {"fit_manifest", fit_manifest}, {"overrides", overrides},
                   {"dgp", dgp},           {"estimator", estimator}};
  j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  return j;
}

EstimatorSpec estimator_spec_from_json(const nlohmann::json& j, std::uint64_t seed) {
  nlohmann::json merged = to_json(EstimatorSpec{});
  for (const auto& [k, v] : j.items())
    if (!merged.contains(k)) throw ConfigError("unknown estimator key '" + k + "'");
  merged.merge_patch(j);
  EstimatorSpec s;
  try {
    s.window_min = merged.at("window_min");
    s.window_max = merged.at("window_max");
    s.instrument_year = merged.at("instrument_year");
    s.caliper = merged.at("caliper");
    s.bootstrap_draws = merged.at("bootstrap_draws");
    s.psm_covariates = merged.at("psm_covariates").get<std::vector<std::string>>();
    s.sc_tolerance = merged.at("sc_tolerance");
    s.sc_rmse_cap = merged.at("sc_rmse_cap");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("estimator config: ") + e.what());
  }
  if (s.window_min > -2 || s.window_max < 0) throw ConfigError("event window must include k = -2 and k = 0");
  if (s.bootstrap_draws < 2) throw ConfigError("bootstrap_draws must be >= 2");
  s.seed = seed;
  return s;
}

nlohmann::json to_json(const EstimatorSpec& s) {
  return {{"window_min", s.window_min},
          {"window_max", s.window_max},
          {"instrument_year", s.instrument_year},
          {"caliper", s.caliper},
          {"bootstrap_draws", s.bootstrap_draws},
          {"psm_covariates", s.psm_covariates},
          {"sc_tolerance", s.sc_tolerance},
          {"sc_rmse_cap", s.sc_rmse_cap},
          {"seed", s.seed}};
}

namespace {

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw InputError(std::string(what) + " path is empty");
  if (!fs::is_regular_file(path)) throw InputError(std::string(what) + " not found: " + path);
}

ModelParams resolved_params(const RunConfig& cfg) {
  require_file(cfg.params, "parameter ledger");
  auto j = read_json_file(cfg.params);
  j.merge_patch(cfg.overrides);
  if (cfg.seed) j["seed"] = *cfg.seed;
  return ModelParams::from_json(j);
}

fs::path prepare_out(const RunConfig& cfg) {
  const fs::path out(cfg.out);
  fs::create_directories(out);
  return out;
}

void write_out(const fs::path& dir, const std::string& name, const std::string& text) {
  write_file_atomic((dir / name).string(), text);
}

void snapshot(const fs::path& dir, const RunConfig& cfg, nlohmann::json resolved) {
  resolved["config"] = cfg.to_json();
  write_out(dir, "resolved_config.json", resolved.dump(2) + "\n");
}

DgpConfig resolved_dgp(const RunConfig& cfg, DgpConfig base) {
  auto j = base.to_json();
  j.merge_patch(cfg.dgp);
  if (cfg.seed) j["seed"] = *cfg.seed;
  return DgpConfig::from_json(j);
}

PanelDataset load_or_generate(const RunConfig& cfg, const DgpConfig& dgp, nlohmann::json& resolved) {
  if (!cfg.panel.empty()) {
    require_file(cfg.panel, "panel");
    resolved["panel"] = cfg.panel;
    return load_panel(cfg.panel);
  }
  resolved["dgp"] = dgp.to_json();
  return generate_panel(dgp);
}

std::string event_study_csv(const EventStudyResult& es) {
  std::ostringstream os;
  os << "k,beta,se,ci_lower,ci_upper,n_obs,missing,reference\n";
  for (const auto& c : es.coefficients)
    os << c.k << ',' << (c.missing ? "" : fmt_double(c.beta)) << ',' << (c.missing ? "" : fmt_double(c.se)) << ','
       << (c.missing ? "" : fmt_double(c.ci_lower)) << ',' << (c.missing ? "" : fmt_double(c.ci_upper)) << ','
       << c.n_obs << ',' << (c.missing ? "true" : "false") << ',' << (c.reference ? "true" : "false") << '\n';
  return os.str();
}

std::string fixed(double v, int digits = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

int cmd_calibrate(const RunConfig& cfg, std::ostream& log) {
  const ModelParams init = resolved_params(cfg);
  CalibrationTargets targets;
  if (cfg.targets == "self") {
    targets = targets_from_report(simulated_moments(init, 2019));
  } else {
    require_file(cfg.targets, "targets file");
    targets = load_targets(cfg.targets);
  }
  const auto out = prepare_out(cfg);
  const auto res = calibrate_baseline(targets, init);
  save_params(res.params, (out / "params_calibrated.json").string());
  write_out(out, "calibration_report.json", res.report().dump(2) + "\n");
  nlohmann::json resolved{{"start_params", init.to_json()}, {"targets", targets.to_json()}};
  log << "calibration loss " << res.initial_loss << " -> " << res.loss << " after " << res.evaluations
      << " evaluations\n";
  bool ok = res.converged;
  if (!ok) {
    log << "moments outside tolerance (worst first):\n";
    for (const auto& f : res.worst(5))
      log << "  " << f.industry_id << ' ' << f.moment << " target " << f.target << " achieved " << f.achieved
          << " tolerance " << f.tolerance << '\n';
  }
  if (cfg.fit_manifest) {
    ScenarioManifest start = ScenarioManifest::prior();
    if (fs::is_regular_file(cfg.manifest)) start = load_manifest(cfg.manifest);
    resolved["manifest_start"] = start.to_json();
    const auto fit = calibrate_manifest(res.params, start);
    write_out(out, "scenario_manifest.json", fit.manifest.to_json().dump(2) + "\n");
    write_out(out, "manifest_report.json", fit.report().dump(2) + "\n");
    log << "scenario levers " << (fit.converged ? "within" : "outside") << " headline tolerance\n";
    ok = ok && fit.converged;
  }
  snapshot(out, cfg, resolved);
  log << (ok ? "calibration converged" : "calibration did not meet tolerance") << '\n';
  return ok ? kExitOk : kExitFailed;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  const ModelParams p = resolved_params(cfg);
  nlohmann::json resolved{{"params", p.to_json()}};
  Trajectory t;
  if (cfg.scenario.empty()) {
    const auto s0 = build_initial_state(p);
    if (cfg.horizon < s0.year) throw ConfigError("horizon precedes the start year " + std::to_string(s0.year));
    t = run(s0, p, DemographicPath::historical(p), cfg.horizon);
  } else {
    require_file(cfg.manifest, "scenario manifest");
    const auto m = load_manifest(cfg.manifest);
    const auto grid = build_grid();
    const auto& s = find_scenario(grid, cfg.scenario);
    t = project_trajectory(s, p, initial_projection_state(p, m), m);
    resolved["manifest"] = m.to_json();
    resolved["scenario"] = s.id;
  }
  const auto out = prepare_out(cfg);
  write_out(out, "trajectory.csv", trajectory_csv(t));
  write_out(out, "summary.json", trajectory_summary(t).dump(2) + "\n");
  // Final-year cross-section and interaction graphs for external plotting.
  const auto& final_state = t.back();
  write_out(out, "concentration.csv", to_csv(concentration_report(final_state)));
  const auto physical = build_physical_graph(final_state, final_state.distances.maxCoeff(), p);
  const auto virtual_edges = edge_list_csv(build_virtual_graph(final_state, p));
  write_out(out, "edges.csv", edge_list_csv(physical) + virtual_edges.substr(virtual_edges.find('\n') + 1));
  write_out(out, "network.json", to_node_link(build_combined_graph(final_state, p)).dump(2) + "\n");
  snapshot(out, cfg, resolved);
  const auto& last = t.derived.back();
  log << "simulated " << t.derived.front().year << "-" << last.year << ": concentration "
      << fixed(last.concentration_index) << ", aging index " << fixed(last.aging_index) << ", mean adoption "
      << fixed(last.mean_adoption) << '\n';
  return kExitOk;
}

int cmd_estimate(const RunConfig& cfg, std::ostream& log) {
  std::vector<Method> methods;
  for (const auto& m : cfg.methods) methods.push_back(method_from_string(m));
  if (methods.empty()) methods.assign(std::begin(kMethods), std::end(kMethods));
  const DgpConfig dgp = resolved_dgp(cfg, DgpConfig{});
  const EstimatorSpec spec = estimator_spec_from_json(cfg.estimator, cfg.seed.value_or(dgp.seed));
  nlohmann::json resolved{{"estimator", to_json(spec)}};
  const PanelDataset panel = load_or_generate(cfg, dgp, resolved);
  panel.validate();

  const auto table = estimate_table(panel, methods, spec);
  const auto out = prepare_out(cfg);
  write_out(out, "effects.json", table.to_json().dump(2) + "\n");
  write_out(out, "effects.csv", table.to_csv());
  if (cfg.panel.empty()) write_out(out, "panel.csv", panel_csv(panel));
  if (std::find(methods.begin(), methods.end(), Method::EventStudy) != methods.end()) {
    try {
      write_out(out, "event_study.csv", event_study_csv(estimate_event_study(panel, spec)));
    } catch (const std::exception& e) {
      log << "event-study coefficients not written: " << e.what() << '\n';
    }
  }
  snapshot(out, cfg, resolved);

  std::size_t ok = 0;
  for (const auto& r : table.rows) {
    log << std::left << std::setw(28) << r.method;
    if (r.ok()) {
      ++ok;
      log << fixed(r.effect) << " (se " << fixed(r.se) << ", p " << fixed(r.p_value) << ")\n";
    } else {
      log << "failed: " << r.error << '\n';
    }
  }
  if (ok > 0)
    log << std::left << std::setw(28) << table.average.method << fixed(table.average.effect) << " (se "
        << fixed(table.average.se) << ")\n";
  return ok > 0 ? kExitOk : kExitFailed;
}

int cmd_scenarios(const RunConfig& cfg, std::ostream& log) {
  const ModelParams p = resolved_params(cfg);
  require_file(cfg.manifest, "scenario manifest");
  const auto m = load_manifest(cfg.manifest);
  const auto g = run_grid(p, m, cfg.filter);
  if (g.scenarios.empty()) throw ConfigError("filter '" + cfg.filter + "' matches no scenario");
  const auto out = prepare_out(cfg);
  write_out(out, "outcomes.csv", outcomes_csv(g));
  write_out(out, "offsets.csv", offsets_csv(g));
  fs::create_directories(out / "series");
  for (const auto& o : g.outcomes)
    if (o) write_out(out / "series", o->scenario_id + ".csv", series_csv(*o));
  snapshot(out, cfg, {{"params", p.to_json()}, {"manifest", m.to_json()}});

  std::size_t failed = 0;
  for (std::size_t i = 0; i < g.scenarios.size(); ++i) {
    log << std::left << std::setw(34) << g.scenarios[i].id;
    if (const auto& o = g.outcomes[i])
      log << "concentration " << std::showpos << fixed(o->delta_concentration_pct, 1) << "%  productivity "
          << fixed(o->delta_productivity_pct, 1) << '%' << std::noshowpos
          << (g.scenarios[i].tag.empty() ? "" : "  [" + g.scenarios[i].tag + "]") << '\n';
    else {
      ++failed;
      log << "failed: " << g.errors[i] << '\n';
    }
  }
  for (const auto& [f, o] : g.offsets)
    log << "aging offset (" << to_string(f) << ", Aggressive): " << fixed(o.fraction) << '\n';
  for (const auto& [f, e] : g.offset_errors) log << "aging offset (" << to_string(f) << ") failed: " << e << '\n';
  return failed == 0 ? kExitOk : kExitFailed;
}

int cmd_validate(const RunConfig& cfg, std::ostream& log) {
  const ModelParams p = resolved_params(cfg);
  const auto s0 = build_initial_state(p);
  if (cfg.horizon < s0.year) throw ConfigError("horizon precedes the start year " + std::to_string(s0.year));
  const auto t = run(s0, p, DemographicPath::historical(p), cfg.horizon);
  const DgpConfig dgp = resolved_dgp(cfg, hypothesis_dgp());
  nlohmann::json resolved{{"params", p.to_json()}};
  const PanelDataset panel = load_or_generate(cfg, dgp, resolved);
  const auto report = validate_hypotheses(t, p, hypothesis_evidence(panel));
  const auto out = prepare_out(cfg);
  write_out(out, "hypotheses.json", report.to_json().dump(2) + "\n");
  write_out(out, "hypotheses.txt", report.table());
  snapshot(out, cfg, resolved);
  log << report.table();
  const bool ok = report.all_testable() && report.supported() == static_cast<int>(report.results.size());
  return ok ? kExitOk : kExitFailed;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"negai: AI-extended spatial economy simulator and estimator"};
  app.require_subcommand(1);
  std::string config_path, out_dir, filter, methods, params, targets, manifest, panel, scenario;
  std::optional<std::uint64_t> seed;
  std::optional<int> horizon;
  bool fit_manifest = false;
  auto common = [&](CLI::App* c) {
    c->add_option("--config", config_path, "JSON run config")->check(CLI::ExistingFile);
    c->add_option("--seed", seed, "RNG seed (params, DGP and bootstrap)");
    c->add_option("--out", out_dir, "output directory");
    c->add_option("--params", params, "parameter ledger");
  };
  auto* cal = app.add_subcommand("calibrate", "fit the 2000 geography to the reference moments");
  common(cal);
  cal->add_option("--targets", targets, "targets JSON, or 'self'");
  cal->add_option("--manifest", manifest, "starting scenario manifest for --fit-manifest");
  cal->add_flag("--fit-manifest", fit_manifest, "also refit the scenario levers");
  auto* sim = app.add_subcommand("simulate", "simulate a trajectory");
  common(sim);
  sim->add_option("--horizon", horizon, "last simulated year");
  sim->add_option("--scenario", scenario, "project a scenario (id or tag) instead of history");
  sim->add_option("--manifest", manifest, "scenario manifest");
  auto* est = app.add_subcommand("estimate", "run the causal estimators on a panel");
  common(est);
  est->add_option("--panel", panel, "panel CSV (default: generate from the DGP)");
  est->add_option("--methods", methods, "comma-separated: did,event_study,synthetic_control,iv,psm");
  auto* scn = app.add_subcommand("scenarios", "project the scenario grid");
  common(scn);
  scn->add_option("--filter", filter, "id or tag substring");
  scn->add_option("--manifest", manifest, "scenario manifest");
  auto* val = app.add_subcommand("validate", "test the six hypotheses");
  common(val);
  val->add_option("--horizon", horizon, "last simulated year");
  val->add_option("--panel", panel, "panel CSV (default: generate from the DGP)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig cfg = RunConfig::defaults();
    if (!config_path.empty())
      cfg = RunConfig::from_json(read_json_file(config_path), fs::path(config_path).parent_path().string(), cfg);
    CLI::App* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();
    if (seed) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out = out_dir;
    if (!params.empty()) cfg.params = params;
    if (!targets.empty()) cfg.targets = targets;
    if (!manifest.empty()) cfg.manifest = manifest;
    if (!panel.empty()) cfg.panel = panel;
    if (!scenario.empty()) cfg.scenario = scenario;
    if (!filter.empty()) cfg.filter = filter;
    if (horizon) cfg.horizon = *horizon;
    if (fit_manifest) cfg.fit_manifest = true;
    if (!methods.empty()) {
      cfg.methods.clear();
      std::stringstream ss(methods);
      for (std::string m; std::getline(ss, m, ',');)
        if (!m.empty()) cfg.methods.push_back(m);
    }
    if (cfg.command == "calibrate") return cmd_calibrate(cfg, out);
    if (cfg.command == "simulate") return cmd_simulate(cfg, out);
    if (cfg.command == "estimate") return cmd_estimate(cfg, out);
    if (cfg.command == "scenarios") return cmd_scenarios(cfg, out);
    return cmd_validate(cfg, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailed;
  }
}

}  // namespace negai
