#include "negai/params.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "negai/errors.hpp"
#include "negai/io.hpp"

namespace negai {
namespace {

void require(bool ok, const char* field, const char* rule) {
  if (!ok) throw ConfigError(std::string("parameter '") + field + "' must satisfy " + rule);
}

bool finite(double x) { return std::isfinite(x); }

using nlohmann::json;

// Reads `key` into `dst` if present; records the key as consumed.
template <class T>
void read(const json& j, const char* key, T& dst, std::set<std::string>& seen) {
  seen.insert(key);
  if (auto it = j.find(key); it != j.end()) dst = it->get<T>();
}

void reject_unknown(const json& j, const std::set<std::string>& seen, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!seen.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

}  // namespace

void ModelParams::validate() const {
  const double all[] = {beta_learning, alpha_mix, phi, psi, alpha_ai, delta, gamma, nu, eta,
                        c_max, lambda, ces_share, ces_exponent, tfp, gamma_network,
                        network_gain, adoption_rate, kappa_spillover, kappa_network,
                        migration_sensitivity, congestion, agglomeration, ai_agglomeration,
                        virtual_access_weight,
                        central_pull, connectivity_drift, infrastructure_growth,
                        human_capital_age_elasticity, ai_capital_floor, aging_path_slope,
                        shock_probability, shock_magnitude, shock_persistence};
  for (double v : all) require(finite(v), "<any>", "finite");

  require(beta_learning >= 0, "beta_learning", ">= 0");
  require(alpha_mix >= 0 && alpha_mix <= 1, "alpha_mix", "in [0,1]");
  require(phi > 0, "phi", "> 0");
  require(psi > 0, "psi", "> 0");
  require(alpha_ai > 0, "alpha_ai", "> 0");
  require(delta >= 0 && gamma >= 0 && nu >= 0 && eta >= 0, "delta/gamma/nu/eta", ">= 0");
  require(c_max > 0, "c_max", "> 0");
  require(lambda >= 0, "lambda", ">= 0");
  require(ces_share > 0 && ces_share < 1, "ces_share", "in (0,1)");
  require(ces_exponent <= 1, "ces_exponent", "<= 1");
  double sum = 0;
  for (double e : outer_elasticities) {
    require(finite(e) && e > 0, "outer_elasticities", "> 0");
    sum += e;
  }
  require(std::abs(sum - 1.0) <= 1e-12, "outer_elasticities", "sum to 1");
  require(tfp > 0, "tfp", "> 0");
  require(gamma_network >= 0, "gamma_network", ">= 0");
  require(network_gain > 0, "network_gain", "> 0");
  require(adoption_rate >= 0, "adoption_rate", ">= 0");
  require(kappa_spillover >= 0 && kappa_network >= 0, "kappa_*", ">= 0");
  require(migration_sensitivity >= 0, "migration_sensitivity", ">= 0");
  require(congestion >= 0, "congestion", ">= 0");
  require(agglomeration >= 0 && ai_agglomeration >= 0, "agglomeration/ai_agglomeration", ">= 0");
  require(virtual_access_weight >= 0, "virtual_access_weight", ">= 0");
  require(connectivity_drift >= 0 && connectivity_drift <= 1, "connectivity_drift", "in [0,1]");
  require(infrastructure_growth > -1, "infrastructure_growth", "> -1");
  require(ai_capital_floor > 0, "ai_capital_floor", "> 0");
  require(shock_probability >= 0 && shock_probability <= 1, "shock_probability", "in [0,1]");
  require(shock_magnitude >= 0 && shock_magnitude < 1, "shock_magnitude", "in [0,1)");
  require(shock_persistence >= 0 && shock_persistence < 1, "shock_persistence", "in [0,1)");

  const auto& g = geography;
  require(g.centrality_scale_km > 0, "geography.centrality_scale_km", "> 0");
  require(g.connectivity_base > 0 && g.connectivity_base <= 1, "geography.connectivity_base",
          "in (0,1]");
  require(g.network_scale_km > 0, "geography.network_scale_km", "> 0");
  require(g.endowment_noise >= 0, "geography.endowment_noise", ">= 0");
  require(g.adoption_noise >= 0, "geography.adoption_noise", ">= 0");
  require(g.background_share >= 0 && g.background_share < 1, "geography.background_share",
          "in [0,1)");
  for (const auto& k : industries) {
    require(finite(k.central_tilt), "industries.central_tilt", "finite");
    require(k.anchor_decay_km > 0, "industries.anchor_decay_km", "> 0");
    require(k.adoption_seed > 0 && k.adoption_seed < 1, "industries.adoption_seed", "in (0,1)");
    require(k.adoption_multiplier >= 0, "industries.adoption_multiplier", ">= 0");
  }
}

ModelParams ModelParams::defaults() {
  ModelParams p;
  // IT, Finance, Professional, Manufacturing, Retail, Healthcare.
  p.industries = {{
      {2.82212, 5.1112, 0.0183925, 1.0},
      {1.0306, 1.32122, 0.00757541, 1.0},
      {-0.676445, 1.81025, 0.00860427, 1.0},
      {0.700897, 9.53108, 0.00283933, 1.0},
      {0.388327, 5.75916, 0.00224421, 1.0},
      {0.934728, 30.6955, 0.00299158, 1.0},
  }};
  p.validate();
  return p;
}

nlohmann::json ModelParams::to_json() const {
  json ind = json::array();
  for (const auto& k : industries)
    ind.push_back({{"central_tilt", k.central_tilt},
                   {"anchor_decay_km", k.anchor_decay_km},
                   {"adoption_seed", k.adoption_seed},
                   {"adoption_multiplier", k.adoption_multiplier}});
  const auto& g = geography;
  return {
      {"beta_learning", beta_learning},
      {"alpha_mix", alpha_mix},
      {"phi", phi},
      {"psi", psi},
      {"alpha_ai", alpha_ai},
      {"delta", delta},
      {"gamma", gamma},
      {"nu", nu},
      {"eta", eta},
      {"c_max", c_max},
      {"lambda", lambda},
      {"ces_share", ces_share},
      {"ces_exponent", ces_exponent},
      {"outer_elasticities", outer_elasticities},
      {"tfp", tfp},
      {"gamma_network", gamma_network},
      {"network_gain", network_gain},
      {"adoption_rate", adoption_rate},
      {"kappa_spillover", kappa_spillover},
      {"kappa_network", kappa_network},
      {"migration_sensitivity", migration_sensitivity},
      {"congestion", congestion},
      {"agglomeration", agglomeration},
      {"ai_agglomeration", ai_agglomeration},
      {"virtual_access_weight", virtual_access_weight},
      {"central_pull", central_pull},
      {"connectivity_drift", connectivity_drift},
      {"infrastructure_growth", infrastructure_growth},
      {"human_capital_age_elasticity", human_capital_age_elasticity},
      {"ai_capital_floor", ai_capital_floor},
      {"aging_path_slope", aging_path_slope},
      {"shock_probability", shock_probability},
      {"shock_magnitude", shock_magnitude},
      {"shock_persistence", shock_persistence},
      {"seed", seed},
      {"geography",
       {{"infrastructure_gradient", g.infrastructure_gradient},
        {"human_capital_gradient", g.human_capital_gradient},
        {"endowment_noise", g.endowment_noise},
        {"adoption_noise", g.adoption_noise},
        {"centrality_scale_km", g.centrality_scale_km},
        {"connectivity_base", g.connectivity_base},
        {"network_scale_km", g.network_scale_km},
        {"adoption_endowment_elasticity", g.adoption_endowment_elasticity},
        {"background_share", g.background_share},
        {"capital_gradient", g.capital_gradient},
        {"seed", g.seed}}},
      {"industries", ind},
  };
}

ModelParams ModelParams::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("parameter ledger must be a JSON object");
  ModelParams p = defaults();
  std::set<std::string> seen;
  try {
    read(j, "beta_learning", p.beta_learning, seen);
    read(j, "alpha_mix", p.alpha_mix, seen);
    read(j, "phi", p.phi, seen);
    read(j, "psi", p.psi, seen);
    read(j, "alpha_ai", p.alpha_ai, seen);
    read(j, "delta", p.delta, seen);
    read(j, "gamma", p.gamma, seen);
    read(j, "nu", p.nu, seen);
    read(j, "eta", p.eta, seen);
    read(j, "c_max", p.c_max, seen);
    read(j, "lambda", p.lambda, seen);
    read(j, "ces_share", p.ces_share, seen);
    read(j, "ces_exponent", p.ces_exponent, seen);
    read(j, "outer_elasticities", p.outer_elasticities, seen);
    read(j, "tfp", p.tfp, seen);
    read(j, "gamma_network", p.gamma_network, seen);
    read(j, "network_gain", p.network_gain, seen);
    read(j, "adoption_rate", p.adoption_rate, seen);
    read(j, "kappa_spillover", p.kappa_spillover, seen);
    read(j, "kappa_network", p.kappa_network, seen);
    read(j, "migration_sensitivity", p.migration_sensitivity, seen);
    read(j, "congestion", p.congestion, seen);
    read(j, "agglomeration", p.agglomeration, seen);
    read(j, "ai_agglomeration", p.ai_agglomeration, seen);
    read(j, "virtual_access_weight", p.virtual_access_weight, seen);
    read(j, "central_pull", p.central_pull, seen);
    read(j, "connectivity_drift", p.connectivity_drift, seen);
    read(j, "infrastructure_growth", p.infrastructure_growth, seen);
    read(j, "human_capital_age_elasticity", p.human_capital_age_elasticity, seen);
    read(j, "ai_capital_floor", p.ai_capital_floor, seen);
    read(j, "aging_path_slope", p.aging_path_slope, seen);
    read(j, "shock_probability", p.shock_probability, seen);
    read(j, "shock_magnitude", p.shock_magnitude, seen);
    read(j, "shock_persistence", p.shock_persistence, seen);
    read(j, "seed", p.seed, seen);
    seen.insert("geography");
    if (auto it = j.find("geography"); it != j.end()) {
      std::set<std::string> gs;
      auto& g = p.geography;
      read(*it, "infrastructure_gradient", g.infrastructure_gradient, gs);
      read(*it, "human_capital_gradient", g.human_capital_gradient, gs);
      read(*it, "endowment_noise", g.endowment_noise, gs);
      read(*it, "adoption_noise", g.adoption_noise, gs);
      read(*it, "centrality_scale_km", g.centrality_scale_km, gs);
      read(*it, "connectivity_base", g.connectivity_base, gs);
      read(*it, "network_scale_km", g.network_scale_km, gs);
      read(*it, "adoption_endowment_elasticity", g.adoption_endowment_elasticity, gs);
      read(*it, "background_share", g.background_share, gs);
      read(*it, "capital_gradient", g.capital_gradient, gs);
      read(*it, "seed", g.seed, gs);
      reject_unknown(*it, gs, "geography");
    }
    seen.insert("industries");
    if (auto it = j.find("industries"); it != j.end()) {
      if (!it->is_array() || it->size() != kIndustryCount)
        throw ConfigError("'industries' must be an array of 6 objects");
      for (std::size_t k = 0; k < kIndustryCount; ++k) {
        std::set<std::string> ks;
        auto& dst = p.industries[k];
        const auto& src = (*it)[k];
        read(src, "central_tilt", dst.central_tilt, ks);
        read(src, "anchor_decay_km", dst.anchor_decay_km, ks);
        read(src, "adoption_seed", dst.adoption_seed, ks);
        read(src, "adoption_multiplier", dst.adoption_multiplier, ks);
        reject_unknown(src, ks, "industries[" + std::to_string(k) + "]");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("parameter ledger: ") + e.what());
  }
  reject_unknown(j, seen, "parameter ledger");
  p.validate();
  return p;
}

ModelParams load_params(const std::string& path) {
  return ModelParams::from_json(read_json_file(path));
}

void save_params(const ModelParams& p, const std::string& path) {
  write_file_atomic(path, p.to_json().dump(2) + "\n");
}

}  // namespace negai
