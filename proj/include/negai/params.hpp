// Model parameters: every coefficient of the five AI mechanisms plus the laws
// of motion. Serialized as the "parameter ledger" JSON document.
#pragma once

#include <array>
#include <cstdint>
#include <string>

#include <json.hpp>

namespace negai {

inline constexpr std::size_t kIndustryCount = 6;

// Per-industry knobs of the synthetic 2000 geography. These are the
// parameters `calibrate_baseline` searches over.
struct IndustryKnobs {
  double central_tilt = 0.0;      // log-weight bonus in the five central wards
  double anchor_decay_km = 5.0;   // e-folding distance around the primary ward
  double adoption_seed = 0.02;    // mean 2000 adoption share
  double adoption_multiplier = 1.0;  // industry-specific logistic rate scale
};

struct GeographyParams {
  double infrastructure_gradient = 1.2;  // log D per unit centrality
  double human_capital_gradient = 0.6;   // log H per unit centrality
  double endowment_noise = 0.25;         // sd of ward-level log D, log H noise
  double adoption_noise = 1.0;           // sd of ward-level log adoption-seed noise
  double centrality_scale_km = 6.0;      // centrality = exp(-dist/scale)
  double connectivity_base = 0.35;       // Q_ij scale at t0
  double network_scale_km = 5.0;         // w_ij decay length
  double adoption_endowment_elasticity = 1.5;  // a0 ~ (D H)^elasticity
  double background_share = 0.6;         // non-modelled employment share
  double capital_gradient = 0.3;         // log capital-per-worker per centrality
  std::uint64_t seed = 20190401;         // endowment noise draws
};

struct ModelParams {
  // Spillovers and spatial decay.
  double beta_learning = 0.05;
  double alpha_mix = 0.5;
  double phi = 1.0;
  double psi = 1.0;

  // AI returns R = alpha_ai D^delta A^gamma N^nu H^eta.
  double alpha_ai = 0.04;
  double delta = 0.5;
  double gamma = 0.1;
  double nu = 1.0;
  double eta = 0.5;

  // Virtual agglomeration.
  double c_max = 10.0;
  double lambda = 6000.0;

  // Nested CES production.
  double ces_share = 0.97;
  double ces_exponent = 0.5;
  std::array<double, 3> outer_elasticities{0.3, 0.6, 0.1};  // K, L, M
  double tfp = 1.0;

  // Network externalities, G(x) = x / (x + network_gain).
  double gamma_network = 1.0;
  double network_gain = 1.0;

  // Laws of motion.
  double adoption_rate = 0.15;
  double kappa_spillover = 1.0;
  double kappa_network = 1.0;
  double migration_sensitivity = 0.5;
  // Own-industry density enters attractiveness with elasticity
  // agglomeration * young_share * (1 + ai_agglomeration * a_ik) - congestion.
  double congestion = 1.0;
  double agglomeration = 1.5;
  double ai_agglomeration = 0.3;
  double virtual_access_weight = 0.2;
  double central_pull = 1.0;
  double connectivity_drift = 0.3;
  double infrastructure_growth = 0.02;
  double human_capital_age_elasticity = 0.5;
  double ai_capital_floor = 0.1;
  double aging_path_slope = 0.15 / 23.0;  // historical elderly-share slope per year

  // Productivity shock process (log level AR(1) with Bernoulli hits).
  double shock_probability = 0.0;
  double shock_magnitude = 0.05;
  double shock_persistence = 0.7;

  std::uint64_t seed = 1;

  GeographyParams geography{};
  std::array<IndustryKnobs, kIndustryCount> industries{};

  // Throws ConfigError naming the first out-of-range field.
  void validate() const;

  static ModelParams defaults();
  static ModelParams from_json(const nlohmann::json& j);  // validates
  nlohmann::json to_json() const;
};

ModelParams load_params(const std::string& path);
void save_params(const ModelParams& p, const std::string& path);

}  // namespace negai
