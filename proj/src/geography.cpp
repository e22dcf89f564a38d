#include "negai/geography.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "negai/dynamics.hpp"
#include "negai/errors.hpp"
#include "negai/mechanisms.hpp"

namespace negai {

const std::vector<WardSite>& ward_sites() {
  static const std::vector<WardSite> sites = {
      {"Chiyoda", 35.694, 139.754, 11.66, 67, true},
      {"Chuo", 35.671, 139.772, 10.21, 169, true},
      {"Minato", 35.658, 139.752, 20.37, 260, true},
      {"Shinjuku", 35.694, 139.703, 18.22, 349, true},
      {"Bunkyo", 35.708, 139.752, 11.29, 240, false},
      {"Taito", 35.713, 139.780, 10.11, 211, false},
      {"Sumida", 35.711, 139.801, 13.77, 272, false},
      {"Koto", 35.673, 139.817, 40.16, 524, false},
      {"Shinagawa", 35.609, 139.730, 22.84, 422, false},
      {"Meguro", 35.641, 139.698, 14.67, 288, false},
      {"Ota", 35.561, 139.716, 61.86, 748, false},
      {"Setagaya", 35.646, 139.653, 58.05, 943, false},
      {"Shibuya", 35.664, 139.698, 15.11, 243, true},
      {"Nakano", 35.708, 139.664, 15.59, 344, false},
      {"Suginami", 35.700, 139.637, 34.06, 591, false},
      {"Toshima", 35.726, 139.716, 13.01, 301, false},
      {"Kita", 35.753, 139.734, 20.61, 355, false},
      {"Arakawa", 35.736, 139.783, 10.16, 217, false},
      {"Itabashi", 35.751, 139.709, 32.22, 584, false},
      {"Nerima", 35.736, 139.652, 48.08, 752, false},
      {"Adachi", 35.775, 139.805, 53.25, 695, false},
      {"Katsushika", 35.743, 139.847, 34.80, 453, false},
      {"Edogawa", 35.707, 139.868, 49.90, 697, false},
  };
  return sites;
}

std::vector<IndustryProfile> default_industries() {
  // 2019 reference moments: LQ, Gini, HHI, adoption rate; 2000 size shares of
  // the six-industry total.
  return {
      {"IT", Readiness::High, 3.42, 0.68, 0.31, 0.347, "Shibuya", 0.14},
      {"Finance", Readiness::High, 2.87, 0.72, 0.28, 0.289, "Chiyoda", 0.11},
      {"Professional", Readiness::High, 2.34, 0.61, 0.22, 0.221, "Minato", 0.17},
      {"Manufacturing", Readiness::Medium, 0.78, 0.45, 0.15, 0.083, "Ota", 0.19},
      {"Retail", Readiness::Low, 1.12, 0.32, 0.08, 0.057, "Shinjuku", 0.22},
      {"Healthcare", Readiness::Medium, 0.95, 0.28, 0.06, 0.072, "Setagaya", 0.17},
  };
}

std::size_t ward_index(const EconomyState& state, const std::string& id) {
  for (std::size_t i = 0; i < state.wards.size(); ++i)
    if (state.wards[i].ward_id == id) return i;
  throw ConfigError("unknown ward '" + id + "'");
}

EconomyState build_initial_state(const ModelParams& params) {
  params.validate();
  const auto& g = params.geography;
  const auto& sites = ward_sites();
  const std::size_t n = sites.size();

  EconomyState s;
  s.year = kBaseYear;
  s.industries = default_industries();
  const std::size_t K = s.industries.size();

  // Local tangent-plane projection around Chiyoda, km.
  const double lat0 = sites[0].latitude, lon0 = sites[0].longitude;
  const double km_per_lon = 111.32 * std::cos(lat0 * M_PI / 180.0);
  double cx = 0, cy = 0;
  int ncentral = 0;
  s.wards.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& w = s.wards[i];
    w.ward_id = sites[i].name;
    w.position = {(sites[i].longitude - lon0) * km_per_lon, (sites[i].latitude - lat0) * 110.95};
    w.area_km2 = sites[i].area_km2;
    w.is_central = sites[i].central;
    if (w.is_central) {
      cx += w.position.x_km;
      cy += w.position.y_km;
      ++ncentral;
    }
  }
  cx /= ncentral;
  cy /= ncentral;

  std::mt19937_64 rng(g.seed);
  std::normal_distribution<double> z(0.0, 1.0);
  double mean_c = 0;
  for (auto& w : s.wards) {
    const double dist = std::hypot(w.position.x_km - cx, w.position.y_km - cy);
    w.centrality = std::exp(-dist / g.centrality_scale_km);
    mean_c += w.centrality / n;
  }
  std::vector<double> adoption_shift;
  for (auto& w : s.wards) {
    const double eps_d = z(rng), eps_h = z(rng), eps_a = z(rng);
    adoption_shift.push_back(std::exp(g.adoption_noise * eps_a));
    w.digital_infrastructure = std::exp(g.infrastructure_gradient * w.centrality + g.endowment_noise * eps_d);
    w.human_capital = std::exp(g.human_capital_gradient * w.centrality + g.endowment_noise * eps_h);
    w.capital_intensity = std::exp(g.capital_gradient * w.centrality);
  }

  // Population (thousands of residents 15+): 15% elderly; central wards younger.
  double pop_total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto& w = s.wards[i];
    const double pop = sites[i].population_k;
    const double elderly = 0.15;
    const double young = std::clamp(0.42 + 0.08 * (w.centrality - mean_c), 0.2, 0.6);
    w.population = {pop * young, pop * (1.0 - elderly - young), pop * elderly};
    pop_total += pop;
  }

  // Employment: participation 0.75 of working-age residents, relocated to
  // workplaces by industry-specific location weights.
  double working = 0;
  for (const auto& w : s.wards) working += 0.75 * w.population.working_age();
  const double background = g.background_share * working;
  const double modelled = working - background;
  for (std::size_t i = 0; i < n; ++i)
    s.wards[i].other_employment = background * sites[i].population_k / pop_total;

  for (auto& w : s.wards) {
    w.employment_by_industry.assign(K, 0.0);
    w.adoption_by_industry.assign(K, 0.0);
    w.amenity.assign(K, 0.0);
  }
  double dh_mean = 0;
  for (const auto& w : s.wards) dh_mean += w.digital_infrastructure * w.human_capital / n;

  for (std::size_t k = 0; k < K; ++k) {
    const auto& knob = params.industries[k];
    const std::size_t anchor = ward_index(s, s.industries[k].primary_ward);
    std::vector<double> weight(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& w = s.wards[i];
      const double d = std::hypot(w.position.x_km - s.wards[anchor].position.x_km,
                                  w.position.y_km - s.wards[anchor].position.y_km);
      weight[i] = sites[i].population_k * std::exp(knob.central_tilt * (w.is_central ? 1.0 : 0.0) - d / knob.anchor_decay_km);
    }
    const double wsum = std::accumulate(weight.begin(), weight.end(), 0.0);
    const double total_k = modelled * s.industries[k].size_share;
    for (std::size_t i = 0; i < n; ++i) {
      auto& w = s.wards[i];
      w.employment_by_industry[k] = total_k * weight[i] / wsum;
      const double dh = w.digital_infrastructure * w.human_capital / dh_mean;
      w.adoption_by_industry[k] =
          std::min(0.5, knob.adoption_seed * adoption_shift[i] * std::pow(dh, g.adoption_endowment_elasticity));
    }
  }
  refresh_ward_adoption(s);

  s.distances = Eigen::MatrixXd::Zero(n, n);
  s.connectivity = Eigen::MatrixXd::Identity(n, n);
  s.complementarity = Eigen::MatrixXd::Identity(n, n);
  s.network_weights = Eigen::MatrixXd::Zero(n, n);
  double dmax = 0;
  for (const auto& w : s.wards) dmax = std::max(dmax, w.digital_infrastructure);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto& a = s.wards[i];
      const auto& b = s.wards[j];
      s.distances(i, j) = std::hypot(a.position.x_km - b.position.x_km, a.position.y_km - b.position.y_km);
      s.connectivity(i, j) = std::min(
          1.0, g.connectivity_base * std::sqrt(a.digital_infrastructure * b.digital_infrastructure) / dmax);
      double dot = 0, na = 0, nb = 0;
      for (std::size_t k = 0; k < K; ++k) {
        dot += a.employment_by_industry[k] * b.employment_by_industry[k];
        na += a.employment_by_industry[k] * a.employment_by_industry[k];
        nb += b.employment_by_industry[k] * b.employment_by_industry[k];
      }
      s.complementarity(i, j) = dot / std::sqrt(na * nb);
      s.network_weights(i, j) = std::exp(-s.distances(i, j) / g.network_scale_km);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double row = s.network_weights.row(i).sum();
    if (row > 0) s.network_weights.row(i) /= row;
  }

  const auto spill = ai_spillovers(s, params);
  const auto net = network_externality(s, params);
  for (std::size_t i = 0; i < n; ++i) {
    s.wards[i].spillover = spill[i];
    s.wards[i].network_field = net[i];
  }
  equilibrate_amenities(s, params);
  s.validate();
  return s;
}

}  // namespace negai
