// Exogenous demographic drivers: elderly share, young share and population
// paths over 2000-2050.
#pragma once

#include <string>
#include <vector>

#include "negai/params.hpp"

namespace negai {

enum class Fertility { Low, Medium, High };

std::string to_string(Fertility f);
Fertility fertility_from_string(const std::string& s);

// 2050 endpoints of a projection regime; paths interpolate linearly from the
// 2023 historical values.
struct RegimeSpec {
  double elderly_share_2050 = 0.38;
  double young_share_2050 = 0.30;   // share of the 15+ population aged 15-39
  double young_inflow_2050 = 1.0;   // multiplier on the young share by 2050
  double population_growth = -0.002;  // per year after 2023
};

RegimeSpec default_regime(Fertility f);

struct AgeShares {
  double young;
  double prime;
  double elderly;
};

inline constexpr int kHistoryEndYear = 2023;
inline constexpr int kProjectionEndYear = 2050;

class DemographicPath {
 public:
  // History 2000-2023 (elderly share rising at params.aging_path_slope per
  // year from 0.15) followed by the regime's 2024-2050 projection.
  static DemographicPath make(Fertility regime, const RegimeSpec& spec, const ModelParams& params);
  static DemographicPath historical(const ModelParams& params) {
    return make(Fertility::Medium, default_regime(Fertility::Medium), params);
  }

  Fertility fertility_regime() const { return regime_; }
  int first_year() const { return first_year_; }
  int last_year() const { return first_year_ + static_cast<int>(elderly_.size()) - 1; }

  double elderly_share(int year) const;
  double young_share(int year) const;  // includes the inflow multiplier
  double young_inflow_multiplier(int year) const;
  double population_index(int year) const;
  AgeShares shares(int year) const;
  double working_age_population(int year) const;  // index units

 private:
  std::size_t idx(int year) const;
  Fertility regime_ = Fertility::Medium;
  int first_year_ = 2000;
  std::vector<double> elderly_, young_base_, inflow_, population_;
};

}  // namespace negai
