#include "negai/demography.hpp"

#include <algorithm>

#include "negai/errors.hpp"

namespace negai {

std::string to_string(Fertility f) {
  switch (f) {
    case Fertility::Low: return "Low";
    case Fertility::Medium: return "Medium";
    case Fertility::High: return "High";
  }
  return "Medium";
}

Fertility fertility_from_string(const std::string& s) {
  if (s == "Low") return Fertility::Low;
  if (s == "Medium") return Fertility::Medium;
  if (s == "High") return Fertility::High;
  throw ConfigError("unknown fertility regime '" + s + "'");
}

RegimeSpec default_regime(Fertility f) {
  switch (f) {
    case Fertility::Low: return {0.42, 0.27, 1.0, -0.004};
    case Fertility::Medium: return {0.38, 0.30, 1.0, -0.002};
    case Fertility::High: return {0.31, 0.33, 1.1, 0.002};
  }
  return {};
}

DemographicPath DemographicPath::make(Fertility regime, const RegimeSpec& spec,
                                      const ModelParams& params) {
  DemographicPath d;
  d.regime_ = regime;
  d.first_year_ = 2000;
  const int hist = kHistoryEndYear - d.first_year_;
  const double elderly_2023 = 0.15 + params.aging_path_slope * hist;
  const double young_2000 = 0.42, young_2023 = 0.33;
  if (regime != Fertility::High && spec.elderly_share_2050 < elderly_2023)
    throw ConfigError("Low/Medium regimes require a nondecreasing elderly share");
  if (!(spec.elderly_share_2050 > 0 && spec.elderly_share_2050 < 0.8) ||
      !(spec.young_share_2050 > 0) || !(spec.young_inflow_2050 > 0))
    throw ConfigError("demographic regime endpoints out of range");

  for (int y = d.first_year_; y <= kProjectionEndYear; ++y) {
    if (y <= kHistoryEndYear) {
      const double f = static_cast<double>(y - d.first_year_) / hist;
      d.elderly_.push_back(0.15 + params.aging_path_slope * (y - d.first_year_));
      d.young_base_.push_back(young_2000 + f * (young_2023 - young_2000));
      d.inflow_.push_back(1.0);
      d.population_.push_back(1.0 + 0.003 * (y - d.first_year_));
    } else {
      const double f = static_cast<double>(y - kHistoryEndYear) / (kProjectionEndYear - kHistoryEndYear);
      d.elderly_.push_back(elderly_2023 + f * (spec.elderly_share_2050 - elderly_2023));
      d.young_base_.push_back(young_2023 + f * (spec.young_share_2050 - young_2023));
      d.inflow_.push_back(1.0 + f * (spec.young_inflow_2050 - 1.0));
      d.population_.push_back(d.population_.back() * (1.0 + spec.population_growth));
    }
    const double young = d.young_base_.back() * d.inflow_.back();
    if (young + d.elderly_.back() >= 1.0)
      throw ConfigError("demographic path leaves no prime-age population in " + std::to_string(y));
  }
  return d;
}

std::size_t DemographicPath::idx(int year) const {
  if (year < first_year_ || year > last_year())
    throw DomainError("demographic path has no year " + std::to_string(year));
  return static_cast<std::size_t>(year - first_year_);
}

double DemographicPath::elderly_share(int year) const { return elderly_[idx(year)]; }
double DemographicPath::young_inflow_multiplier(int year) const { return inflow_[idx(year)]; }
double DemographicPath::young_share(int year) const {
  const auto i = idx(year);
  return young_base_[i] * inflow_[i];
}
double DemographicPath::population_index(int year) const { return population_[idx(year)]; }

AgeShares DemographicPath::shares(int year) const {
  const double e = elderly_share(year), y = young_share(year);
  return {y, 1.0 - e - y, e};
}

double DemographicPath::working_age_population(int year) const {
  return population_index(year) * (1.0 - elderly_share(year));
}

}  // namespace negai
