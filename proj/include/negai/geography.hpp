// Synthetic 23-ward geography and the 2000 initial state.
#pragma once

#include <string>
#include <vector>

#include "negai/params.hpp"
#include "negai/types.hpp"

namespace negai {

struct WardSite {
  std::string name;
  double latitude;
  double longitude;
  double area_km2;
  double population_k;  // residents, thousands
  bool central;
};

// The 23 special wards, in fixed order.
const std::vector<WardSite>& ward_sites();

// The six modelled industries with their 2019 reference moments.
std::vector<IndustryProfile> default_industries();

inline constexpr int kBaseYear = 2000;

// Builds the 2000 state: endowments, employment, adoption seeds, matrices,
// and amenities that make the initial allocation a spatial equilibrium.
EconomyState build_initial_state(const ModelParams& params);

// Index of a ward by id; throws ConfigError if absent.
std::size_t ward_index(const EconomyState& state, const std::string& ward_id);

}  // namespace negai
