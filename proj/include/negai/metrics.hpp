// Concentration and dispersion measures.
#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "negai/types.hpp"

namespace negai {

// (E_ik / E_.k) / (E_i. / E_..). Throws UndefinedError naming the empty margin.
double location_quotient(const Eigen::MatrixXd& employment, std::size_t ward, std::size_t industry);

// Population Gini via the sorted-index formula. Throws UndefinedError if the
// vector has no positive entry, DomainError on negative entries.
double gini(std::span<const double> values);

// Sum of squared shares; shares must sum to 1 within 1e-9.
double hhi(std::span<const double> shares);

// Employment-weighted mean over industries of the Gini of ward shares.
double concentration_index(const EconomyState& state);

// Sample sd (n-1) over |mean|.
double coefficient_of_variation(std::span<const double> values);

// Ward x (industries + other) matrix used for LQ denominators.
Eigen::MatrixXd employment_with_other(const EconomyState& state);

// The five wards farthest from the centroid of the central wards, ascending index.
std::vector<std::size_t> peripheral_wards(const EconomyState& state);

struct IndustryConcentration {
  std::string industry_id;
  std::vector<double> location_quotient;  // per ward
  double central_lq = 0;  // central-ward aggregate LQ: headline LQ column
  double gini = 0;
  double hhi = 0;
  std::string primary_ward;  // argmax LQ, lowest index on ties
  double central_share = 0;
  double peripheral_share = 0;
  double ai_adoption_rate = 0;  // employment-weighted adoption, fraction
};

struct ConcentrationReport {
  int year = 0;
  std::vector<IndustryConcentration> industries;
  double mean_central_lq = 0;
  double mean_gini = 0;
  double mean_hhi = 0;
  double mean_central_share = 0;
  double mean_peripheral_share = 0;
  double mean_ai_adoption_rate = 0;
};

ConcentrationReport concentration_report(const EconomyState& state);

// CSV, one row per industry plus a trailing Average row.
std::string to_csv(const ConcentrationReport& report);

}  // namespace negai
