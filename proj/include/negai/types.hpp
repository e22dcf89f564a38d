// Domain types: wards, industries, and the full economy cross-section.
#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "negai/params.hpp"

namespace negai {

enum class Readiness { High, Medium, Low };

std::string to_string(Readiness r);
Readiness readiness_from_string(const std::string& s);

struct Position {
  double x_km = 0;
  double y_km = 0;
};

// Working-age split used throughout: young 15-39, prime 40-64, elderly 65+.
struct AgePopulation {
  double young = 0;
  double prime = 0;
  double elderly = 0;

  double total() const { return young + prime + elderly; }
  double working_age() const { return young + prime; }
};

struct WardState {
  std::string ward_id;
  Position position;
  double area_km2 = 1;
  double centrality = 0;  // exp(-distance to CBD / scale), in (0,1]

  double ai_adoption = 0;            // A: employment-weighted mean of adoption_by_industry
  double digital_infrastructure = 1; // D > 0
  double human_capital = 1;          // H > 0
  double network_field = 0;          // N >= 0, network externality
  double spillover = 0;              // S >= 0, AI spillover
  double capital_intensity = 1;      // capital per worker index

  AgePopulation population;
  std::vector<double> employment_by_industry;   // one entry per industry
  std::vector<double> adoption_by_industry;     // [0,1] per industry
  std::vector<double> amenity;                  // per industry, pins the t0 equilibrium
  double other_employment = 0;                  // employment outside the six industries
  bool is_central = false;

  double employment_total() const;  // six industries + other
};

struct IndustryProfile {
  std::string industry_id;
  Readiness ai_readiness = Readiness::Medium;
  double baseline_lq = 1;
  double baseline_gini = 0;
  double baseline_hhi = 0;
  double baseline_ai_rate = 0;  // fraction
  std::string primary_ward;
  double size_share = 0;  // share of economy-wide employment in 2000
};

struct EconomyState {
  int year = 2000;
  std::vector<WardState> wards;
  std::vector<IndustryProfile> industries;
  Eigen::MatrixXd connectivity;     // Q, symmetric, [0,1]
  Eigen::MatrixXd complementarity;  // K, symmetric, >= 0
  Eigen::MatrixXd network_weights;  // w, >= 0, zero diagonal
  Eigen::MatrixXd distances;        // d, symmetric, zero diagonal, km
  double shock_level = 0;           // log productivity shock

  std::size_t ward_count() const { return wards.size(); }
  std::size_t industry_count() const { return industries.size(); }

  Eigen::VectorXd adoption() const;  // ward A vector
  // ward x industry employment (six industries only).
  Eigen::MatrixXd employment_matrix() const;

  // Throws StructuralError / DomainError on any broken invariant.
  void validate() const;
};

// Recomputes each ward's A from its industry adoption and employment mix.
void refresh_ward_adoption(EconomyState& state);

}  // namespace negai
