// Shared fixtures and brute-force oracles for the unit tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "negai/panel.hpp"
#include "negai/types.hpp"

namespace negai::test {

// n wards on a line, `spacing` km apart, one industry, unit matrices.
inline EconomyState line_state(std::size_t n, double spacing = 1.0) {
  EconomyState s;
  IndustryProfile ind;
  ind.industry_id = "X";
  s.industries = {ind};
  for (std::size_t i = 0; i < n; ++i) {
    WardState w;
    w.ward_id = "w" + std::to_string(i);
    w.position = {spacing * static_cast<double>(i), 0.0};
    w.employment_by_industry = {1.0};
    w.adoption_by_industry = {0.0};
    w.amenity = {0.0};
    w.population = {1, 1, 1};
    s.wards.push_back(w);
  }
  const auto m = static_cast<Eigen::Index>(n);
  s.distances = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) s.distances(i, j) = spacing * std::abs(static_cast<double>(i - j));
  s.connectivity = Eigen::MatrixXd::Zero(m, m);
  s.complementarity = Eigen::MatrixXd::Ones(m, m);
  s.network_weights = Eigen::MatrixXd::Zero(m, m);
  return s;
}

inline void set_adoption(EconomyState& s, const std::vector<double>& a) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    s.wards[i].ai_adoption = a[i];
    s.wards[i].adoption_by_industry.assign(s.wards[i].adoption_by_industry.size(), a[i]);
  }
}

// Mean absolute difference over all ordered pairs / (2 mean): the textbook
// population Gini, independent of the sorted-index formula.
inline double gini_pairs(const std::vector<double>& v) {
  double s = 0, total = 0;
  for (double a : v) {
    total += a;
    for (double b : v) s += std::abs(a - b);
  }
  const double n = static_cast<double>(v.size());
  return s / (2.0 * n * total);
}

// Full dummy-variable OLS of y on [X, unit dummies, year dummies (first
// dropped)], returning the coefficients on X.
inline Eigen::VectorXd dummy_regression(const PanelDataset& p, const Eigen::MatrixXd& X) {
  std::map<std::pair<std::string, std::string>, int> unit;
  std::map<int, int> year;
  for (const auto& r : p.rows) {
    unit.emplace(std::make_pair(r.ward, r.industry), static_cast<int>(unit.size()));
    year.emplace(r.year, 0);
  }
  int k = 0;
  for (auto& [y, idx] : year) idx = k++;
  const auto n = static_cast<Eigen::Index>(p.rows.size());
  const Eigen::Index cols = X.cols() + static_cast<Eigen::Index>(unit.size() + year.size() - 1);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, cols);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = p.rows[static_cast<std::size_t>(i)];
    D.row(i).head(X.cols()) = X.row(i);
    D(i, X.cols() + unit.at({r.ward, r.industry})) = 1;
    const int t = year.at(r.year);
    if (t > 0) D(i, X.cols() + static_cast<Eigen::Index>(unit.size()) + t - 1) = 1;
    y[i] = r.y;
  }
  const Eigen::VectorXd b = D.colPivHouseholderQr().solve(y);
  return b.head(X.cols());
}

inline Eigen::MatrixXd treatment_column(const PanelDataset& p) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(p.rows.size()), 1);
  for (std::size_t i = 0; i < p.rows.size(); ++i) X(static_cast<Eigen::Index>(i), 0) = p.rows[i].treated_at(p.rows[i].year);
  return X;
}

// A small panel: `wards` wards x `industries` industries x `years` years,
// the first `treated` wards treated from `start`.
inline PanelDataset tiny_panel(int wards, int industries, int years, int treated, int start, std::uint64_t seed,
                               double effect = 0.3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  PanelDataset p;
  for (int w = 0; w < wards; ++w)
    for (int k = 0; k < industries; ++k)
      for (int t = 0; t < years; ++t) {
        PanelRow r;
        r.ward = "w" + std::to_string(w);
        r.industry = "i" + std::to_string(k);
        r.year = 2000 + t;
        r.treat_year = w < treated ? 2000 + start : kNeverTreated;
        r.infra_quartile = 1 + w % 4;
        r.hc_tertile = 1 + w % 3;
        r.readiness = static_cast<Readiness>(k % 3);
        r.infrastructure = 0.1 * w;
        r.human_capital = 0.2 * (w % 3) - 0.2;
        r.y = 0.1 * w + 0.05 * k + 0.02 * t + 0.05 * z(rng) + (r.treated_at(r.year) ? effect : 0.0);
        p.rows.push_back(r);
      }
  return p;
}

// Scratch directory under the build tree, emptied on construction.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("negai_test_" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace negai::test
