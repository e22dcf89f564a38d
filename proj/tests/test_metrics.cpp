#include <doctest.h>

#include <algorithm>
#include <random>

#include "negai/errors.hpp"
#include "negai/geography.hpp"
#include "negai/metrics.hpp"
#include "negai/params.hpp"
#include "support.hpp"

using namespace negai;

TEST_CASE("location quotient") {
  CHECK(location_quotient(Eigen::MatrixXd::Constant(4, 3, 7.0), 2, 1) == doctest::Approx(1.0).epsilon(1e-15));
  // Ward holds 40 of the industry's 100 and 100 of the economy's 1000.
  Eigen::MatrixXd e(2, 2);
  e << 40, 60, 60, 840;
  CHECK(location_quotient(e, 0, 0) == doctest::Approx(4.0).epsilon(1e-15));
  Eigen::MatrixXd z = e;
  z.col(0).setZero();
  CHECK_THROWS_AS(location_quotient(z, 0, 0), UndefinedError);
  z = e;
  z.row(1).setZero();
  CHECK_THROWS_AS(location_quotient(z, 1, 1), UndefinedError);
}

TEST_CASE("gini hand values") {
  const std::vector<double> flat{0.25, 0.25, 0.25, 0.25}, corner{0, 0, 0, 1}, ramp{0.1, 0.2, 0.3, 0.4};
  CHECK(gini(flat) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(gini(corner) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(gini(ramp) == doctest::Approx(0.25).epsilon(1e-14));
  const std::vector<double> zeros{0, 0, 0}, negative{0.5, -0.1};
  CHECK_THROWS_AS(gini(zeros), UndefinedError);
  CHECK_THROWS_AS(gini(negative), DomainError);
}

TEST_CASE("gini agrees with the pairwise oracle and is invariant") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int draw = 0; draw < 300; ++draw) {
    std::vector<double> v(2 + draw % 20);
    for (auto& x : v) x = u(rng) * u(rng);
    const double g = gini(v);
    CHECK(std::abs(g - test::gini_pairs(v)) <= 1e-12);
    CHECK(g >= 0);
    CHECK(g <= 1);
    auto w = v;
    std::shuffle(w.begin(), w.end(), rng);
    CHECK(std::abs(gini(w) - g) <= 1e-12);
    for (auto& x : w) x *= 37.5;
    CHECK(std::abs(gini(w) - g) <= 1e-12);
  }
  for (int draw = 0; draw < 200; ++draw) {
    double x = u(rng), y = u(rng) + 1e-3;
    if (x > y) std::swap(x, y);
    const std::vector<double> pair{x, y};
    CHECK(std::abs(gini(pair) - (y - x) / (2 * (x + y))) <= 1e-14);
  }
}

TEST_CASE("hhi") {
  const std::vector<double> one{1.0}, half{0.5, 0.5}, three{0.6, 0.3, 0.1}, bad{0.5, 0.4};
  CHECK(hhi(one) == 1.0);
  CHECK(hhi(half) == 0.5);
  CHECK(hhi(three) == doctest::Approx(0.46).epsilon(1e-14));
  CHECK_THROWS_AS(hhi(bad), DomainError);

  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int draw = 0; draw < 200; ++draw) {
    std::vector<double> v(1 + draw % 15);
    double s = 0;
    for (auto& x : v) s += (x = u(rng));
    for (auto& x : v) x /= s;
    const double h = hhi(v);
    CHECK(h >= 1.0 / v.size() - 1e-12);
    CHECK(h <= 1.0 + 1e-12);
    std::shuffle(v.begin(), v.end(), rng);
    CHECK(std::abs(hhi(v) - h) <= 1e-12);
  }
}

namespace {

EconomyState with_employment(const Eigen::MatrixXd& e) {
  EconomyState s = test::line_state(static_cast<std::size_t>(e.rows()));
  s.industries.resize(static_cast<std::size_t>(e.cols()));
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    auto& w = s.wards[static_cast<std::size_t>(i)];
    w.employment_by_industry.clear();
    for (Eigen::Index k = 0; k < e.cols(); ++k) w.employment_by_industry.push_back(e(i, k));
    w.adoption_by_industry.assign(static_cast<std::size_t>(e.cols()), 0.0);
  }
  return s;
}

}  // namespace

TEST_CASE("concentration index") {
  CHECK(concentration_index(with_employment(Eigen::MatrixXd::Constant(4, 1, 3.0))) == doctest::Approx(0.0));
  Eigen::MatrixXd corner = Eigen::MatrixXd::Zero(4, 1);
  corner(3, 0) = 5;
  CHECK(concentration_index(with_employment(corner)) == doctest::Approx(0.75).epsilon(1e-15));

  // Two industries of equal size with Ginis 0.2 and 0.4 (two wards: (y-x)/(2(x+y))).
  Eigen::MatrixXd two(2, 2);
  two << 3, 1, 7, 9;
  CHECK(concentration_index(with_employment(two)) == doctest::Approx(0.3).epsilon(1e-14));

  CHECK_THROWS_AS(concentration_index(with_employment(Eigen::MatrixXd::Zero(3, 2))), UndefinedError);
}

TEST_CASE("concentration index is scale invariant") {
  const auto s = build_initial_state(ModelParams::defaults());
  auto t = s;
  for (auto& w : t.wards)
    for (auto& e : w.employment_by_industry) e *= 3.25;
  CHECK(std::abs(concentration_index(t) - concentration_index(s)) <= 1e-12);
}

TEST_CASE("coefficient of variation") {
  const std::vector<double> flat{2, 2, 2}, pair{1, 3}, table{0.084, 0.041, 0.012}, zero{-1, 1};
  CHECK(coefficient_of_variation(flat) == 0.0);
  CHECK(coefficient_of_variation(pair) == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-14));
  CHECK(coefficient_of_variation(table) == doctest::Approx(0.79).epsilon(0.01));
  CHECK_THROWS_AS(coefficient_of_variation(zero), UndefinedError);
}

TEST_CASE("concentration report on the default geography") {
  const auto s = build_initial_state(ModelParams::defaults());
  const auto r = concentration_report(s);
  REQUIRE(r.industries.size() == 6);
  for (const auto& c : r.industries) {
    CHECK(c.location_quotient.size() == 23);
    CHECK(c.gini >= 0);
    CHECK(c.gini <= 1);
    CHECK(c.ai_adoption_rate >= 0);
  }
  const auto p = peripheral_wards(s);
  CHECK(p.size() == 5);
  CHECK(std::is_sorted(p.begin(), p.end()));
  for (auto i : p) CHECK_FALSE(s.wards[i].is_central);
  const auto csv = to_csv(r);
  CHECK(csv.rfind("industry,location_quotient,gini,hhi,primary_ward", 0) == 0);
  CHECK(csv.find("\nAverage,") != std::string::npos);
}
