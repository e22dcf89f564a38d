#include <doctest.h>

#include <cmath>
#include <random>

#include "negai/errors.hpp"
#include "negai/mechanisms.hpp"
#include "support.hpp"

using namespace negai;
using negai::test::line_state;
using negai::test::set_adoption;

namespace {

ModelParams unit_params() {
  ModelParams p;
  p.alpha_mix = 0.5;
  p.phi = 1;
  p.psi = 1;
  return p;
}

}  // namespace

TEST_CASE("spatial decay hand values") {
  ModelParams p = unit_params();
  p.alpha_mix = 1;
  p.phi = 2;
  CHECK(spatial_decay(1.0, 0.37, p) == doctest::Approx(1.0).epsilon(1e-15));
  p.alpha_mix = 0;
  p.psi = 3;
  CHECK(spatial_decay(5.0, 1.0, p) == doctest::Approx(1.0).epsilon(1e-15));
  p.alpha_mix = 0.5;
  p.phi = 1;
  p.psi = 0.5;
  CHECK(spatial_decay(2.0, 0.25, p) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(spatial_decay(0.0, 0.5, p), DomainError);
  CHECK_THROWS_AS(spatial_decay(1.0, 1.5, p), DomainError);
}

TEST_CASE("spatial decay is monotone over 1000 random draws") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  for (int draw = 0; draw < 1000; ++draw) {
    ModelParams p;
    p.alpha_mix = u(rng);
    p.phi = 0.1 + 3 * u(rng);
    p.psi = 0.1 + 3 * u(rng);
    const double d1 = 0.1 + 20 * u(rng), d2 = d1 + 0.01 + 20 * u(rng);
    const double q1 = u(rng), q2 = q1 + (1 - q1) * u(rng);
    const double q = u(rng), d = 0.1 + 20 * u(rng);
    if (spatial_decay(d1, q, p) < spatial_decay(d2, q, p)) ++violations;
    if (spatial_decay(d, q1, p) > spatial_decay(d, q2, p)) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("spillovers: hand values, symmetry, linearity") {
  ModelParams p = unit_params();
  auto s = line_state(2);
  CHECK(ai_spillovers(s, p).cwiseAbs().maxCoeff() == 0.0);

  // beta = 1, A_2 = 0.5, K_12 = 2, Omega = 0.5 (alpha = 1, phi = 1, d = 2).
  s = line_state(2, 2.0);
  p.beta_learning = 1;
  p.alpha_mix = 1;
  s.complementarity.setConstant(2.0);
  set_adoption(s, {0.0, 0.5});
  CHECK(ai_spillovers(s, p)[0] == doctest::Approx(0.5).epsilon(1e-15));

  // Three wards on an equilateral triangle: equal spillovers.
  auto t = line_state(3);
  t.distances.setConstant(1.5);
  t.distances.diagonal().setZero();
  t.connectivity.setConstant(0.4);
  set_adoption(t, {0.3, 0.3, 0.3});
  const auto S = ai_spillovers(t, unit_params());
  CHECK(S[0] == S[1]);
  CHECK(S[1] == S[2]);
}

TEST_CASE("spillovers are exactly linear in beta_learning and adoption") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int draw = 0; draw < 200; ++draw) {
    auto s = line_state(5, 0.5 + u(rng));
    for (Eigen::Index i = 0; i < 5; ++i)
      for (Eigen::Index j = 0; j < 5; ++j) {
        s.connectivity(i, j) = u(rng);
        s.complementarity(i, j) = 2 * u(rng);
      }
    std::vector<double> a;
    for (int i = 0; i < 5; ++i) a.push_back(0.5 * u(rng));
    set_adoption(s, a);
    ModelParams p = unit_params();
    p.beta_learning = 0.125 + u(rng);
    const Eigen::VectorXd base = ai_spillovers(s, p);
    ModelParams p2 = p;
    p2.beta_learning = 2 * p.beta_learning;  // doubling is exact in binary floating point
    CHECK((ai_spillovers(s, p2) - 2 * base).cwiseAbs().maxCoeff() == 0.0);
    ModelParams p3 = p;
    p3.beta_learning = 3 * p.beta_learning;
    CHECK((ai_spillovers(s, p3) - 3 * base).cwiseAbs().maxCoeff() <= 1e-15 * (1 + base.cwiseAbs().maxCoeff()));
    for (auto& x : a) x *= 2;
    set_adoption(s, a);
    CHECK((ai_spillovers(s, p) - 2 * base).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("AI returns") {
  ModelParams p;
  CHECK(ai_returns(1, 1, 1, 1, p) == doctest::Approx(p.alpha_ai).epsilon(1e-15));
  p.delta = 0.5;
  CHECK(ai_returns(4, 0.3, 0.7, 2, p) / ai_returns(1, 0.3, 0.7, 2, p) == doctest::Approx(2.0).epsilon(1e-14));
  p.alpha_ai = 2;
  p.gamma = 1;
  p.nu = 0;
  p.eta = 0.5;
  CHECK(ai_returns(4, 0.25, 1, 9, p) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(ai_returns(4, 0.0, 1, 9, p) == 0.0);
  p.gamma = 0;
  CHECK(ai_returns(4, 0.0, 1, 9, p) == doctest::Approx(12.0).epsilon(1e-14));
  CHECK_THROWS_AS(ai_returns(-1, 0.5, 1, 1, p), DomainError);
}

TEST_CASE("virtual agglomeration: values, saturation, slope at zero") {
  ModelParams p;
  CHECK(virtual_agglomeration(0, 0.7, 0.9, p) == 0.0);
  p.c_max = 1;
  p.lambda = 1;
  CHECK(virtual_agglomeration(1, 1, std::log(2.0), p) == doctest::Approx(0.5).epsilon(1e-15));
  p.c_max = 3;
  p.lambda = 1e6;
  CHECK(std::abs(virtual_agglomeration(1, 1, 1, p) - 3) <= 1e-9);
  CHECK(virtual_agglomeration(1, 1, 1, p) < 3);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int reached = 0;
  for (int draw = 0; draw < 1000; ++draw) {
    ModelParams q;
    q.c_max = 0.1 + 10 * u(rng);
    q.lambda = 10 * u(rng);
    if (!(virtual_agglomeration(u(rng), u(rng), u(rng), q) < q.c_max)) ++reached;
  }
  CHECK(reached == 0);

  // d/da_i at a_i = 0 equals c_max lambda a_j q.
  ModelParams q;
  q.c_max = 2;
  q.lambda = 3;
  const double aj = 0.4, qij = 0.7, h = 1e-6;
  const double fd = (virtual_agglomeration(h, aj, qij, q) - virtual_agglomeration(0, aj, qij, q)) / h;
  const double exact = q.c_max * q.lambda * aj * qij;
  CHECK(std::abs(fd - exact) / exact <= 1e-4);
}

TEST_CASE("CES labour aggregate limits") {
  ModelParams p;
  p.ces_share = 0.42;
  p.ces_exponent = -0.7;
  CHECK(ces_labor(1, 1, p) == doctest::Approx(1.0).epsilon(1e-15));

  p.ces_share = 0.3;
  p.ces_exponent = 1.0;
  CHECK(ces_labor(2, 1, p) == doctest::Approx(1.3).epsilon(1e-15));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int draw = 0; draw < 200; ++draw) {
    const double h = 0.1 + 5 * u(rng), a = 0.1 + 5 * u(rng), th = 0.05 + 0.9 * u(rng);
    p.ces_share = th;
    p.ces_exponent = 1.0;
    CHECK(ces_labor(h, a, p) == th * h + (1 - th) * a);
    p.ces_exponent = 1e-8;
    const double geo = std::pow(h, th) * std::pow(a, 1 - th);
    CHECK(std::abs(ces_labor(h, a, p) - geo) <= 1e-6);
    p.ces_exponent = 0.0;
    CHECK(std::abs(ces_labor(h, a, p) - geo) <= 1e-12 * geo);
    p.ces_exponent = -500;
    CHECK(std::abs(ces_labor(h, a, p) / std::min(h, a) - 1) <= 0.01);
  }

  p.ces_share = 0.5;
  p.ces_exponent = 1e-8;
  CHECK(std::abs(ces_labor(4, 1, p) - 2.0) <= 1e-6);
}

TEST_CASE("outer production is CRS Cobb-Douglas") {
  ModelParams p;
  p.tfp = 1;
  CHECK(production(1, 1, 1, p) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(production(2.4, 1.6, 0.8, p) == doctest::Approx(production(1.2, 0.8, 0.4, p) * 2).epsilon(1e-14));
  p.outer_elasticities = {0.3, 0.5, 0.2};
  CHECK(production(1, 4, 1, p) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("network externality") {
  ModelParams p;
  auto s = line_state(2);
  set_adoption(s, {0.5, 0.5});
  CHECK(network_externality(s, p).cwiseAbs().maxCoeff() == 0.0);

  s.network_weights << 0, 1, 0, 0;
  set_adoption(s, {0.5, 1.0});
  p.gamma_network = 1;
  p.network_gain = 1e-300;  // G -> 1
  CHECK(network_externality(s, p)[0] == doctest::Approx(1.0).epsilon(1e-12));

  s.network_weights << 0, 0.5, 0.5, 0;
  set_adoption(s, {1.0, 1.0});
  p.gamma_network = 2;
  p.network_gain = 1;
  CHECK(network_size(s) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(network_gain(network_size(s), p) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(network_externality(s, p)[0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("mechanisms are pure") {
  auto s = line_state(4, 1.3);
  s.connectivity.setConstant(0.3);
  set_adoption(s, {0.1, 0.4, 0.2, 0.9});
  s.network_weights.setConstant(0.2);
  s.network_weights.diagonal().setZero();
  const ModelParams p = ModelParams::defaults();
  const Eigen::VectorXd a = ai_spillovers(s, p), b = ai_spillovers(s, p);
  CHECK(a == b);
  CHECK(network_externality(s, p) == network_externality(s, p));
  CHECK(ces_labor(1.7, 0.3, p) == ces_labor(1.7, 0.3, p));
}

TEST_CASE("shape mismatch is a structural error") {
  auto s = line_state(3);
  s.connectivity = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(ai_spillovers(s, ModelParams{}), StructuralError);
}
