#include "negai/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "negai/errors.hpp"

namespace negai {
namespace {

void check_unit(double v, const char* name) {
  if (!(v >= 0 && v <= 1)) throw DomainError(std::string(name) + " must lie in [0,1]");
}

void check_dims(const EconomyState& s) {
  const auto n = static_cast<Eigen::Index>(s.wards.size());
  const Eigen::MatrixXd* mats[] = {&s.connectivity, &s.complementarity, &s.network_weights,
                                   &s.distances};
  for (const auto* m : mats)
    if (m->rows() != n || m->cols() != n)
      throw StructuralError("matrix dimension " + std::to_string(m->rows()) + "x" +
                            std::to_string(m->cols()) + " does not match " + std::to_string(n) +
                            " wards");
}

// x^e with the 0^e = 0 (e > 0) and 0^0 = 1 conventions.
double safe_pow(double x, double e) {
  if (x == 0) return e == 0 ? 1.0 : 0.0;
  return std::pow(x, e);
}

}  // namespace

double spatial_decay(double d, double q, const ModelParams& p) {
  if (!(d > 0)) throw DomainError("spatial_decay: distance must be > 0 (exclude self-pairs)");
  check_unit(q, "spatial_decay: connectivity");
  check_unit(p.alpha_mix, "spatial_decay: alpha");
  return p.alpha_mix * std::pow(d, -p.phi) + (1.0 - p.alpha_mix) * safe_pow(q, p.psi);
}

Eigen::VectorXd ai_spillovers(const EconomyState& s, const ModelParams& p) {
  check_dims(s);
  const auto n = static_cast<Eigen::Index>(s.wards.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double a = s.wards[j].ai_adoption;
      if (a == 0) continue;
      acc += a * s.complementarity(i, j) * spatial_decay(s.distances(i, j), s.connectivity(i, j), p);
    }
    out[i] = p.beta_learning * acc;
  }
  return out;
}

double ai_returns(double d, double a, double n, double h, const ModelParams& p) {
  if (d < 0 || a < 0 || n < 0 || h < 0) throw DomainError("ai_returns: negative input");
  return p.alpha_ai * safe_pow(d, p.delta) * safe_pow(a, p.gamma) * safe_pow(n, p.nu) *
         safe_pow(h, p.eta);
}

double ai_returns(const WardState& w, const ModelParams& p) {
  return ai_returns(w.digital_infrastructure, w.ai_adoption, w.network_field, w.human_capital, p);
}

double virtual_agglomeration(double a_i, double a_j, double q_ij, const ModelParams& p) {
  check_unit(a_i, "virtual_agglomeration: a_i");
  check_unit(a_j, "virtual_agglomeration: a_j");
  check_unit(q_ij, "virtual_agglomeration: q_ij");
  // 1 - e^-x rounds to 1 once x passes ~37; keep the bound strict.
  const double v = -p.c_max * std::expm1(-p.lambda * a_i * a_j * q_ij);
  return std::min(v, std::nextafter(p.c_max, 0.0));
}

double ces_labor(double h, double a, const ModelParams& p) {
  if (!(h > 0) || !(a > 0)) throw DomainError("ces_labor: inputs must be > 0");
  const double theta = p.ces_share;
  const double rho = p.ces_exponent;
  const double lh = std::log(h), la = std::log(a);
  if (rho == 1.0) return theta * h + (1.0 - theta) * a;
  if (std::abs(rho) < 1e-6) return std::exp(theta * lh + (1.0 - theta) * la);
  // log-sum-exp keeps large |rho| finite.
  const double x = std::log(theta) + rho * lh;
  const double y = std::log1p(-theta) + rho * la;
  const double m = std::max(x, y);
  const double lse = m + std::log(std::exp(x - m) + std::exp(y - m));
  return std::exp(lse / rho);
}

double production(double k, double l, double m, const ModelParams& p) {
  if (!(k > 0) || !(l > 0) || !(m > 0)) throw DomainError("production: inputs must be > 0");
  const auto& e = p.outer_elasticities;
  if (std::abs(e[0] + e[1] + e[2] - 1.0) > 1e-12)
    throw ConfigError("production: outer elasticities must sum to 1");
  return p.tfp * std::pow(k, e[0]) * std::pow(l, e[1]) * std::pow(m, e[2]);
}

double network_size(const EconomyState& s) {
  check_dims(s);
  const auto a = s.adoption();
  return a.dot(s.network_weights * a);
}

double network_gain(double size, const ModelParams& p) { return size / (size + p.network_gain); }

Eigen::VectorXd network_externality(const EconomyState& s, const ModelParams& p) {
  check_dims(s);
  if ((s.network_weights.array() < 0).any())
    throw DomainError("network_externality: negative network weight");
  const auto a = s.adoption();
  const double g = network_gain(a.dot(s.network_weights * a), p);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    double acc = 0;
    for (Eigen::Index j = 0; j < a.size(); ++j)
      if (j != i) acc += s.network_weights(i, j) * a[j];
    out[i] = p.gamma_network * acc * g;
  }
  return out;
}

}  // namespace negai
