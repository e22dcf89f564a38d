#include "negai/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "negai/errors.hpp"
#include "negai/io.hpp"
#include "negai/mechanisms.hpp"
#include "negai/metrics.hpp"

namespace negai {
namespace {

double young_share(const WardState& w) {
  const double total = w.population.total();
  return total > 0 ? w.population.young / total : 0.0;
}

void check_finite(const EconomyState& s) {
  auto bad = [&](const std::string& field, const WardState& w) {
    throw NumericalError(field, "non-finite " + field + " in ward '" + w.ward_id + "'");
  };
  for (const auto& w : s.wards) {
    if (!std::isfinite(w.ai_adoption)) bad("ai_adoption", w);
    if (!std::isfinite(w.digital_infrastructure)) bad("digital_infrastructure", w);
    if (!std::isfinite(w.human_capital)) bad("human_capital", w);
    if (!std::isfinite(w.network_field)) bad("network_field", w);
    if (!std::isfinite(w.spillover)) bad("spillover", w);
    if (!std::isfinite(w.other_employment)) bad("other_employment", w);
    for (double e : w.employment_by_industry)
      if (!std::isfinite(e)) bad("employment_by_industry", w);
    for (double a : w.adoption_by_industry)
      if (!std::isfinite(a)) bad("adoption_by_industry", w);
  }
  if (!s.connectivity.allFinite()) throw NumericalError("connectivity", "non-finite connectivity");
  if (!std::isfinite(s.shock_level)) throw NumericalError("shock_level", "non-finite shock level");
}

}  // namespace

Eigen::MatrixXd productivity_per_worker(const EconomyState& s, const ModelParams& p) {
  const std::size_t n = s.wards.size(), K = s.industries.size();
  Eigen::MatrixXd y(n, K);
  const double shock = std::exp(s.shock_level);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& w = s.wards[i];
    const double tfp = shock * (1.0 + ai_returns(w, p));
    for (std::size_t k = 0; k < K; ++k) {
      const double l = ces_labor(w.human_capital, p.ai_capital_floor + w.adoption_by_industry[k], p);
      y(i, k) = tfp * production(w.capital_intensity, l, 1.0, p);
    }
  }
  return y;
}

double aggregate_productivity(const EconomyState& s, const ModelParams& p) {
  const auto y = productivity_per_worker(s, p);
  const auto e = s.employment_matrix();
  double pop = 0;
  for (const auto& w : s.wards) pop += w.population.total();
  if (!(pop > 0)) throw UndefinedError("aggregate_productivity: empty population");
  return (y.array() * e.array()).sum() / pop;
}

Eigen::VectorXd virtual_access(const EconomyState& s, const ModelParams& p) {
  const auto n = static_cast<Eigen::Index>(s.wards.size());
  Eigen::VectorXd va = Eigen::VectorXd::Zero(n);
  if (n < 2) return va;
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i)
        acc += virtual_agglomeration(s.wards[i].ai_adoption, s.wards[j].ai_adoption,
                                     s.connectivity(i, j), p);
    va[i] = acc / (p.c_max * static_cast<double>(n - 1));
  }
  return va;
}

Eigen::MatrixXd attractiveness(const EconomyState& s, const ModelParams& p) {
  const std::size_t n = s.wards.size(), K = s.industries.size();
  const auto y = productivity_per_worker(s, p);
  const auto va = virtual_access(s, p);
  double area = 0;
  std::vector<double> emp_k(K, 0.0);
  for (const auto& w : s.wards) {
    area += w.area_km2;
    for (std::size_t k = 0; k < K; ++k) emp_k[k] += w.employment_by_industry[k];
  }
  Eigen::MatrixXd u(n, K);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& w = s.wards[i];
    const double ys = young_share(w);
    const double pull = ys > 0 ? p.central_pull * w.centrality * std::log(ys) : 0.0;
    const double common = p.virtual_access_weight * va[i] + pull;
    for (std::size_t k = 0; k < K; ++k) {
      // Own-industry density relative to the industry's economy-wide density.
      const double e = std::max(w.employment_by_industry[k], 1e-12);
      const double rel = emp_k[k] > 0 ? (e / w.area_km2) / (emp_k[k] / area) : 1.0;
      const double mu = p.agglomeration * ys * (1.0 + p.ai_agglomeration * w.adoption_by_industry[k]);
      const double amen = k < w.amenity.size() ? w.amenity[k] : 0.0;
      u(i, k) = std::log(y(i, k)) + common + (mu - p.congestion) * std::log(rel) + amen;
    }
  }
  return u;
}

void equilibrate_amenities(EconomyState& s, const ModelParams& p) {
  for (auto& w : s.wards) w.amenity.assign(s.industries.size(), 0.0);
  const auto u = attractiveness(s, p);
  for (std::size_t i = 0; i < s.wards.size(); ++i)
    for (std::size_t k = 0; k < s.industries.size(); ++k) s.wards[i].amenity[k] = -u(i, k);
}

void refresh_fields(EconomyState& s, const ModelParams& p) {
  refresh_ward_adoption(s);
  const auto spill = ai_spillovers(s, p);
  const auto net = network_externality(s, p);
  for (std::size_t i = 0; i < s.wards.size(); ++i) {
    s.wards[i].spillover = spill[i];
    s.wards[i].network_field = net[i];
  }
}

void pin_adoption_to_zero(EconomyState& s, const ModelParams& p) {
  for (auto& w : s.wards) std::fill(w.adoption_by_industry.begin(), w.adoption_by_industry.end(), 0.0);
  refresh_fields(s, p);
}

EconomyState step(const EconomyState& s, const ModelParams& p, const DemographicPath& demo) {
  p.validate();
  const std::size_t n = s.wards.size(), K = s.industries.size();
  const int t0 = s.year, t1 = s.year + 1;
  EconomyState next = s;
  next.year = t1;

  // (1) spillover and network fields at t.
  const auto spill = ai_spillovers(s, p);
  const auto net = network_externality(s, p);

  // (2) logistic adoption forced by spillovers and network externalities.
  for (std::size_t i = 0; i < n; ++i) {
    const double forcing = 1.0 + p.kappa_spillover * spill[i] + p.kappa_network * net[i];
    for (std::size_t k = 0; k < K; ++k) {
      const double mult = k < p.industries.size() ? p.industries[k].adoption_multiplier : 1.0;
      const double a = s.wards[i].adoption_by_industry[k];
      const double a1 = a + p.adoption_rate * mult * a * (1.0 - a) * forcing;
      next.wards[i].adoption_by_industry[k] = std::clamp(a1, 0.0, 1.0);
    }
  }

  // (3) demographics: ward age groups follow the aggregate path; employment
  // scales with the working-age population.
  const auto sh0 = demo.shares(t0), sh1 = demo.shares(t1);
  const double pop_ratio = demo.population_index(t1) / demo.population_index(t0);
  const double demo_scale = demo.working_age_population(t1) / demo.working_age_population(t0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& w = next.wards[i];
    const double ys_before = young_share(w);
    w.population.young *= pop_ratio * sh1.young / sh0.young;
    w.population.prime *= pop_ratio * sh1.prime / sh0.prime;
    w.population.elderly *= pop_ratio * sh1.elderly / sh0.elderly;
    const double ys_after = young_share(w);
    if (ys_before > 0 && ys_after > 0)
      w.human_capital *= std::pow(ys_after / ys_before, p.human_capital_age_elasticity);
    w.digital_infrastructure *= 1.0 + p.infrastructure_growth;
    for (auto& e : w.employment_by_industry) e *= demo_scale;
    w.other_employment *= demo_scale;
  }

  // Productivity shock: log level AR(1) with Bernoulli hits.
  {
    std::mt19937_64 rng(derive_seed(p.seed, static_cast<std::uint64_t>(t1)));
    std::bernoulli_distribution hit(p.shock_probability);
    const bool shocked = p.shock_probability > 0 && hit(rng);
    next.shock_level = p.shock_persistence * s.shock_level +
                       (shocked ? std::log1p(-p.shock_magnitude) : 0.0);
  }
  refresh_fields(next, p);

  // (4) logit reallocation within each industry; totals are preserved.
  if (p.migration_sensitivity > 0 && n > 1) {
    const auto u = attractiveness(next, p);
    for (std::size_t k = 0; k < K; ++k) {
      double total = 0, umax = -INFINITY;
      for (std::size_t i = 0; i < n; ++i) {
        total += next.wards[i].employment_by_industry[k];
        umax = std::max(umax, u(i, k));
      }
      if (!(total > 0)) continue;
      std::vector<double> w(n);
      double wsum = 0;
      for (std::size_t i = 0; i < n; ++i) {
        w[i] = next.wards[i].employment_by_industry[k] *
               std::exp(p.migration_sensitivity * (u(i, k) - umax));
        wsum += w[i];
      }
      for (std::size_t i = 0; i < n; ++i)
        next.wards[i].employment_by_industry[k] = total * w[i] / wsum;
    }
    refresh_ward_adoption(next);
  }

  // (5) connectivity drifts up with realized virtual collaboration.
  if (p.connectivity_drift > 0) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double q = next.connectivity(i, j);
        const double v = virtual_agglomeration(next.wards[i].ai_adoption, next.wards[j].ai_adoption, q, p);
        const double q1 = std::min(1.0, q + p.connectivity_drift * (1.0 - q) * v / p.c_max);
        next.connectivity(i, j) = next.connectivity(j, i) = q1;
      }
  }
  refresh_fields(next, p);
  check_finite(next);
  return next;
}

YearMetrics year_metrics(const EconomyState& s, const ModelParams& p) {
  YearMetrics m;
  m.year = s.year;
  m.concentration_index = concentration_index(s);
  m.productivity = aggregate_productivity(s, p);
  double emp = 0, central = 0, pop = 0, elderly = 0, young = 0, young_central = 0;
  for (const auto& w : s.wards) {
    double e = 0;
    for (double x : w.employment_by_industry) e += x;
    emp += e;
    if (w.is_central) {
      central += e;
      young_central += w.population.young;
    }
    pop += w.population.total();
    elderly += w.population.elderly;
    young += w.population.young;
  }
  m.employment = emp;
  m.central_employment_share = emp > 0 ? central / emp : 0;
  m.aging_index = pop > 0 ? elderly / pop : 0;
  m.young_central_share = young > 0 ? young_central / young : 0;
  const auto a = s.adoption();
  m.mean_adoption = a.mean();
  m.adoption_variance = (a.array() - m.mean_adoption).square().mean();
  return m;
}

const EconomyState& Trajectory::at_year(int year) const {
  for (const auto& s : states)
    if (s.year == year) return s;
  throw DomainError("trajectory has no year " + std::to_string(year));
}

Trajectory run(const EconomyState& initial, const ModelParams& p, const DemographicPath& demo,
               int horizon) {
  if (horizon < initial.year)
    throw ConfigError("run: horizon " + std::to_string(horizon) + " precedes initial year " +
                      std::to_string(initial.year));
  p.validate();
  Trajectory t;
  t.states.reserve(static_cast<std::size_t>(horizon - initial.year + 1));
  t.states.push_back(initial);
  t.derived.push_back(year_metrics(initial, p));
  while (t.states.back().year < horizon) {
    const int year = t.states.back().year + 1;
    try {
      t.states.push_back(step(t.states.back(), p, demo));
      t.derived.push_back(year_metrics(t.states.back(), p));
    } catch (const NumericalError& e) {
      throw SimulationError(year, std::string(e.what()) + " [field " + e.field() + "]");
    } catch (const std::exception& e) {
      throw SimulationError(year, e.what());
    }
  }
  return t;
}

std::string trajectory_csv(const Trajectory& t) {
  std::ostringstream out;
  out << "year,ward,industry,employment,adoption,location_quotient\n";
  for (const auto& s : t.states) {
    const auto full = employment_with_other(s);
    for (std::size_t i = 0; i < s.wards.size(); ++i)
      for (std::size_t k = 0; k < s.industries.size(); ++k) {
        out << s.year << ',' << s.wards[i].ward_id << ',' << s.industries[k].industry_id << ','
            << fmt_double(s.wards[i].employment_by_industry[k]) << ','
            << fmt_double(s.wards[i].adoption_by_industry[k]) << ','
            << fmt_double(location_quotient(full, i, k)) << '\n';
      }
  }
  return out.str();
}

nlohmann::json trajectory_summary(const Trajectory& t) {
  nlohmann::json years = nlohmann::json::array();
  for (const auto& m : t.derived)
    years.push_back({{"year", m.year},
                     {"concentration_index", m.concentration_index},
                     {"productivity", m.productivity},
                     {"employment", m.employment},
                     {"central_employment_share", m.central_employment_share},
                     {"aging_index", m.aging_index},
                     {"mean_adoption", m.mean_adoption},
                     {"adoption_variance", m.adoption_variance},
                     {"young_central_share", m.young_central_share}});
  return {{"first_year", t.derived.front().year},
          {"last_year", t.derived.back().year},
          {"final_aging_index", t.derived.back().aging_index},
          {"years", years}};
}

}  // namespace negai
