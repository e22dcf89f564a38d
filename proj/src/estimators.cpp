#include "negai/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "negai/errors.hpp"
#include "negai/io.hpp"

namespace negai {

std::string to_string(Method m) {
  switch (m) {
    case Method::DiD: return "Difference-in-Differences";
    case Method::EventStudy: return "Event Study";
    case Method::SyntheticControl: return "Synthetic Control";
    case Method::IV: return "Instrumental Variables";
    case Method::PSM: return "Propensity Score Matching";
  }
  return "?";
}

std::string method_tag(Method m) {
  switch (m) {
    case Method::DiD: return "did";
    case Method::EventStudy: return "event_study";
    case Method::SyntheticControl: return "synthetic_control";
    case Method::IV: return "iv";
    case Method::PSM: return "psm";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  std::string t;
  for (char c : s) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t == "did") return Method::DiD;
  if (t == "event_study" || t == "event" || t == "es") return Method::EventStudy;
  if (t == "synthetic_control" || t == "sc") return Method::SyntheticControl;
  if (t == "iv") return Method::IV;
  if (t == "psm") return Method::PSM;
  throw ConfigError("unknown estimator '" + s + "' (did, event_study, synthetic_control, iv, psm)");
}

nlohmann::json EstimateResult::to_json() const {
  nlohmann::json j{{"method", method}, {"n_obs", n_obs}, {"diagnostics", diagnostics}};
  if (ok()) {
    j["effect"] = effect;
    j["se"] = se;
    j["p_value"] = p_value;
    j["ci_lower"] = ci_lower;
    j["ci_upper"] = ci_upper;
  } else {
    for (const char* k : {"effect", "se", "p_value", "ci_lower", "ci_upper"}) j[k] = nullptr;
    j["error"] = error;
  }
  return j;
}

EstimateResult make_estimate(std::string method, double effect, double se, std::size_t n_obs) {
  if (!std::isfinite(effect) || !std::isfinite(se) || se < 0)
    throw IdentificationError("non-finite estimate or standard error");
  EstimateResult r;
  r.method = std::move(method);
  r.effect = effect;
  r.se = se;
  r.ci_lower = effect - 1.96 * se;
  r.ci_upper = effect + 1.96 * se;
  r.p_value = se > 0 ? normal_two_sided_p(effect / se) : (effect == 0 ? 1.0 : 0.0);
  r.n_obs = n_obs;
  return r;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Panel prepared for two-way fixed effects.
struct Twfe {
  PanelIndex ix;
  Eigen::VectorXd y;
  std::size_t absorbed = 0;

  explicit Twfe(const PanelDataset& p) : ix(p.index()) {
    y.resize(static_cast<Eigen::Index>(p.rows.size()));
    for (std::size_t i = 0; i < p.rows.size(); ++i) y[i] = p.rows[i].y;
    absorbed = ix.unit_count + ix.years.size() - 1;
  }

  // Demeans [y, X] and fits OLS with CR1 by ward.
  LinearFit fit(const Eigen::MatrixXd& X) const {
    Eigen::MatrixXd M(X.rows(), X.cols() + 1);
    M << y, X;
    absorb_fixed_effects(M, {ix.unit_of_row, ix.year_of_row});
    return ols_cluster(M.rightCols(X.cols()), M.col(0), ix.ward_of_row, absorbed);
  }
};

Eigen::VectorXd treatment_indicator(const PanelDataset& p) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(p.rows.size()));
  for (std::size_t i = 0; i < p.rows.size(); ++i) d[i] = p.rows[i].treated_at(p.rows[i].year) ? 1.0 : 0.0;
  return d;
}

void require_controls(const Eigen::VectorXd& d) {
  if (d.sum() == 0) throw IdentificationError("no treated observations");
  if (d.sum() == d.size()) throw IdentificationError("no control observations");
}

EstimateResult failed(const std::string& method, const std::exception& e) {
  EstimateResult r;
  r.method = method;
  r.effect = r.se = r.ci_lower = r.ci_upper = r.p_value = kNaN;
  r.error = e.what();
  return r;
}

}  // namespace

EstimateResult estimate_did(const PanelDataset& panel, const EstimatorSpec&) {
  panel.validate();
  const Twfe tw(panel);
  const Eigen::VectorXd d = treatment_indicator(panel);
  require_controls(d);
  const auto fit = tw.fit(d);
  auto r = make_estimate(to_string(Method::DiD), fit.beta[0], fit.se(0), fit.n);
  r.diagnostics = {{"clusters", fit.clusters}, {"treated_units", panel.treated_units()}};
  return r;
}

const EventCoefficient& EventStudyResult::at(int k) const {
  for (const auto& c : coefficients)
    if (c.k == k) return c;
  throw DomainError("event time " + std::to_string(k) + " outside the window");
}

EventStudyResult estimate_event_study(const PanelDataset& panel, const EstimatorSpec& spec) {
  panel.validate();
  if (spec.window_min > -2 || spec.window_max < 0)
    throw ConfigError("event window must include k <= -2 and k >= 0");
  const Twfe tw(panel);
  const int lo = spec.window_min, hi = spec.window_max;
  const auto cells = static_cast<std::size_t>(hi - lo + 1);

  std::vector<int> cell_of_row(panel.rows.size(), -1);
  std::vector<std::size_t> count(cells, 0);
  for (std::size_t i = 0; i < panel.rows.size(); ++i) {
    const auto& r = panel.rows[i];
    if (r.treat_year == kNeverTreated) continue;
    const int k = std::clamp(r.year - r.treat_year, lo, hi);
    cell_of_row[i] = k - lo;
    ++count[k - lo];
  }
  // Regressors: every populated cell except the reference k = -1.
  std::vector<int> col_of_cell(cells, -1);
  int ncol = 0;
  for (std::size_t c = 0; c < cells; ++c)
    if (count[c] > 0 && static_cast<int>(c) + lo != -1) col_of_cell[c] = ncol++;
  if (ncol == 0) throw IdentificationError("no populated event-time cells");
  bool has_control = false;
  for (std::size_t i = 0; i < panel.rows.size(); ++i)
    if (!panel.rows[i].treated_at(panel.rows[i].year)) has_control = true;
  if (!has_control) throw IdentificationError("no control observations");

  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(panel.rows.size()), ncol);
  for (std::size_t i = 0; i < panel.rows.size(); ++i)
    if (cell_of_row[i] >= 0 && col_of_cell[cell_of_row[i]] >= 0) X(i, col_of_cell[cell_of_row[i]]) = 1.0;
  const auto fit = tw.fit(X);

  EventStudyResult out;
  std::vector<int> pre_cols, post_cols;
  std::vector<double> post_weights;
  for (std::size_t c = 0; c < cells; ++c) {
    EventCoefficient e;
    e.k = static_cast<int>(c) + lo;
    e.n_obs = count[c];
    if (e.k == -1) {
      e.reference = true;
    } else if (col_of_cell[c] < 0) {
      e.missing = true;
      e.beta = e.se = e.ci_lower = e.ci_upper = kNaN;
    } else {
      const int j = col_of_cell[c];
      e.beta = fit.beta[j];
      e.se = fit.se(j);
      e.ci_lower = e.beta - 1.96 * e.se;
      e.ci_upper = e.beta + 1.96 * e.se;
      if (e.k < -1) pre_cols.push_back(j);
      if (e.k >= 0) {
        post_cols.push_back(j);
        post_weights.push_back(static_cast<double>(count[c]));
      }
    }
    out.coefficients.push_back(e);
  }

  if (!pre_cols.empty()) {
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(pre_cols.size()), ncol);
    for (std::size_t i = 0; i < pre_cols.size(); ++i) R(i, pre_cols[i]) = 1.0;
    out.pre_trend = wald_test(fit.beta, fit.vcov, R, Eigen::VectorXd::Zero(R.rows()), fit.clusters);
  }
  if (post_cols.empty()) throw IdentificationError("no post-treatment event-time cells");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(ncol);
  const double wsum = std::accumulate(post_weights.begin(), post_weights.end(), 0.0);
  for (std::size_t i = 0; i < post_cols.size(); ++i) w[post_cols[i]] = post_weights[i] / wsum;
  out.aggregate = make_estimate(to_string(Method::EventStudy), w.dot(fit.beta), std::sqrt(w.dot(fit.vcov * w)), fit.n);
  out.aggregate.diagnostics = {{"pre_trend_f", out.pre_trend.statistic},
                               {"pre_trend_p", out.pre_trend.p_value},
                               {"pre_trend_df", {out.pre_trend.df1, out.pre_trend.df2}},
                               {"clusters", fit.clusters}};
  return out;
}

double HeterogeneityResult::coefficient_of_variation() const {
  std::vector<double> v;
  for (const auto& g : groups) v.push_back(g.effect);
  if (v.size() < 2) throw UndefinedError("coefficient of variation needs two subgroups");
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  if (mean == 0) throw UndefinedError("coefficient of variation with zero mean effect");
  return std::sqrt(ss / (v.size() - 1)) / std::abs(mean);
}

namespace {

std::pair<int, std::string> group_of(const PanelRow& r, Grouping g) {
  switch (g) {
    case Grouping::Readiness:
      return {static_cast<int>(r.readiness), to_string(r.readiness)};
    case Grouping::Infrastructure:
      if (r.infra_quartile == 4) return {0, "High"};
      if (r.infra_quartile == 1) return {2, "Low"};
      return {1, "Medium"};
    case Grouping::HumanCapital:
      return {3 - r.hc_tertile, r.hc_tertile == 3 ? "High" : r.hc_tertile == 2 ? "Medium" : "Low"};
  }
  return {0, "?"};
}

}  // namespace

HeterogeneityResult estimate_heterogeneity(const PanelDataset& panel, Grouping grouping) {
  panel.validate();
  const Twfe tw(panel);
  const Eigen::VectorXd d = treatment_indicator(panel);
  require_controls(d);
  std::map<int, std::string> labels;
  std::map<int, std::size_t> rows_in, treated_in;
  for (std::size_t i = 0; i < panel.rows.size(); ++i) {
    const auto [g, label] = group_of(panel.rows[i], grouping);
    labels[g] = label;
    ++rows_in[g];
    if (d[i] > 0) ++treated_in[g];
  }
  std::vector<int> gs;
  for (const auto& [g, n] : treated_in) gs.push_back(g);
  if (gs.size() < 2) throw IdentificationError("fewer than two subgroups contain treated observations");
  std::map<int, int> col;
  for (std::size_t c = 0; c < gs.size(); ++c) col[gs[c]] = static_cast<int>(c);

  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(d.size(), static_cast<Eigen::Index>(gs.size()));
  for (std::size_t i = 0; i < panel.rows.size(); ++i) {
    const int g = group_of(panel.rows[i], grouping).first;
    if (d[i] > 0) X(i, col[g]) = 1.0;
  }
  const auto fit = tw.fit(X);

  HeterogeneityResult h;
  h.grouping = grouping;
  for (std::size_t c = 0; c < gs.size(); ++c) {
    SubgroupEffect s;
    s.label = labels[gs[c]];
    s.effect = fit.beta[c];
    s.se = fit.se(c);
    s.p_value = normal_two_sided_p(s.effect / s.se);
    s.n_obs = rows_in[gs[c]];
    h.groups.push_back(s);
  }
  const auto q = static_cast<Eigen::Index>(gs.size() - 1);
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(q, X.cols());
  for (Eigen::Index i = 0; i < q; ++i) {
    R(i, 0) = 1.0;
    R(i, i + 1) = -1.0;
  }
  h.equality = wald_test(fit.beta, fit.vcov, R, Eigen::VectorXd::Zero(q), fit.clusters);
  return h;
}

EstimateResult estimate_hc_interaction(const PanelDataset& panel) {
  panel.validate();
  const Twfe tw(panel);
  const Eigen::VectorXd d = treatment_indicator(panel);
  require_controls(d);
  Eigen::MatrixXd X(d.size(), 2);
  for (std::size_t i = 0; i < panel.rows.size(); ++i) {
    X(i, 0) = d[i];
    X(i, 1) = d[i] * panel.rows[i].human_capital;
  }
  const auto fit = tw.fit(X);
  auto r = make_estimate("AI x human capital", fit.beta[1], fit.se(1), fit.n);
  r.diagnostics = {{"main_effect", fit.beta[0]}, {"main_effect_se", fit.se(0)}};
  return r;
}

EstimateResult estimate_iv(const PanelDataset& panel, const Eigen::VectorXd& instrument) {
  panel.validate();
  if (instrument.size() != static_cast<Eigen::Index>(panel.rows.size()))
    throw StructuralError("instrument length differs from panel rows");
  const Twfe tw(panel);
  const Eigen::VectorXd d = treatment_indicator(panel);
  require_controls(d);
  Eigen::MatrixXd M(d.size(), 3);
  M << tw.y, d, instrument;
  absorb_fixed_effects(M, {tw.ix.unit_of_row, tw.ix.year_of_row});
  if (M.col(2).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, instrument.cwiseAbs().maxCoeff()))
    throw IdentificationError("instrument has no variation after fixed effects (rank error)");

  const auto first = ols_cluster(M.col(2), M.col(1), tw.ix.ward_of_row, tw.absorbed);
  const double first_f = first.beta[0] * first.beta[0] / first.vcov(0, 0);
  const auto ols = ols_cluster(M.col(1), M.col(0), tw.ix.ward_of_row, tw.absorbed);
  const auto iv = iv_cluster(M.col(1), M.col(2), M.col(0), tw.ix.ward_of_row, tw.absorbed);

  auto r = make_estimate(to_string(Method::IV), iv.beta[0], iv.se(0), iv.n);
  r.diagnostics = {{"first_stage_f", first_f},
                   {"weak_instrument", first_f < 10.0},
                   {"first_stage_coefficient", first.beta[0]},
                   {"ols_effect", ols.beta[0]},
                   {"ols_se", ols.se(0)},
                   {"clusters", iv.clusters}};
  return r;
}

EstimateResult estimate_iv(const PanelDataset& panel, const EstimatorSpec& spec) {
  Eigen::VectorXd z(static_cast<Eigen::Index>(panel.rows.size()));
  for (std::size_t i = 0; i < panel.rows.size(); ++i) {
    const auto& r = panel.rows[i];
    z[i] = r.year >= spec.instrument_year ? r.infrastructure : 0.0;
  }
  auto res = estimate_iv(panel, z);
  res.diagnostics["instrument"] = "infrastructure x 1[year >= " + std::to_string(spec.instrument_year) + "]";
  return res;
}

namespace {

struct PsmUnit {
  int ward = 0;
  std::string industry;
  int treat_year = kNeverTreated;
  Eigen::VectorXd x;  // covariate row incl. intercept
  std::map<int, double> y;  // by year
  int cluster_copy = 0;  // bootstrap copy id
};

std::vector<PsmUnit> psm_units(const PanelDataset& panel, const PanelIndex& ix,
                               const std::vector<std::string>& covariates) {
  for (const auto& c : covariates)
    if (c != "infra_quartile" && c != "hc_tertile" && c != "readiness")
      throw ConfigError("unknown PSM covariate '" + c + "'");
  auto has = [&](const char* c) { return std::find(covariates.begin(), covariates.end(), c) != covariates.end(); };
  std::vector<PsmUnit> units(ix.unit_count);
  std::vector<bool> seen(ix.unit_count, false);
  for (std::size_t i = 0; i < panel.rows.size(); ++i) {
    const auto& r = panel.rows[i];
    auto& u = units[ix.unit_of_row[i]];
    if (!seen[ix.unit_of_row[i]]) {
      seen[ix.unit_of_row[i]] = true;
      u.ward = ix.ward_of_row[i];
      u.industry = r.industry;
      u.treat_year = r.treat_year;
      std::vector<double> x{1.0};
      if (has("infra_quartile"))
        for (int q = 2; q <= 4; ++q) x.push_back(r.infra_quartile == q);
      if (has("hc_tertile"))
        for (int t = 2; t <= 3; ++t) x.push_back(r.hc_tertile == t);
      if (has("readiness")) {
        x.push_back(r.readiness == Readiness::Medium);
        x.push_back(r.readiness == Readiness::Low);
      }
      u.x = Eigen::Map<Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    }
    u.y[r.year] = r.y;
  }
  return units;
}

// Post-minus-pre mean outcome around year T; nullopt if either side is empty.
std::optional<double> long_difference(const PsmUnit& u, int T) {
  double pre = 0, post = 0;
  int npre = 0, npost = 0;
  for (const auto& [year, v] : u.y) {
    if (year < T) {
      pre += v;
      ++npre;
    } else {
      post += v;
      ++npost;
    }
  }
  if (npre == 0 || npost == 0) return std::nullopt;
  return post / npost - pre / npre;
}

struct PsmFit {
  double att = 0;
  std::size_t matched = 0;
  std::size_t dropped = 0;
  std::size_t rows = 0;
};

PsmFit psm_att(const std::vector<PsmUnit>& units, double caliper) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(units.size()), units.front().x.size());
  Eigen::VectorXd d(static_cast<Eigen::Index>(units.size()));
  for (std::size_t i = 0; i < units.size(); ++i) {
    X.row(i) = units[i].x.transpose();
    d[i] = units[i].treat_year != kNeverTreated;
  }
  if (d.sum() == 0 || d.sum() == d.size()) throw IdentificationError("PSM needs treated and control units");
  // Drop covariate columns with no variation so the logit stays identified.
  std::vector<int> keep{0};
  for (int c = 1; c < X.cols(); ++c)
    if (X.col(c).maxCoeff() != X.col(c).minCoeff()) keep.push_back(c);
  Eigen::MatrixXd Xk(X.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) Xk.col(c) = X.col(keep[c]);
  const auto lf = logit(Xk, d);
  const Eigen::ArrayXd p = 1.0 / (1.0 + (-(Xk * lf.beta)).array().exp());

  PsmFit f;
  double sum = 0;
  std::set<std::size_t> used;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (d[i] == 0) continue;
    const auto dt = long_difference(units[i], units[i].treat_year);
    // Nearest propensity within the caliper; exact ties all count, averaged.
    double best_gap = caliper;
    for (std::size_t c = 0; c < units.size(); ++c) {
      if (d[c] != 0 || units[c].industry != units[i].industry) continue;
      const double gap = std::abs(p[i] - p[c]);
      if (gap < best_gap && long_difference(units[c], units[i].treat_year)) best_gap = gap;
    }
    double dc = 0;
    std::vector<std::size_t> ties;
    if (best_gap < caliper) {
      for (std::size_t c = 0; c < units.size(); ++c) {
        if (d[c] != 0 || units[c].industry != units[i].industry) continue;
        if (std::abs(p[i] - p[c]) > best_gap + 1e-12) continue;
        const auto ld = long_difference(units[c], units[i].treat_year);
        if (!ld) continue;
        dc += *ld;
        ties.push_back(c);
      }
    }
    if (ties.empty() || !dt) {
      ++f.dropped;
      continue;
    }
    sum += *dt - dc / static_cast<double>(ties.size());
    ++f.matched;
    f.rows += units[i].y.size();
    for (auto c : ties)
      if (used.insert(c).second) f.rows += units[c].y.size();
  }
  if (f.matched == 0) throw IdentificationError("no treated unit has a control within the caliper");
  f.att = sum / static_cast<double>(f.matched);
  return f;
}

}  // namespace

EstimateResult estimate_psm(const PanelDataset& panel, const EstimatorSpec& spec) {
  panel.validate();
  if (!(spec.caliper >= 0)) throw ConfigError("caliper must be >= 0");
  const auto ix = panel.index();
  const auto units = psm_units(panel, ix, spec.psm_covariates);
  const auto fit = psm_att(units, spec.caliper);

  // Ward-cluster bootstrap: resample wards, refit propensity, re-match.
  std::vector<std::vector<std::size_t>> by_ward(ix.wards.size());
  for (std::size_t u = 0; u < units.size(); ++u) by_ward[units[u].ward].push_back(u);
  std::vector<double> draws;
  for (int b = 0; b < spec.bootstrap_draws; ++b) {
    std::mt19937_64 rng(derive_seed(spec.seed, static_cast<std::uint64_t>(b)));
    std::uniform_int_distribution<std::size_t> pick(0, by_ward.size() - 1);
    std::vector<PsmUnit> sample;
    for (std::size_t w = 0; w < by_ward.size(); ++w)
      for (auto u : by_ward[pick(rng)]) sample.push_back(units[u]);
    try {
      draws.push_back(psm_att(sample, spec.caliper).att);
    } catch (const IdentificationError&) {
    }
  }
  if (draws.size() < 2) throw IdentificationError("PSM bootstrap produced fewer than two usable draws");
  const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / draws.size();
  double ss = 0;
  for (double x : draws) ss += (x - mean) * (x - mean);
  const double se = std::sqrt(ss / (draws.size() - 1));

  auto r = make_estimate(to_string(Method::PSM), fit.att, se, fit.rows);
  r.diagnostics = {{"matched_pairs", fit.matched},
                   {"ties", "nearest-propensity ties averaged"},
                   {"dropped_treated", fit.dropped},
                   {"caliper", spec.caliper},
                   {"covariates", spec.psm_covariates},
                   {"bootstrap_draws", draws.size()},
                   {"bootstrap", "ward cluster"}};
  return r;
}

namespace {

// Euclidean projection onto the probability simplex.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0, theta = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cum += u[i];
    const double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

}  // namespace

SyntheticWeights fit_synthetic_weights(const Eigen::MatrixXd& D, const Eigen::VectorXd& t, double tolerance) {
  if (D.cols() < 2) throw IdentificationError("synthetic control needs at least two donors");
  if (D.rows() != t.size()) throw StructuralError("donor and treated pre-periods differ in length");
  const auto J = D.cols();
  const Eigen::MatrixXd G = D.transpose() * D;
  const Eigen::VectorXd c = D.transpose() * t;
  const double L = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G).eigenvalues().maxCoeff();
  SyntheticWeights out;
  Eigen::VectorXd w = Eigen::VectorXd::Constant(J, 1.0 / static_cast<double>(J));
  if (!(L > 0)) {
    out.weights = w;
    out.converged = true;
  } else {
    Eigen::VectorXd z = w;
    double theta = 1.0;
    for (out.iterations = 1; out.iterations <= 200000; ++out.iterations) {
      const Eigen::VectorXd w_next = project_simplex(z - (G * z - c) / L);
      // Gradient-mapping norm at the new iterate.
      const Eigen::VectorXd g = G * w_next - c;
      const double gm = L * (w_next - project_simplex(w_next - g / L)).norm();
      const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
      Eigen::VectorXd z_next = w_next + ((theta - 1.0) / theta_next) * (w_next - w);
      // Adaptive restart when momentum points uphill.
      if ((z - w_next).dot(w_next - w) > 0) {
        z_next = w_next;
        theta = 1.0;
      } else {
        theta = theta_next;
      }
      w = w_next;
      z = z_next;
      if (gm < tolerance) {
        out.converged = true;
        break;
      }
    }
    out.weights = w;
  }
  out.pre_rmse = std::sqrt((D * out.weights - t).squaredNorm() / static_cast<double>(std::max<Eigen::Index>(1, D.rows())));
  return out;
}

namespace {

// Ward x year mean outcome over industries; NaN where a cell is empty.
struct WardSeries {
  std::vector<std::string> wards;
  std::vector<int> years;
  std::vector<int> treat_year;
  Eigen::MatrixXd y;  // wards x years
};

WardSeries ward_series(const PanelDataset& panel) {
  const auto ix = panel.index();
  WardSeries s;
  s.wards = ix.wards;
  s.years = ix.years;
  s.treat_year.assign(ix.wards.size(), kNeverTreated);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(ix.wards.size(), ix.years.size());
  Eigen::MatrixXd cnt = sum;
  for (std::size_t i = 0; i < panel.rows.size(); ++i) {
    sum(ix.ward_of_row[i], ix.year_of_row[i]) += panel.rows[i].y;
    cnt(ix.ward_of_row[i], ix.year_of_row[i]) += 1;
    s.treat_year[ix.ward_of_row[i]] = panel.rows[i].treat_year;
  }
  s.y = sum.cwiseQuotient(cnt);
  for (Eigen::Index i = 0; i < cnt.rows(); ++i)
    for (Eigen::Index j = 0; j < cnt.cols(); ++j)
      if (cnt(i, j) == 0) s.y(i, j) = kNaN;
  return s;
}

struct ScFit {
  double effect = 0;
  SyntheticWeights weights;
  std::size_t pre = 0, post = 0;
};

// Treated row against donor rows with treatment at year T; series are
// centered on their own pre-period means.
ScFit sc_fit(const WardSeries& s, std::size_t treated, const std::vector<std::size_t>& donors, int T, double tol) {
  std::vector<std::size_t> pre, post;
  for (std::size_t t = 0; t < s.years.size(); ++t) (s.years[t] < T ? pre : post).push_back(t);
  if (pre.size() < 3) throw IdentificationError("synthetic control needs at least three pre-treatment periods");
  if (post.empty()) throw IdentificationError("synthetic control needs a post-treatment period");
  auto centered = [&](std::size_t w) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(s.years.size()));
    double m = 0;
    for (auto t : pre) m += s.y(w, t);
    m /= static_cast<double>(pre.size());
    for (std::size_t t = 0; t < s.years.size(); ++t) v[t] = s.y(w, t) - m;
    return v;
  };
  const Eigen::VectorXd yt = centered(treated);
  Eigen::MatrixXd Yd(static_cast<Eigen::Index>(s.years.size()), static_cast<Eigen::Index>(donors.size()));
  for (std::size_t j = 0; j < donors.size(); ++j) Yd.col(j) = centered(donors[j]);
  Eigen::MatrixXd Dpre(static_cast<Eigen::Index>(pre.size()), Yd.cols());
  Eigen::VectorXd tpre(static_cast<Eigen::Index>(pre.size()));
  for (std::size_t i = 0; i < pre.size(); ++i) {
    Dpre.row(i) = Yd.row(pre[i]);
    tpre[i] = yt[pre[i]];
  }
  ScFit f;
  f.weights = fit_synthetic_weights(Dpre, tpre, tol);
  double gap = 0;
  for (auto t : post) gap += yt[t] - Yd.row(t).dot(f.weights.weights);
  f.effect = gap / static_cast<double>(post.size());
  f.pre = pre.size();
  f.post = post.size();
  return f;
}

std::vector<std::size_t> usable_donors(const WardSeries& s) {
  std::vector<std::size_t> d;
  for (std::size_t w = 0; w < s.wards.size(); ++w)
    if (s.treat_year[w] == kNeverTreated && s.y.row(w).allFinite()) d.push_back(w);
  if (d.size() < 2) throw IdentificationError("synthetic control needs at least two never-treated donors");
  return d;
}

// Placebo effects: each donor against the remaining donors.
std::vector<double> placebo_effects(const WardSeries& s, const std::vector<std::size_t>& donors, int T, double tol) {
  std::vector<double> out;
  if (donors.size() < 3) return out;
  for (std::size_t j = 0; j < donors.size(); ++j) {
    std::vector<std::size_t> rest;
    for (std::size_t k = 0; k < donors.size(); ++k)
      if (k != j) rest.push_back(donors[k]);
    out.push_back(sc_fit(s, donors[j], rest, T, tol).effect);
  }
  return out;
}

double permutation_p(double effect, const std::vector<double>& placebo) {
  std::size_t extreme = 0;
  for (double e : placebo)
    if (std::abs(e) >= std::abs(effect)) ++extreme;
  return static_cast<double>(1 + extreme) / static_cast<double>(1 + placebo.size());
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return kNaN;
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (v.size() - 1));
}

}  // namespace

EstimateResult estimate_synthetic_control(const PanelDataset& panel, const std::string& treated_ward,
                                          const EstimatorSpec& spec) {
  panel.validate();
  const auto s = ward_series(panel);
  const auto it = std::find(s.wards.begin(), s.wards.end(), treated_ward);
  if (it == s.wards.end()) throw ConfigError("unknown treated ward '" + treated_ward + "'");
  const auto w = static_cast<std::size_t>(it - s.wards.begin());
  if (s.treat_year[w] == kNeverTreated) throw IdentificationError("ward '" + treated_ward + "' is never treated");
  if (!s.y.row(w).allFinite()) throw IdentificationError("treated ward has empty years");
  const auto donors = usable_donors(s);
  const int T = s.treat_year[w];
  const auto f = sc_fit(s, w, donors, T, spec.sc_tolerance);
  const auto placebo = placebo_effects(s, donors, T, spec.sc_tolerance);
  const double se = sample_sd(placebo);
  auto r = make_estimate(to_string(Method::SyntheticControl), f.effect, std::isfinite(se) ? se : 0.0,
                         (f.pre + f.post) * (1 + donors.size()));
  std::vector<double> weights(f.weights.weights.data(), f.weights.weights.data() + f.weights.weights.size());
  nlohmann::json wj = nlohmann::json::object();
  for (std::size_t j = 0; j < donors.size(); ++j) wj[s.wards[donors[j]]] = weights[j];
  r.diagnostics = {{"treated_ward", treated_ward},
                   {"weights", wj},
                   {"pre_rmse", f.weights.pre_rmse},
                   {"placebo_p", placebo.empty() ? 1.0 : permutation_p(f.effect, placebo)},
                   {"placebo_count", placebo.size()},
                   {"converged", f.weights.converged}};
  if (f.weights.pre_rmse > spec.sc_rmse_cap) r.diagnostics["warning"] = "poor pre-period fit";
  return r;
}

EstimateResult estimate_synthetic_control(const PanelDataset& panel, const EstimatorSpec& spec) {
  panel.validate();
  const auto s = ward_series(panel);
  const auto donors = usable_donors(s);
  std::vector<double> effects, rmse;
  Eigen::VectorXd mean_weights = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(donors.size()));
  std::map<int, std::vector<double>> placebo_by_cohort;
  std::size_t n_obs = 0;
  for (std::size_t w = 0; w < s.wards.size(); ++w) {
    if (s.treat_year[w] == kNeverTreated || !s.y.row(w).allFinite()) continue;
    const int T = s.treat_year[w];
    const auto f = sc_fit(s, w, donors, T, spec.sc_tolerance);
    effects.push_back(f.effect);
    rmse.push_back(f.weights.pre_rmse);
    mean_weights += f.weights.weights;
    n_obs += f.pre + f.post;
    if (!placebo_by_cohort.count(T)) placebo_by_cohort[T] = placebo_effects(s, donors, T, spec.sc_tolerance);
  }
  if (effects.empty()) throw IdentificationError("no treated ward with a complete series");
  const double n = static_cast<double>(effects.size());
  const double effect = std::accumulate(effects.begin(), effects.end(), 0.0) / n;
  mean_weights /= n;
  // Jackknife over treated wards (sd / sqrt(n) for a mean) misses donor noise
  // common to every synthetic; add it as |mean weights|^2 times the placebo
  // variance, which bounds a single donor's post-period noise from above.
  const double jack = effects.size() > 1 ? sample_sd(effects) / std::sqrt(n) : 0.0;
  double placebo_var = 0;
  std::size_t cohorts = 0;
  for (const auto& [T, v] : placebo_by_cohort) {
    const double sd = sample_sd(v);
    if (std::isfinite(sd)) {
      placebo_var += sd * sd;
      ++cohorts;
    }
  }
  if (cohorts) placebo_var /= static_cast<double>(cohorts);
  const double se = std::sqrt(jack * jack + mean_weights.squaredNorm() * placebo_var);
  // Placebo distribution of the pooled mean: each cohort's placebo effects
  // weighted like the treated wards of that cohort.
  std::vector<double> pooled_placebo;
  std::size_t draws = 0;
  for (const auto& [T, v] : placebo_by_cohort) draws = std::max(draws, v.size());
  for (std::size_t j = 0; j < draws; ++j) {
    double acc = 0;
    std::size_t cnt = 0;
    for (std::size_t w = 0; w < s.wards.size(); ++w) {
      if (s.treat_year[w] == kNeverTreated || !s.y.row(w).allFinite()) continue;
      const auto& v = placebo_by_cohort[s.treat_year[w]];
      if (j < v.size()) {
        acc += v[j];
        ++cnt;
      }
    }
    if (cnt) pooled_placebo.push_back(acc / cnt);
  }
  auto r = make_estimate(to_string(Method::SyntheticControl), effect, se, n_obs * (1 + donors.size()));
  r.diagnostics = {{"treated_wards", effects.size()},
                   {"donors", donors.size()},
                   {"pre_rmse", std::accumulate(rmse.begin(), rmse.end(), 0.0) / n},
                   {"placebo_p", pooled_placebo.empty() ? 1.0 : permutation_p(effect, pooled_placebo)},
                   {"se_method", "jackknife over treated wards plus shared donor noise"},
                   {"se_jackknife", jack}};
  if (*std::max_element(rmse.begin(), rmse.end()) > spec.sc_rmse_cap) r.diagnostics["warning"] = "poor pre-period fit";
  return r;
}

EstimateResult estimate(Method m, const PanelDataset& panel, const EstimatorSpec& spec) {
  switch (m) {
    case Method::DiD: return estimate_did(panel, spec);
    case Method::EventStudy: return estimate_event_study(panel, spec).aggregate;
    case Method::SyntheticControl: return estimate_synthetic_control(panel, spec);
    case Method::IV: return estimate_iv(panel, spec);
    case Method::PSM: return estimate_psm(panel, spec);
  }
  throw ConfigError("unknown method");
}

EffectsTable estimate_table(const PanelDataset& panel, const std::vector<Method>& methods,
                            const EstimatorSpec& spec) {
  EffectsTable t;
  t.rows.resize(methods.size());
  parallel_for(methods.size(), [&](std::size_t i) {
    try {
      t.rows[i] = estimate(methods[i], panel, spec);
    } catch (const std::exception& e) {
      t.rows[i] = failed(to_string(methods[i]), e);
    }
  });
  // Column means; the mean of the row intervals equals mean effect +- 1.96 mean se.
  double eff = 0, se = 0, n = 0;
  std::size_t obs = 0;
  for (const auto& r : t.rows) {
    if (!r.ok()) continue;
    eff += r.effect;
    se += r.se;
    obs += r.n_obs;
    n += 1;
  }
  if (n == 0) {
    t.average = failed("Average Effect", IdentificationError("no estimator succeeded"));
    return t;
  }
  t.average = make_estimate("Average Effect", eff / n, se / n, static_cast<std::size_t>(obs / n));
  t.average.diagnostics = {{"methods_averaged", static_cast<int>(n)}};
  return t;
}

nlohmann::json EffectsTable::to_json() const {
  auto j = nlohmann::json::array();
  for (const auto& r : rows) j.push_back(r.to_json());
  j.push_back(average.to_json());
  return j;
}

std::string EffectsTable::to_csv() const {
  std::ostringstream out;
  out << "method,effect,se,p_value,ci_lower,ci_upper,n_obs,error\n";
  auto row = [&](const EstimateResult& r) {
    out << r.method << ',';
    if (r.ok())
      out << fmt_double(r.effect) << ',' << fmt_double(r.se) << ',' << fmt_double(r.p_value) << ','
          << fmt_double(r.ci_lower) << ',' << fmt_double(r.ci_upper);
    else
      out << ",,,,";
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    out << ',' << r.n_obs << ',' << err << '\n';
  };
  for (const auto& r : rows) row(r);
  row(average);
  return out.str();
}

}  // namespace negai
