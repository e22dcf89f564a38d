#include "negai/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "negai/errors.hpp"
#include "negai/network.hpp"
#include "negai/regression.hpp"

namespace negai {

nlohmann::json HypothesisResult::to_json() const {
  return {{"id", id},
          {"name", name},
          {"statistic_label", statistic_label},
          {"statistic", statistic},
          {"threshold", threshold},
          {"supported", supported},
          {"p_value", p_value},
          {"testable", testable},
          {"note", note}};
}

HypothesisEvidence hypothesis_evidence(const PanelDataset& panel) {
  return {estimate_heterogeneity(panel, Grouping::Readiness), estimate_hc_interaction(panel)};
}

DgpConfig hypothesis_dgp(std::uint64_t seed) {
  DgpConfig d;
  d.heterogeneous = true;
  d.hc_interaction = 0.038;
  d.seed = seed;
  return d;
}

int HypothesisReport::supported() const {
  int n = 0;
  for (const auto& h : results) n += h.supported;
  return n;
}

bool HypothesisReport::all_testable() const {
  for (const auto& h : results)
    if (!h.testable) return false;
  return true;
}

nlohmann::json HypothesisReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& h : results) rows.push_back(h.to_json());
  return {{"span", {first_year, last_year}},
          {"supported", supported()},
          {"total", results.size()},
          {"hypotheses", rows}};
}

std::string HypothesisReport::table() const {
  std::ostringstream os;
  os << std::left << std::setw(4) << "id" << std::setw(24) << "hypothesis" << std::setw(34) << "statistic"
     << std::right << std::setw(10) << "value" << std::setw(11) << "threshold" << std::setw(10) << "p"
     << "  result\n";
  for (const auto& h : results) {
    os << std::left << std::setw(4) << ("H" + std::to_string(h.id)) << std::setw(24) << h.name << std::setw(34)
       << h.statistic_label << std::right << std::fixed << std::setprecision(4) << std::setw(10) << h.statistic
       << std::setw(11) << h.threshold << std::setw(10) << h.p_value << "  "
       << (!h.testable ? "untestable" : h.supported ? "supported" : "not supported");
    if (!h.note.empty()) os << " (" << h.note << ")";
    os << "\n";
  }
  os << supported() << "/" << results.size() << " supported\n";
  return os.str();
}

LogTrend log_trend(const std::vector<int>& years, const std::vector<double>& values) {
  if (years.size() != values.size()) throw StructuralError("log_trend: length mismatch");
  if (years.size() < 3) throw UndefinedError("log_trend: fewer than three points");
  const double m = static_cast<double>(years.size());
  double st = 0, sl = 0;
  std::vector<double> logs;
  for (std::size_t k = 0; k < years.size(); ++k) {
    if (!(values[k] > 0)) throw UndefinedError("log_trend: non-positive value in year " + std::to_string(years[k]));
    logs.push_back(std::log(values[k]));
    st += years[k];
    sl += logs.back();
  }
  const double tbar = st / m, lbar = sl / m;
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < years.size(); ++k) {
    sxx += (years[k] - tbar) * (years[k] - tbar);
    sxy += (years[k] - tbar) * (logs[k] - lbar);
  }
  if (!(sxx > 0)) throw UndefinedError("log_trend: all years equal");
  LogTrend out;
  out.slope = sxy / sxx;
  double ssr = 0;
  for (std::size_t k = 0; k < years.size(); ++k) {
    const double e = logs[k] - lbar - out.slope * (years[k] - tbar);
    ssr += e * e;
  }
  out.se = std::sqrt(ssr / (m - 2) / sxx);
  return out;
}

NetworkExposureFit network_exposure_fit(const Trajectory& t, const ModelParams& params) {
  const std::size_t years = t.states.size();
  if (years < 2) throw UndefinedError("network exposure regression needs two years");
  const std::size_t n = t.states.front().wards.size();
  const auto rows = static_cast<Eigen::Index>(n * years);
  Eigen::MatrixXd M(rows, 3);
  std::vector<int> ward(rows), year(rows);
  Eigen::Index r = 0;
  for (std::size_t k = 0; k < years; ++k) {
    const auto& s = t.states[k];
    const Eigen::MatrixXd yk = productivity_per_worker(s, params);
    const Eigen::MatrixXd E = s.employment_matrix();
    const Eigen::VectorXd A = s.adoption();
    const Eigen::VectorXd exposure = s.network_weights * A;
    for (std::size_t i = 0; i < n; ++i, ++r) {
      const double emp = E.row(i).sum();
      const double out = (yk.row(i).array() * E.row(i).array()).sum();
      if (!(emp > 0 && out > 0)) throw UndefinedError("ward without output in year " + std::to_string(s.year));
      M(r, 0) = std::log(out / emp);
      M(r, 1) = A[i];
      M(r, 2) = exposure[i];
      ward[r] = static_cast<int>(i);
      year[r] = static_cast<int>(k);
    }
  }
  absorb_fixed_effects(M, {ward, year});
  const auto fit = ols_cluster(M.rightCols(2), M.col(0), ward, n + years - 1);
  NetworkExposureFit f;
  f.own = fit.beta[0];
  f.network = fit.beta[1];
  f.own_se = fit.se(0);
  f.network_se = fit.se(1);
  f.difference_se = std::sqrt(std::max(0.0, fit.vcov(0, 0) + fit.vcov(1, 1) - 2 * fit.vcov(0, 1)));
  f.n_obs = fit.n;
  return f;
}

namespace {

// One-sided p of H0: estimate <= bound.
double upper_p(double estimate, double bound, double se) {
  if (!(se > 0)) return estimate > bound ? 0.0 : 1.0;
  return 1.0 - normal_cdf((estimate - bound) / se);
}

double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd x = a.array() - a.mean(), y = b.array() - b.mean();
  const double d = std::sqrt(x.squaredNorm() * y.squaredNorm());
  if (!(d > 0)) throw UndefinedError("correlation of a constant series");
  return x.dot(y) / d;
}

HypothesisResult make(int id, std::string name, std::string label, double threshold) {
  HypothesisResult h;
  h.id = id;
  h.name = std::move(name);
  h.statistic_label = std::move(label);
  h.threshold = threshold;
  return h;
}

void untestable(HypothesisResult& h, std::string why) {
  h.testable = false;
  h.supported = false;
  h.statistic = 0;
  h.p_value = 1;
  h.note = std::move(why);
}

void decide(HypothesisResult& h) { h.supported = h.testable && h.statistic > h.threshold; }

}  // namespace

HypothesisReport validate_hypotheses(const Trajectory& t, const ModelParams& params,
                                     const HypothesisEvidence& evidence) {
  if (t.states.empty() || t.states.size() != t.derived.size())
    throw StructuralError("trajectory states and metrics disagree");
  HypothesisReport rep;
  rep.first_year = t.front().year;
  rep.last_year = t.back().year;
  const bool long_enough = rep.last_year - rep.first_year >= kMinHypothesisSpan;
  const std::string too_short = "trajectory spans " + std::to_string(rep.last_year - rep.first_year) +
                                " years, needs " + std::to_string(kMinHypothesisSpan);

  auto h1 = make(1, "AI concentration", "corr(initial D*H, final A)", 0.6);
  if (!long_enough) {
    untestable(h1, too_short);
  } else {
    const auto& w0 = t.front().wards;
    Eigen::VectorXd dh(static_cast<Eigen::Index>(w0.size()));
    for (std::size_t i = 0; i < w0.size(); ++i) dh[i] = w0[i].digital_infrastructure * w0[i].human_capital;
    try {
      h1.statistic = correlation(dh, t.back().adoption());
      // Fisher z against the threshold.
      const double se = 1.0 / std::sqrt(static_cast<double>(w0.size()) - 3.0);
      h1.p_value = upper_p(std::atanh(std::clamp(h1.statistic, -1 + 1e-15, 1 - 1e-15)), std::atanh(h1.threshold), se);
    } catch (const UndefinedError& e) {
      untestable(h1, e.what());
    }
  }
  decide(h1);

  auto h2 = make(2, "Heterogeneous returns", "CV of readiness-group effects", 0.3);
  try {
    h2.statistic = evidence.heterogeneity.coefficient_of_variation();
    h2.p_value = evidence.heterogeneity.equality.p_value;
    h2.note = "p from the F test of equal group effects";
  } catch (const UndefinedError& e) {
    untestable(h2, e.what());
  }
  decide(h2);

  auto h3 = make(3, "Network amplification", "network / own adoption effect", 1.0);
  if (!long_enough) {
    untestable(h3, too_short);
  } else {
    const auto f = network_exposure_fit(t, params);
    if (!(f.own > 0)) {
      untestable(h3, "own adoption effect is not positive");
    } else {
      h3.statistic = f.network / f.own;
      h3.p_value = upper_p(f.network - f.own, 0.0, f.difference_se);
    }
  }
  decide(h3);

  std::vector<int> years;
  for (const auto& m : t.derived) years.push_back(m.year);

  auto h4 = make(4, "Dynamic divergence", "yearly growth of adoption variance", 0.05);
  if (!long_enough) {
    untestable(h4, too_short);
  } else {
    std::vector<double> v;
    for (const auto& m : t.derived) v.push_back(m.adoption_variance);
    try {
      const auto g = log_trend(years, v);
      h4.statistic = std::exp(g.slope) - 1.0;
      h4.p_value = upper_p(g.slope, std::log1p(h4.threshold), g.se);
      h4.note = "relative, log-linear trend";
    } catch (const UndefinedError& e) {
      untestable(h4, e.what());
    }
  }
  decide(h4);

  auto h5 = make(5, "Virtual agglomeration", "yearly decline of distance slope", 0.1);
  if (!long_enough) {
    untestable(h5, too_short);
  } else {
    try {
      const auto ds = distance_sensitivity(t, params);
      std::vector<double> mag;
      for (double b : ds.slopes) mag.push_back(std::abs(b));
      const auto g = log_trend(ds.years, mag);
      h5.statistic = ds.relative_decline;
      // decline > c  <=>  slope < log(1 - c)
      h5.p_value = upper_p(-g.slope, -std::log1p(-h5.threshold), g.se);
      h5.note = "relative, log-linear trend of |slope|";
    } catch (const UndefinedError& e) {
      untestable(h5, e.what());
    }
  }
  decide(h5);

  auto h6 = make(6, "Complementarity", "AI x human capital coefficient", 0.0);
  if (!evidence.hc_interaction.ok()) {
    untestable(h6, evidence.hc_interaction.error);
  } else {
    h6.statistic = evidence.hc_interaction.effect;
    h6.p_value = upper_p(h6.statistic, 0.0, evidence.hc_interaction.se);
  }
  decide(h6);

  rep.results = {h1, h2, h3, h4, h5, h6};
  return rep;
}

}  // namespace negai
