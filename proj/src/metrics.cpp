#include "negai/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "negai/errors.hpp"
#include "negai/io.hpp"

namespace negai {

double location_quotient(const Eigen::MatrixXd& e, std::size_t ward, std::size_t industry) {
  const auto i = static_cast<Eigen::Index>(ward), k = static_cast<Eigen::Index>(industry);
  if (i >= e.rows() || k >= e.cols()) throw StructuralError("location_quotient: index out of range");
  const double industry_total = e.col(k).sum();
  const double economy_total = e.sum();
  const double ward_total = e.row(i).sum();
  if (!(industry_total > 0)) throw UndefinedError("location_quotient: industry total is zero");
  if (!(economy_total > 0)) throw UndefinedError("location_quotient: economy total is zero");
  if (!(ward_total > 0)) throw UndefinedError("location_quotient: ward total is zero");
  return (e(i, k) / industry_total) / (ward_total / economy_total);
}

double gini(std::span<const double> values) {
  if (values.empty()) throw UndefinedError("gini: empty vector");
  std::vector<double> x(values.begin(), values.end());
  for (double v : x)
    if (!(v >= 0)) throw DomainError("gini: negative or non-finite entry");
  std::sort(x.begin(), x.end());
  const double sum = std::accumulate(x.begin(), x.end(), 0.0);
  if (!(sum > 0)) throw UndefinedError("gini: no positive entry");
  const double n = static_cast<double>(x.size());
  double acc = 0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += (2.0 * (i + 1) - n - 1.0) * x[i];
  return acc / (n * sum);
}

double hhi(std::span<const double> shares) {
  double sum = 0, sq = 0;
  for (double s : shares) {
    if (!(s >= 0)) throw DomainError("hhi: negative share");
    sum += s;
    sq += s * s;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DomainError("hhi: shares must sum to 1");
  return sq;
}

double concentration_index(const EconomyState& s) {
  const auto e = s.employment_matrix();
  const double total = e.sum();
  if (!(total > 0)) throw UndefinedError("concentration_index: no employment");
  double acc = 0;
  for (Eigen::Index k = 0; k < e.cols(); ++k) {
    const double ek = e.col(k).sum();
    if (ek == 0) continue;
    std::vector<double> col(e.col(k).data(), e.col(k).data() + e.rows());
    acc += ek / total * gini(col);
  }
  return acc;
}

double coefficient_of_variation(std::span<const double> v) {
  if (v.size() < 2) throw UndefinedError("coefficient_of_variation: need n >= 2");
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  if (mean == 0) throw UndefinedError("coefficient_of_variation: zero mean");
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (n - 1)) / std::abs(mean);
}

Eigen::MatrixXd employment_with_other(const EconomyState& s) {
  const auto e = s.employment_matrix();
  Eigen::MatrixXd out(e.rows(), e.cols() + 1);
  out.leftCols(e.cols()) = e;
  for (std::size_t i = 0; i < s.wards.size(); ++i) out(i, e.cols()) = s.wards[i].other_employment;
  return out;
}

std::vector<std::size_t> peripheral_wards(const EconomyState& s) {
  double cx = 0, cy = 0;
  int nc = 0;
  for (const auto& w : s.wards)
    if (w.is_central) {
      cx += w.position.x_km;
      cy += w.position.y_km;
      ++nc;
    }
  if (nc == 0) throw StructuralError("peripheral_wards: no central wards flagged");
  cx /= nc;
  cy /= nc;
  std::vector<std::size_t> idx(s.wards.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto dist = [&](std::size_t i) {
    return std::hypot(s.wards[i].position.x_km - cx, s.wards[i].position.y_km - cy);
  };
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return dist(a) > dist(b); });
  idx.resize(std::min<std::size_t>(5, idx.size()));
  std::sort(idx.begin(), idx.end());
  return idx;
}

ConcentrationReport concentration_report(const EconomyState& s) {
  ConcentrationReport r;
  r.year = s.year;
  const auto full = employment_with_other(s);
  const auto periph = peripheral_wards(s);
  const double economy = full.sum();
  double central_total = 0;
  for (std::size_t i = 0; i < s.wards.size(); ++i)
    if (s.wards[i].is_central) central_total += full.row(i).sum();
  const double central_economy_share = central_total / economy;

  for (std::size_t k = 0; k < s.industries.size(); ++k) {
    IndustryConcentration c;
    c.industry_id = s.industries[k].industry_id;
    const double ek = full.col(k).sum();
    std::vector<double> shares(s.wards.size());
    double central = 0, peripheral = 0, adopt = 0, best = -1;
    for (std::size_t i = 0; i < s.wards.size(); ++i) {
      const double lq = location_quotient(full, i, k);
      c.location_quotient.push_back(lq);
      if (lq > best) {
        best = lq;
        c.primary_ward = s.wards[i].ward_id;
      }
      shares[i] = full(i, k) / ek;
      if (s.wards[i].is_central) central += shares[i];
      adopt += shares[i] * s.wards[i].adoption_by_industry[k];
    }
    for (auto i : periph) peripheral += shares[i];
    c.central_share = central;
    c.peripheral_share = peripheral;
    c.central_lq = central / central_economy_share;
    c.gini = gini(shares);
    // Renormalize to absorb rounding before the strict sum check.
    const double ssum = std::accumulate(shares.begin(), shares.end(), 0.0);
    for (auto& x : shares) x /= ssum;
    c.hhi = hhi(shares);
    c.ai_adoption_rate = adopt;
    r.industries.push_back(std::move(c));
  }
  const double n = static_cast<double>(r.industries.size());
  for (const auto& c : r.industries) {
    r.mean_central_lq += c.central_lq / n;
    r.mean_gini += c.gini / n;
    r.mean_hhi += c.hhi / n;
    r.mean_central_share += c.central_share / n;
    r.mean_peripheral_share += c.peripheral_share / n;
    r.mean_ai_adoption_rate += c.ai_adoption_rate / n;
  }
  return r;
}

std::string to_csv(const ConcentrationReport& r) {
  std::ostringstream out;
  out << "industry,location_quotient,gini,hhi,primary_ward,central_share_pct,peripheral_share_pct,"
         "ai_adoption_rate_pct\n";
  for (const auto& c : r.industries)
    out << c.industry_id << ',' << fmt_double(c.central_lq) << ',' << fmt_double(c.gini) << ','
        << fmt_double(c.hhi) << ',' << c.primary_ward << ',' << fmt_double(100 * c.central_share)
        << ',' << fmt_double(100 * c.peripheral_share) << ','
        << fmt_double(100 * c.ai_adoption_rate) << '\n';
  out << "Average," << fmt_double(r.mean_central_lq) << ',' << fmt_double(r.mean_gini) << ','
      << fmt_double(r.mean_hhi) << ",," << fmt_double(100 * r.mean_central_share) << ','
      << fmt_double(100 * r.mean_peripheral_share) << ','
      << fmt_double(100 * r.mean_ai_adoption_rate) << '\n';
  return out.str();
}

}  // namespace negai
