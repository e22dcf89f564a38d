#include "negai/panel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "negai/errors.hpp"
#include "negai/geography.hpp"
#include "negai/io.hpp"

namespace negai {

void PanelDataset::validate() const {
  if (rows.empty()) throw InputError("panel has no rows");
  std::map<std::pair<std::string, std::string>, std::vector<const PanelRow*>> units;
  for (const auto& r : rows) units[{r.ward, r.industry}].push_back(&r);
  for (auto& [key, v] : units) {
    std::sort(v.begin(), v.end(), [](auto a, auto b) { return a->year < b->year; });
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i]->year == v[i - 1]->year)
        throw InputError("duplicate year " + std::to_string(v[i]->year) + " for " + key.first + "/" + key.second);
      if (v[i]->year != v[i - 1]->year + 1)
        throw InputError("years not contiguous for " + key.first + "/" + key.second);
      if (v[i]->treat_year != v[0]->treat_year)
        throw InputError("treatment year changes within " + key.first + "/" + key.second);
    }
  }
}

bool PanelDataset::balanced() const {
  const auto idx = index();
  return rows.size() == idx.unit_count * idx.years.size();
}

PanelIndex PanelDataset::index() const {
  PanelIndex ix;
  // Wards and industries keep first-appearance order so outputs follow input order.
  std::map<std::string, int> wmap, imap;
  std::set<int> yset;
  for (const auto& r : rows) {
    if (wmap.emplace(r.ward, static_cast<int>(wmap.size())).second) ix.wards.push_back(r.ward);
    if (imap.emplace(r.industry, static_cast<int>(imap.size())).second) ix.industries.push_back(r.industry);
    yset.insert(r.year);
  }
  ix.years.assign(yset.begin(), yset.end());
  std::map<int, int> ymap;
  for (std::size_t t = 0; t < ix.years.size(); ++t) ymap[ix.years[t]] = static_cast<int>(t);
  std::map<std::pair<int, int>, int> umap;
  for (const auto& r : rows) {
    const int w = wmap[r.ward], k = imap[r.industry];
    auto [it, fresh] = umap.emplace(std::make_pair(w, k), static_cast<int>(umap.size()));
    if (fresh) ix.ward_of_unit.push_back(w);
    ix.ward_of_row.push_back(w);
    ix.unit_of_row.push_back(it->second);
    ix.year_of_row.push_back(ymap[r.year]);
  }
  ix.unit_count = umap.size();
  return ix;
}

std::size_t PanelDataset::treated_units() const {
  std::set<std::pair<std::string, std::string>> s;
  for (const auto& r : rows)
    if (r.treat_year != kNeverTreated) s.insert({r.ward, r.industry});
  return s.size();
}

void DgpConfig::validate() const {
  if (wards < 2) throw ConfigError("dgp needs at least 2 wards");
  if (years < 2) throw ConfigError("dgp needs at least 2 years");
  if (treated_wards >= wards) throw ConfigError("dgp needs at least one never-treated ward");
  if (cohort_first > cohort_last) throw ConfigError("dgp cohort_first after cohort_last");
  if (cohort_first <= first_year)
    throw ConfigError("dgp treatment starts before or at the first panel year");
  if (cohort_last > first_year + years - 1) throw ConfigError("dgp treatment starts after the panel ends");
  const double sds[] = {ward_fe_sd, industry_fe_sd, unit_fe_sd, year_fe_sd, ward_year_sd, noise_sd, selection_noise};
  for (double s : sds)
    if (!(s >= 0) || !std::isfinite(s)) throw ConfigError("dgp standard deviations must be finite and >= 0");
  if (!(std::abs(ward_year_rho) < 1)) throw ConfigError("dgp ward_year_rho must be in (-1, 1)");
}

nlohmann::json DgpConfig::to_json() const {
  return {{"wards", wards},
          {"first_year", first_year},
          {"years", years},
          {"intercept", intercept},
          {"effect", effect},
          {"heterogeneous", heterogeneous},
          {"readiness_effect", readiness_effect},
          {"dynamic_profile", dynamic_profile},
          {"hc_interaction", hc_interaction},
          {"ward_fe_sd", ward_fe_sd},
          {"industry_fe_sd", industry_fe_sd},
          {"unit_fe_sd", unit_fe_sd},
          {"year_fe_sd", year_fe_sd},
          {"ward_year_sd", ward_year_sd},
          {"ward_year_rho", ward_year_rho},
          {"noise_sd", noise_sd},
          {"treated_wards", treated_wards},
          {"cohort_first", cohort_first},
          {"cohort_last", cohort_last},
          {"instrument_strength", instrument_strength},
          {"selection_confounder", selection_confounder},
          {"selection_noise", selection_noise},
          {"confounding", confounding},
          {"covariate_trend", covariate_trend},
          {"seed", seed}};
}

DgpConfig DgpConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("dgp config must be a JSON object");
  DgpConfig d;
  const auto known = d.to_json();
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.contains(it.key())) throw ConfigError("unknown key '" + it.key() + "' in dgp config");
  try {
    auto merged = known;
    merged.merge_patch(j);
    d.wards = merged["wards"].get<std::size_t>();
    d.first_year = merged["first_year"];
    d.years = merged["years"];
    d.intercept = merged["intercept"];
    d.effect = merged["effect"];
    d.heterogeneous = merged["heterogeneous"];
    d.readiness_effect = merged["readiness_effect"].get<std::array<double, 3>>();
    d.dynamic_profile = merged["dynamic_profile"].get<std::vector<double>>();
    d.hc_interaction = merged["hc_interaction"];
    d.ward_fe_sd = merged["ward_fe_sd"];
    d.industry_fe_sd = merged["industry_fe_sd"];
    d.unit_fe_sd = merged["unit_fe_sd"];
    d.year_fe_sd = merged["year_fe_sd"];
    d.ward_year_sd = merged["ward_year_sd"];
    d.ward_year_rho = merged["ward_year_rho"];
    d.noise_sd = merged["noise_sd"];
    d.treated_wards = merged["treated_wards"].get<std::size_t>();
    d.cohort_first = merged["cohort_first"];
    d.cohort_last = merged["cohort_last"];
    d.instrument_strength = merged["instrument_strength"];
    d.selection_confounder = merged["selection_confounder"];
    d.selection_noise = merged["selection_noise"];
    d.confounding = merged["confounding"];
    d.covariate_trend = merged["covariate_trend"];
    d.seed = merged["seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("dgp config: ") + e.what());
  }
  d.validate();
  return d;
}

double planted_effect(const DgpConfig& dgp, const PanelRow& row, int year) {
  if (!row.treated_at(year)) return 0.0;
  double b = dgp.effect;
  if (dgp.heterogeneous) {
    b = dgp.readiness_effect[static_cast<std::size_t>(row.readiness)];
  } else if (!dgp.dynamic_profile.empty()) {
    const auto k = static_cast<std::size_t>(year - row.treat_year);
    b = dgp.dynamic_profile[std::min(k, dgp.dynamic_profile.size() - 1)];
  }
  return b + dgp.hc_interaction * row.human_capital;
}

namespace {

// 1-based rank bucket of each value: bucket b of `groups` by ascending order.
std::vector<int> rank_buckets(const std::vector<double>& v, int groups) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<int> out(v.size());
  for (std::size_t r = 0; r < order.size(); ++r)
    out[order[r]] = 1 + static_cast<int>(r * groups / order.size());
  return out;
}

std::vector<double> standardized(std::vector<double> v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / n);
  for (double& x : v) x = sd > 0 ? (x - mean) / sd : 0.0;
  return v;
}

}  // namespace

PanelDataset generate_panel(const DgpConfig& dgp) {
  dgp.validate();
  std::mt19937_64 rng(dgp.seed);
  std::normal_distribution<double> z(0.0, 1.0);
  const auto industries = default_industries();
  const std::size_t W = dgp.wards, K = industries.size();
  const auto T = static_cast<std::size_t>(dgp.years);

  std::vector<std::string> names(W);
  const auto& sites = ward_sites();
  for (std::size_t j = 0; j < W; ++j)
    names[j] = W <= sites.size() ? sites[j].name : "ward" + std::to_string(j + 1);

  std::vector<double> infra(W), hc(W), u(W), e(W), ward_fe(W);
  for (std::size_t j = 0; j < W; ++j) {
    infra[j] = z(rng);
    hc[j] = 0.5 * infra[j] + std::sqrt(0.75) * z(rng);
    u[j] = z(rng);
    e[j] = z(rng);
    ward_fe[j] = dgp.ward_fe_sd * z(rng);
  }
  infra = standardized(infra);
  hc = standardized(hc);
  const auto iq = rank_buckets(infra, 4);
  const auto ht = rank_buckets(hc, 3);

  std::vector<double> ind_fe(K), year_fe(T);
  for (auto& v : ind_fe) v = dgp.industry_fe_sd * z(rng);
  for (auto& v : year_fe) v = dgp.year_fe_sd * z(rng);

  // Treatment schedule by score rank.
  std::vector<double> score(W);
  for (std::size_t j = 0; j < W; ++j)
    score[j] = dgp.instrument_strength * infra[j] + dgp.selection_confounder * u[j] + dgp.selection_noise * e[j];
  std::vector<std::size_t> order(W);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return score[a] > score[b]; });
  std::vector<int> treat(W, kNeverTreated);
  const int cohorts = dgp.cohort_last - dgp.cohort_first + 1;
  for (std::size_t r = 0; r < dgp.treated_wards; ++r)
    treat[order[r]] = dgp.cohort_first + static_cast<int>(r * cohorts / dgp.treated_wards);

  PanelDataset p;
  p.rows.reserve(W * K * T);
  for (std::size_t j = 0; j < W; ++j) {
    // Stationary AR(1) ward-year shock.
    std::vector<double> wy(T);
    const double innov = dgp.ward_year_sd * std::sqrt(1.0 - dgp.ward_year_rho * dgp.ward_year_rho);
    for (std::size_t t = 0; t < T; ++t)
      wy[t] = t == 0 ? dgp.ward_year_sd * z(rng) : dgp.ward_year_rho * wy[t - 1] + innov * z(rng);
    for (std::size_t k = 0; k < K; ++k) {
      const double unit_fe = dgp.unit_fe_sd * z(rng);
      for (std::size_t t = 0; t < T; ++t) {
        PanelRow r;
        r.ward = names[j];
        r.industry = industries[k].industry_id;
        r.year = dgp.first_year + static_cast<int>(t);
        r.treat_year = treat[j];
        r.infra_quartile = iq[j];
        r.hc_tertile = ht[j];
        r.readiness = industries[k].ai_readiness;
        r.infrastructure = infra[j];
        r.human_capital = hc[j];
        const double confound = r.year >= dgp.cohort_first ? dgp.confounding * u[j] : 0.0;
        r.y = dgp.intercept + ward_fe[j] + ind_fe[k] + unit_fe + year_fe[t] + wy[t] + dgp.noise_sd * z(rng) +
              confound + dgp.covariate_trend * (iq[j] - 2.5) * static_cast<double>(t) +
              planted_effect(dgp, r, r.year);
        p.rows.push_back(std::move(r));
      }
    }
  }
  return p;
}

std::string panel_csv(const PanelDataset& panel) {
  std::ostringstream out;
  out << "ward,industry,year,y,treat_year,infra_quartile,hc_tertile,readiness,infrastructure,human_capital\n";
  for (const auto& r : panel.rows) {
    out << r.ward << ',' << r.industry << ',' << r.year << ',' << fmt_double(r.y) << ','
        << (r.treat_year == kNeverTreated ? std::string("never") : std::to_string(r.treat_year)) << ','
        << r.infra_quartile << ',' << r.hc_tertile << ',' << to_string(r.readiness) << ','
        << fmt_double(r.infrastructure) << ',' << fmt_double(r.human_capital) << '\n';
  }
  return out.str();
}

namespace {

double parse_num(const std::string& s, const char* col, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError("line " + std::to_string(line) + ": column '" + col + "' is not a number: '" + s + "'", line);
  }
}

int parse_int(const std::string& s, const char* col, std::size_t line) {
  const double v = parse_num(s, col, line);
  if (v != std::floor(v))
    throw InputError("line " + std::to_string(line) + ": column '" + col + "' is not an integer", line);
  return static_cast<int>(v);
}

}  // namespace

PanelDataset parse_panel_csv(const std::string& text) {
  static const std::vector<std::string> header = {"ward", "industry", "year", "y", "treat_year",
                                                  "infra_quartile", "hc_tertile", "readiness",
                                                  "infrastructure", "human_capital"};
  std::istringstream in(text);
  std::string line;
  std::size_t no = 0;
  if (!std::getline(in, line)) throw InputError("panel CSV is empty", 1);
  ++no;
  if (split_csv_line(line) != header) throw InputError("line 1: unexpected panel CSV header", 1);
  PanelDataset p;
  while (std::getline(in, line)) {
    ++no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size())
      throw InputError("line " + std::to_string(no) + ": expected " + std::to_string(header.size()) +
                           " fields, got " + std::to_string(f.size()),
                       no);
    PanelRow r;
    r.ward = f[0];
    r.industry = f[1];
    if (r.ward.empty() || r.industry.empty())
      throw InputError("line " + std::to_string(no) + ": empty ward or industry", no);
    r.year = parse_int(f[2], "year", no);
    r.y = parse_num(f[3], "y", no);
    r.treat_year = (f[4] == "never" || f[4].empty()) ? kNeverTreated : parse_int(f[4], "treat_year", no);
    r.infra_quartile = parse_int(f[5], "infra_quartile", no);
    r.hc_tertile = parse_int(f[6], "hc_tertile", no);
    if (r.infra_quartile < 1 || r.infra_quartile > 4 || r.hc_tertile < 1 || r.hc_tertile > 3)
      throw InputError("line " + std::to_string(no) + ": quartile/tertile out of range", no);
    try {
      r.readiness = readiness_from_string(f[7]);
    } catch (const std::exception&) {
      throw InputError("line " + std::to_string(no) + ": unknown readiness '" + f[7] + "'", no);
    }
    r.infrastructure = parse_num(f[8], "infrastructure", no);
    r.human_capital = parse_num(f[9], "human_capital", no);
    p.rows.push_back(std::move(r));
  }
  p.validate();
  return p;
}

PanelDataset load_panel(const std::string& path) { return parse_panel_csv(read_text_file(path)); }

}  // namespace negai
