#include "negai/types.hpp"

#include <cmath>

#include "negai/errors.hpp"

namespace negai {

std::string to_string(Readiness r) {
  switch (r) {
    case Readiness::High: return "High";
    case Readiness::Medium: return "Medium";
    case Readiness::Low: return "Low";
  }
  return "Medium";
}

Readiness readiness_from_string(const std::string& s) {
  if (s == "High") return Readiness::High;
  if (s == "Medium") return Readiness::Medium;
  if (s == "Low") return Readiness::Low;
  throw ConfigError("unknown readiness class '" + s + "'");
}

double WardState::employment_total() const {
  double s = other_employment;
  for (double e : employment_by_industry) s += e;
  return s;
}

Eigen::VectorXd EconomyState::adoption() const {
  Eigen::VectorXd a(wards.size());
  for (std::size_t i = 0; i < wards.size(); ++i) a[i] = wards[i].ai_adoption;
  return a;
}

Eigen::MatrixXd EconomyState::employment_matrix() const {
  Eigen::MatrixXd e(wards.size(), industries.size());
  for (std::size_t i = 0; i < wards.size(); ++i)
    for (std::size_t k = 0; k < industries.size(); ++k)
      e(i, k) = wards[i].employment_by_industry[k];
  return e;
}

void refresh_ward_adoption(EconomyState& state) {
  for (auto& w : state.wards) {
    double num = 0, den = 0;
    for (std::size_t k = 0; k < w.employment_by_industry.size(); ++k) {
      num += w.employment_by_industry[k] * w.adoption_by_industry[k];
      den += w.employment_by_industry[k];
    }
    w.ai_adoption = den > 0 ? num / den : 0.0;
  }
}

void EconomyState::validate() const {
  const auto n = static_cast<Eigen::Index>(wards.size());
  auto square = [n](const Eigen::MatrixXd& m, const char* name) {
    if (m.rows() != n || m.cols() != n)
      throw StructuralError(std::string(name) + " is " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + ", expected " + std::to_string(n) +
                            " square");
  };
  square(connectivity, "connectivity");
  square(complementarity, "complementarity");
  square(network_weights, "network_weights");
  square(distances, "distances");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (distances(i, i) != 0) throw DomainError("distances must have zero diagonal");
    if (network_weights(i, i) != 0) throw DomainError("network_weights must have zero diagonal");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (distances(i, j) != distances(j, i)) throw DomainError("distances must be symmetric");
      if (i != j && !(distances(i, j) > 0)) throw DomainError("off-diagonal distances must be > 0");
      const double q = connectivity(i, j);
      if (!(q >= 0 && q <= 1)) throw DomainError("connectivity entries must lie in [0,1]");
      if (complementarity(i, j) < 0) throw DomainError("complementarity must be nonnegative");
      if (network_weights(i, j) < 0) throw DomainError("network_weights must be nonnegative");
    }
  }
  const std::size_t k = industries.size();
  for (const auto& w : wards) {
    if (w.employment_by_industry.size() != k || w.adoption_by_industry.size() != k)
      throw StructuralError("ward '" + w.ward_id + "' has per-industry vectors of wrong length");
    if (!(w.ai_adoption >= 0 && w.ai_adoption <= 1))
      throw DomainError("ward '" + w.ward_id + "' adoption outside [0,1]");
    if (!(w.digital_infrastructure > 0) || !(w.human_capital > 0))
      throw DomainError("ward '" + w.ward_id + "' needs D, H > 0");
    if (w.network_field < 0) throw DomainError("ward '" + w.ward_id + "' network field < 0");
    for (double e : w.employment_by_industry)
      if (!(e >= 0)) throw DomainError("ward '" + w.ward_id + "' has negative employment");
    for (double a : w.adoption_by_industry)
      if (!(a >= 0 && a <= 1)) throw DomainError("ward '" + w.ward_id + "' adoption outside [0,1]");
    if (w.population.young < 0 || w.population.prime < 0 || w.population.elderly < 0 ||
        w.other_employment < 0)
      throw DomainError("ward '" + w.ward_id + "' has negative counts");
  }
}

}  // namespace negai
