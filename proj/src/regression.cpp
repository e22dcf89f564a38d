#include "negai/regression.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>

#include "negai/errors.hpp"

namespace negai {

int absorb_fixed_effects(Eigen::MatrixXd& M, const std::vector<std::vector<int>>& groups, double tol,
                         int max_sweeps) {
  if (groups.empty() || M.size() == 0) return 0;
  for (const auto& g : groups)
    if (g.size() != static_cast<std::size_t>(M.rows())) throw StructuralError("group vector length mismatch");
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  std::vector<int> levels;
  for (const auto& g : groups) levels.push_back(*std::max_element(g.begin(), g.end()) + 1);

  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double change = 0;
    for (std::size_t h = 0; h < groups.size(); ++h) {
      const auto& g = groups[h];
      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(levels[h], M.cols());
      Eigen::VectorXd counts = Eigen::VectorXd::Zero(levels[h]);
      for (Eigen::Index i = 0; i < M.rows(); ++i) {
        sums.row(g[i]) += M.row(i);
        counts[g[i]] += 1;
      }
      for (Eigen::Index l = 0; l < sums.rows(); ++l)
        if (counts[l] > 0) sums.row(l) /= counts[l];
      change = std::max(change, sums.cwiseAbs().maxCoeff());
      for (Eigen::Index i = 0; i < M.rows(); ++i) M.row(i) -= sums.row(g[i]);
    }
    if (groups.size() == 1 || change <= tol * scale) return sweep;
  }
  return max_sweeps;
}

double LinearFit::se(std::size_t i) const { return std::sqrt(vcov(i, i)); }

namespace {

std::map<int, std::vector<Eigen::Index>> cluster_rows(const std::vector<int>& cluster) {
  std::map<int, std::vector<Eigen::Index>> out;
  for (std::size_t i = 0; i < cluster.size(); ++i) out[cluster[i]].push_back(static_cast<Eigen::Index>(i));
  return out;
}

// Sum over clusters of (S_g' u_g)(S_g' u_g)'.
Eigen::MatrixXd cluster_meat(const Eigen::MatrixXd& S, const Eigen::VectorXd& u,
                             const std::map<int, std::vector<Eigen::Index>>& groups) {
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(S.cols(), S.cols());
  for (const auto& [g, rows] : groups) {
    Eigen::VectorXd sg = Eigen::VectorXd::Zero(S.cols());
    for (auto i : rows) sg += S.row(i).transpose() * u[i];
    meat += sg * sg.transpose();
  }
  return meat;
}

double cr1_factor(std::size_t n, std::size_t k, std::size_t G) {
  if (n <= k) throw IdentificationError("no residual degrees of freedom");
  return (static_cast<double>(G) / (G - 1)) * (static_cast<double>(n - 1) / (n - k));
}

}  // namespace

LinearFit ols_cluster(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<int>& cluster,
                      std::size_t absorbed) {
  if (X.rows() != y.size() || cluster.size() != static_cast<std::size_t>(y.size()))
    throw StructuralError("regression inputs disagree in length");
  const auto groups = cluster_rows(cluster);
  if (groups.size() < 2) throw StructuralError("cluster-robust variance needs at least two clusters");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < X.cols()) throw IdentificationError("regressors are collinear after absorbing fixed effects");
  LinearFit f;
  f.beta = qr.solve(y);
  f.residuals = y - X * f.beta;
  f.n = static_cast<std::size_t>(X.rows());
  f.k = static_cast<std::size_t>(X.cols()) + absorbed;
  f.clusters = groups.size();
  const Eigen::MatrixXd bread = (X.transpose() * X).inverse();
  f.vcov = cr1_factor(f.n, f.k, f.clusters) * bread * cluster_meat(X, f.residuals, groups) * bread;
  return f;
}

Eigen::MatrixXd hc1_vcov(const Eigen::MatrixXd& X, const Eigen::VectorXd& u, std::size_t absorbed) {
  const auto n = static_cast<std::size_t>(X.rows());
  const std::size_t k = static_cast<std::size_t>(X.cols()) + absorbed;
  if (n <= k) throw IdentificationError("no residual degrees of freedom");
  const Eigen::MatrixXd bread = (X.transpose() * X).inverse();
  const Eigen::MatrixXd meat = X.transpose() * u.array().square().matrix().asDiagonal() * X;
  return (static_cast<double>(n) / (n - k)) * bread * meat * bread;
}

LinearFit iv_cluster(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                     const std::vector<int>& cluster, std::size_t absorbed) {
  if (Z.cols() < X.cols()) throw IdentificationError("fewer instruments than endogenous regressors");
  const auto groups = cluster_rows(cluster);
  if (groups.size() < 2) throw StructuralError("cluster-robust variance needs at least two clusters");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> zqr(Z);
  if (zqr.rank() < Z.cols()) throw IdentificationError("instruments have no variation after absorbing fixed effects");
  // Projection of X on the instruments.
  const Eigen::MatrixXd Xhat = Z * zqr.solve(X);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> hqr(Xhat);
  if (hqr.rank() < X.cols() || Xhat.norm() <= 1e-12 * std::max(1.0, X.norm()))
    throw IdentificationError("first stage has no explanatory power");
  LinearFit f;
  f.beta = (Xhat.transpose() * X).inverse() * (Xhat.transpose() * y);
  f.residuals = y - X * f.beta;
  f.n = static_cast<std::size_t>(X.rows());
  f.k = static_cast<std::size_t>(X.cols()) + absorbed;
  f.clusters = groups.size();
  const Eigen::MatrixXd bread = (Xhat.transpose() * X).inverse();
  f.vcov = cr1_factor(f.n, f.k, f.clusters) * bread * cluster_meat(Xhat, f.residuals, groups) * bread.transpose();
  return f;
}

WaldTest wald_test(const Eigen::VectorXd& beta, const Eigen::MatrixXd& vcov, const Eigen::MatrixXd& R,
                   const Eigen::VectorXd& r, std::size_t clusters) {
  if (R.cols() != beta.size() || R.rows() != r.size()) throw StructuralError("restriction shapes disagree");
  const auto q = static_cast<std::size_t>(R.rows());
  if (clusters <= q) throw IdentificationError("Wald test needs more clusters than restrictions");
  WaldTest w;
  w.df1 = static_cast<int>(q);
  w.df2 = static_cast<int>(clusters - q);
  const Eigen::VectorXd d = R * beta - r;
  const Eigen::MatrixXd V = R * vcov * R.transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(V);
  if (!lu.isInvertible()) throw IdentificationError("restriction covariance is singular");
  // Hotelling scaling: with G clusters, W (G - q) / (q (G - 1)) ~ F(q, G - q).
  const double G = static_cast<double>(clusters);
  w.statistic = d.dot(lu.solve(d)) / w.df1 * (G - w.df1) / (G - 1);
  boost::math::fisher_f dist(w.df1, w.df2);
  w.p_value = w.statistic > 0 ? boost::math::cdf(boost::math::complement(dist, w.statistic)) : 1.0;
  return w;
}

double normal_cdf(double z) { return boost::math::cdf(boost::math::normal(), z); }

double normal_two_sided_p(double z) {
  return std::clamp(2.0 * boost::math::cdf(boost::math::complement(boost::math::normal(), std::abs(z))), 0.0, 1.0);
}

LogitFit logit(const Eigen::MatrixXd& X, const Eigen::VectorXd& d, double ridge) {
  LogitFit f;
  f.beta = Eigen::VectorXd::Zero(X.cols());
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(X.cols(), X.cols());
  for (f.iterations = 1; f.iterations <= 100; ++f.iterations) {
    const Eigen::VectorXd eta = X * f.beta;
    const Eigen::ArrayXd p = 1.0 / (1.0 + (-eta.array()).exp());
    const Eigen::VectorXd grad = X.transpose() * (d.array() - p).matrix() - ridge * f.beta;
    const Eigen::ArrayXd w = (p * (1.0 - p)).max(1e-12);
    const Eigen::MatrixXd H = X.transpose() * w.matrix().asDiagonal() * X + ridge * I;
    const Eigen::VectorXd step = H.ldlt().solve(grad);
    f.beta += step;
    if (step.cwiseAbs().maxCoeff() < 1e-10) {
      f.converged = true;
      break;
    }
  }
  return f;
}

}  // namespace negai
