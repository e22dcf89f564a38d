// Least-squares machinery shared by the estimators: fixed-effect absorption,
// cluster-robust (CR1) and heteroskedasticity-robust (HC1) covariance, 2SLS,
// Wald F tests, and a ridge-stabilized logit.
#pragma once

#include <vector>

#include <Eigen/Dense>

namespace negai {

// Sweeps group means out of every column of M, cycling over the grouping
// vectors until the largest adjustment falls below tol (alternating
// projections). One pass is exact for a single grouping or a balanced
// two-way panel. Returns the number of sweeps.
int absorb_fixed_effects(Eigen::MatrixXd& M, const std::vector<std::vector<int>>& groups, double tol = 1e-13,
                         int max_sweeps = 10000);

struct LinearFit {
  Eigen::VectorXd beta;
  Eigen::MatrixXd vcov;  // CR1 by cluster
  Eigen::VectorXd residuals;
  std::size_t n = 0;
  std::size_t k = 0;         // regressors + absorbed parameters
  std::size_t clusters = 0;

  double se(std::size_t i) const;
};

// OLS on already-demeaned data. `absorbed` counts parameters swept out
// beforehand; it enters the (N-1)/(N-K) small-sample factor. Throws
// IdentificationError on a rank-deficient design and StructuralError when
// fewer than two clusters are present.
LinearFit ols_cluster(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<int>& cluster,
                      std::size_t absorbed);

// HC1 covariance for the same design.
Eigen::MatrixXd hc1_vcov(const Eigen::MatrixXd& X, const Eigen::VectorXd& residuals, std::size_t absorbed);

// 2SLS with CR1 covariance; X endogenous regressors, Z instruments
// (columns(Z) >= columns(X)). Rank errors throw IdentificationError.
LinearFit iv_cluster(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                     const std::vector<int>& cluster, std::size_t absorbed);

struct WaldTest {
  double statistic = 0;  // F = W / q
  int df1 = 0;
  int df2 = 0;
  double p_value = 1;
};

// H0: R beta = r for a cluster-robust vcov with `clusters` groups. The Wald
// statistic is scaled to F(q, G - q), which holds its size with few clusters.
WaldTest wald_test(const Eigen::VectorXd& beta, const Eigen::MatrixXd& vcov, const Eigen::MatrixXd& R,
                   const Eigen::VectorXd& r, std::size_t clusters);

double normal_cdf(double z);
double normal_two_sided_p(double z);

struct LogitFit {
  Eigen::VectorXd beta;
  int iterations = 0;
  bool converged = false;
};

// Newton-Raphson maximizing the log-likelihood minus ridge/2 |beta|^2 (the
// intercept column, if any, is penalized too; the penalty only matters under
// separation).
LogitFit logit(const Eigen::MatrixXd& X, const Eigen::VectorXd& d, double ridge = 1e-4);

}  // namespace negai
