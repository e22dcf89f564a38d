// The five AI mechanisms as pure functions.
#pragma once

#include <Eigen/Dense>

#include "negai/params.hpp"
#include "negai/types.hpp"

namespace negai {

// Omega(d, q) = alpha d^-phi + (1 - alpha) q^psi. Requires d > 0, q in [0,1].
double spatial_decay(double distance_km, double connectivity, const ModelParams& p);

// S_i = beta_learning * sum_{j != i} A_j K_ij Omega(d_ij, Q_ij).
Eigen::VectorXd ai_spillovers(const EconomyState& state, const ModelParams& p);

// R = alpha_ai D^delta A^gamma N^nu H^eta. A zero factor with a positive
// exponent yields 0 (continuous extension); 0^0 is taken as 1.
double ai_returns(const WardState& ward, const ModelParams& p);
double ai_returns(double infrastructure, double adoption, double network, double human_capital,
                  const ModelParams& p);

// V = c_max (1 - exp(-lambda a_i a_j q_ij)).
double virtual_agglomeration(double a_i, double a_j, double q_ij, const ModelParams& p);

// (theta h^rho + (1-theta) a^rho)^(1/rho); Cobb-Douglas branch for |rho| < 1e-6,
// exact linear mix at rho = 1.
double ces_labor(double h, double a, const ModelParams& p);

// tfp * k^e_K * l^e_L * m^e_M.
double production(double k, double l_ces, double m, const ModelParams& p);

// Aggregate network size sum_ij w_ij A_i A_j and the saturating gain G.
double network_size(const EconomyState& state);
double network_gain(double size, const ModelParams& p);

// N_i = gamma_network sum_{j != i} w_ij A_j G(network size).
Eigen::VectorXd network_externality(const EconomyState& state, const ModelParams& p);

}  // namespace negai
