#pragma once

#include <vector>

#include <Eigen/Dense>

#include "arblab/gauge.hpp"
#include "arblab/portfolio.hpp"

namespace arblab {

// Gauge coefficients of the relative wealth Z_pi/Z_rho (level) and its log.
// Passing to a relative wealth zeroes the mean drift and mean vol and shifts
// only the excess-vol sensitivities; alpha_A and J are untouched.
struct RelativeCoefficients {
    Eigen::VectorXd beta_hat;    // beta - rho' sigma
    Eigen::VectorXd beta_tilde;  // beta - ((pi + rho)/2)' sigma
};

// beta_hat^a = beta^a - sum_j rho_j sigma_{ja};
// beta_tilde is derived from beta_hat by subtracting ((pi - rho)/2)' sigma,
// so the relation beta_tilde = beta_hat - ((pi - rho)/2)' sigma holds
// bit-exactly by construction.
RelativeCoefficients predicted_relative_coeffs(const GaugeDecomposition& decomp,
                                               const DriftVolSnapshot& snapshot,
                                               const Eigen::VectorXd& pi,
                                               const Eigen::VectorXd& rho);

// Ito coefficients of d(Z_pi/Z_rho) / (Z_pi/Z_rho):
//   drift = sum_i (pi - rho)_i (alpha_i - (ss' rho)_i)
//   vol_a = sum_i (pi - rho)_i sigma_{ia}
//   log_drift = drift - |vol|^2 / 2
// The same drift must be reproduced by the gauge route
// sum_i (pi - rho)_i (beta_hat . sigma_hat_i + (J alpha_A)_i); the two are
// checked against each other in the test suites.
struct RelativeSdeCoefficients {
    double drift = 0.0;
    Eigen::VectorXd vol;
    double log_drift = 0.0;
};

RelativeSdeCoefficients relative_sde_coeffs(const DriftVolSnapshot& snapshot,
                                            const GaugeDecomposition& decomp,
                                            const Eigen::VectorXd& pi,
                                            const Eigen::VectorXd& rho);

// Drift of the relative wealth via the decomposition:
// sum_i (pi - rho)_i (beta_hat . sigma_hat_i + (J alpha_A)_i).
double relative_drift_from_gauge(const GaugeDecomposition& decomp,
                                 const RelativeCoefficients& coeffs,
                                 const Eigen::VectorXd& pi, const Eigen::VectorXd& rho);

// Pointwise ratio and log-ratio of two wealth paths on the same grid. Aborts
// if the benchmark dips below 1e-12 of its initial value (the relative
// construction assumes inf_t Z_rho > 0).
struct RelativeWealth {
    Eigen::VectorXd ratio;
    Eigen::VectorXd log_ratio;
};

RelativeWealth relative_wealth_paths(const WealthPath& z_pi, const WealthPath& z_rho);

// residual(T) = (1/T) (log Zhat_T - sum_{slices < T} log_drift dt) for each
// horizon. For one path; ensembles aggregate with aggregate_residuals.
Eigen::VectorXd longterm_residual(const Eigen::VectorXd& log_zhat,
                                  const Eigen::VectorXd& per_slice_log_drift,
                                  const TimeGrid& grid, const std::vector<double>& horizons);

struct ResidualTable {
    std::vector<double> horizons;
    std::vector<double> rms;
    std::vector<double> mean;
    int n_paths = 0;
};

// Deterministic (path-order) reduction of per-path residual rows.
ResidualTable aggregate_residuals(const std::vector<Eigen::VectorXd>& per_path_residuals,
                                  const std::vector<double>& horizons);

}  // namespace arblab
