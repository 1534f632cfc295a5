#include "arblab/relative.hpp"

#include <cmath>

#include "arblab/errors.hpp"

namespace arblab {

RelativeCoefficients predicted_relative_coeffs(const GaugeDecomposition& decomp,
                                               const DriftVolSnapshot& snapshot,
                                               const Eigen::VectorXd& pi,
                                               const Eigen::VectorXd& rho) {
    check_weights(pi);
    check_weights(rho);
    RelativeCoefficients out;
    out.beta_hat = decomp.beta - snapshot.sigma.transpose() * rho;
    out.beta_tilde = out.beta_hat - 0.5 * (snapshot.sigma.transpose() * (pi - rho));
    return out;
}

RelativeSdeCoefficients relative_sde_coeffs(const DriftVolSnapshot& snapshot,
                                            const GaugeDecomposition& decomp,
                                            const Eigen::VectorXd& pi,
                                            const Eigen::VectorXd& rho) {
    check_weights(pi);
    check_weights(rho);
    (void)decomp;
    const Eigen::VectorXd diff = pi - rho;
    RelativeSdeCoefficients out;
    const Eigen::MatrixXd& sigma = snapshot.sigma;
    out.drift = diff.dot(snapshot.alpha - sigma * (sigma.transpose() * rho));
    out.vol = sigma.transpose() * diff;
    out.log_drift = out.drift - 0.5 * out.vol.squaredNorm();
    return out;
}

double relative_drift_from_gauge(const GaugeDecomposition& decomp,
                                 const RelativeCoefficients& coeffs,
                                 const Eigen::VectorXd& pi, const Eigen::VectorXd& rho) {
    Eigen::VectorXd per_security = decomp.excess_vol * coeffs.beta_hat;
    if (decomp.k > 0) per_security += decomp.J * decomp.alpha_A;
    return (pi - rho).dot(per_security);
}

RelativeWealth relative_wealth_paths(const WealthPath& z_pi, const WealthPath& z_rho) {
    if (z_pi.values.size() != z_rho.values.size())
        throw ValidationError("relative_wealth_paths: paths of unequal length");
    const double floor = 1e-12 * z_rho.values[0];
    RelativeWealth out;
    out.ratio.resize(z_pi.values.size());
    out.log_ratio.resize(z_pi.values.size());
    for (Eigen::Index k = 0; k < z_pi.values.size(); ++k) {
        if (z_rho.values[k] < floor)
            throw ContractError("relative wealth: benchmark value fell below 1e-12 of its "
                                "initial value at index " + std::to_string(k));
        out.ratio[k] = z_pi.values[k] / z_rho.values[k];
        out.log_ratio[k] = std::log(out.ratio[k]);
    }
    return out;
}

Eigen::VectorXd longterm_residual(const Eigen::VectorXd& log_zhat,
                                  const Eigen::VectorXd& per_slice_log_drift,
                                  const TimeGrid& grid, const std::vector<double>& horizons) {
    if (log_zhat.size() != grid.steps + 1)
        throw ValidationError("longterm_residual: log path must have steps+1 points");
    if (per_slice_log_drift.size() != grid.steps)
        throw ValidationError("longterm_residual: need one drift per grid slice");

    // Running exact integral of the predicted drift.
    Eigen::VectorXd drift_integral(grid.steps + 1);
    drift_integral[0] = 0.0;
    const double dt = grid.dt();
    for (int k = 0; k < grid.steps; ++k)
        drift_integral[k + 1] = drift_integral[k] + per_slice_log_drift[k] * dt;

    Eigen::VectorXd out(static_cast<Eigen::Index>(horizons.size()));
    for (std::size_t h = 0; h < horizons.size(); ++h) {
        const int idx = grid.index_of(horizons[h]);
        if (idx == 0) throw ValidationError("longterm_residual: horizon must be positive");
        out[static_cast<Eigen::Index>(h)] =
            (log_zhat[idx] - log_zhat[0] - drift_integral[idx]) / horizons[h];
    }
    return out;
}

ResidualTable aggregate_residuals(const std::vector<Eigen::VectorXd>& per_path_residuals,
                                  const std::vector<double>& horizons) {
    if (per_path_residuals.empty())
        throw ValidationError("aggregate_residuals: empty ensemble");
    ResidualTable table;
    table.horizons = horizons;
    table.n_paths = static_cast<int>(per_path_residuals.size());
    for (std::size_t h = 0; h < horizons.size(); ++h) {
        double sum = 0.0, sum_sq = 0.0;
        for (const auto& r : per_path_residuals) {
            sum += r[static_cast<Eigen::Index>(h)];
            sum_sq += r[static_cast<Eigen::Index>(h)] * r[static_cast<Eigen::Index>(h)];
        }
        table.mean.push_back(sum / table.n_paths);
        table.rms.push_back(std::sqrt(sum_sq / table.n_paths));
    }
    return table;
}

}  // namespace arblab
