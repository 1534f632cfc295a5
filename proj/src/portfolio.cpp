#include "arblab/portfolio.hpp"

#include <algorithm>
#include <cmath>

#include "arblab/errors.hpp"

namespace arblab {

WealthScheme wealth_scheme_from_string(const std::string& tag) {
    if (tag == "euler-returns") return WealthScheme::EulerReturns;
    if (tag == "log-ito") return WealthScheme::LogIto;
    throw ValidationError("unknown wealth scheme '" + tag + "' (expected euler-returns or log-ito)");
}

std::string to_string(WealthScheme scheme) {
    return scheme == WealthScheme::EulerReturns ? "euler-returns" : "log-ito";
}

void check_weights(const Eigen::VectorXd& weights, double bound) {
    if (!weights.allFinite()) throw ValidationError("weights: non-finite entry");
    const double sum = weights.sum();
    if (std::abs(sum - 1.0) > 1e-12)
        throw ValidationError("weights: sum is " + std::to_string(sum) +
                              ", must equal 1 within 1e-12 (not renormalized)");
    if ((weights.array().abs() > bound).any())
        throw ValidationError("weights: entry exceeds bound " + std::to_string(bound));
}

Portfolio Portfolio::constant(Eigen::VectorXd weights, double bound) {
    Portfolio p;
    p.kind_ = Kind::Constant;
    p.weights_ = std::move(weights);
    p.bound_ = bound;
    check_weights(p.weights_, bound);
    return p;
}

Portfolio Portfolio::market() {
    Portfolio p;
    p.kind_ = Kind::Market;
    return p;
}

Portfolio Portfolio::schedule(Eigen::MatrixXd weights, double bound) {
    Portfolio p;
    p.kind_ = Kind::Schedule;
    p.weight_schedule_ = std::move(weights);
    p.bound_ = bound;
    for (Eigen::Index k = 0; k < p.weight_schedule_.cols(); ++k)
        check_weights(p.weight_schedule_.col(k), bound);
    return p;
}

Eigen::VectorXd Portfolio::weights_at(int k, const MarketPath& path) const {
    switch (kind_) {
        case Kind::Constant:
            return weights_;
        case Kind::Market:
            return market_portfolio(path.prices.col(k));
        case Kind::Schedule:
            if (k < 0 || k >= weight_schedule_.cols())
                throw ValidationError("portfolio schedule: slice out of range");
            return weight_schedule_.col(k);
    }
    throw ValidationError("portfolio: bad kind");
}

void Portfolio::validate(int n_securities, int steps) const {
    switch (kind_) {
        case Kind::Constant:
            if (weights_.size() != n_securities)
                throw ValidationError("portfolio: weights length != n_securities");
            check_weights(weights_, bound_);
            return;
        case Kind::Market:
            return;
        case Kind::Schedule:
            if (weight_schedule_.rows() != n_securities)
                throw ValidationError("portfolio schedule: rows != n_securities");
            if (weight_schedule_.cols() != steps)
                throw ValidationError("portfolio schedule: need one column per grid slice");
            for (int k = 0; k < steps; ++k) check_weights(weight_schedule_.col(k), bound_);
            return;
    }
}

WealthPath portfolio_value(const MarketSpec& spec, const MarketPath& path, const Portfolio& pf,
                           double z0, WealthScheme scheme) {
    if (!(z0 > 0.0)) throw ValidationError("portfolio_value: Z0 must be positive");
    const int steps = path.steps();
    pf.validate(path.n_securities(), steps);

    WealthPath wealth;
    wealth.scheme = scheme;
    wealth.values.resize(steps + 1);
    wealth.values[0] = z0;

    if (scheme == WealthScheme::EulerReturns) {
        for (int k = 0; k < steps; ++k) {
            const Eigen::VectorXd w = pf.weights_at(k, path);
            check_weights(w, pf.bound());
            wealth.values[k + 1] =
                wealth.values[k] * (1.0 + weighted_sum(w, path.returns_at(k)));
        }
        return wealth;
    }

    const double dt = path.times[1] - path.times[0];
    double log_z = std::log(z0);
    for (int k = 0; k < steps; ++k) {
        const Eigen::VectorXd w = pf.weights_at(k, path);
        check_weights(w, pf.bound());
        const double t = (path.times[k] + path.times[k + 1]) / 2.0;
        const Eigen::VectorXd& alpha = spec.drift_at(t);
        const Eigen::MatrixXd& sigma = spec.vol_at(t);
        const Eigen::VectorXd b = sigma.transpose() * w;
        log_z += (weighted_sum(w, alpha) - 0.5 * b.squaredNorm()) * dt +
                 b.dot(path.driver_increments.col(k));
        wealth.values[k + 1] = std::exp(log_z);
    }
    return wealth;
}

Eigen::VectorXd market_portfolio(const Eigen::VectorXd& prices) {
    if (!(prices.array() > 0.0).all())
        throw ValidationError("market_portfolio: prices must be strictly positive");
    return prices / prices.sum();
}

Eigen::VectorXd growth_rate(const DriftVolSnapshot& snapshot) {
    snapshot.validate();
    return snapshot.alpha - 0.5 * snapshot.sigma.rowwise().squaredNorm();
}

RelativeArbitrageReport detect_relative_arbitrage(const std::vector<WealthPath>& z_pi,
                                                  const std::vector<WealthPath>& z_rho,
                                                  double q, const TimeGrid& grid, double horizon) {
    if (z_pi.empty() || z_pi.size() != z_rho.size())
        throw ValidationError("detect_relative_arbitrage: ensembles must be paired and non-empty");
    if (!(q > 0.0)) throw ValidationError("detect_relative_arbitrage: q must be positive");
    const int end = grid.index_of(horizon);

    RelativeArbitrageReport report;
    report.q = q;
    report.horizon = horizon;
    report.n_paths = static_cast<int>(z_pi.size());

    int n_geq = 0, n_gt = 0, n_floor = 0;
    for (std::size_t p = 0; p < z_pi.size(); ++p) {
        const auto& a = z_pi[p].values;
        const auto& b = z_rho[p].values;
        if (a.size() != b.size())
            throw ValidationError("detect_relative_arbitrage: paths of unequal length");
        if (std::abs(a[0] - b[0]) > 1e-12 * std::max(1.0, std::abs(b[0])))
            throw ValidationError("detect_relative_arbitrage: initial values differ");
        if (a[end] >= b[end]) ++n_geq;
        if (a[end] > b[end]) ++n_gt;
        bool floor_ok = true;
        for (int k = 0; k <= end; ++k)
            if (a[k] < q * b[k]) { floor_ok = false; break; }
        if (floor_ok) ++n_floor;
    }
    report.frac_geq = static_cast<double>(n_geq) / report.n_paths;
    report.frac_gt = static_cast<double>(n_gt) / report.n_paths;
    report.floor_ok = static_cast<double>(n_floor) / report.n_paths;
    report.verdict = report.frac_geq == 1.0 && report.frac_gt > 0.0 && report.floor_ok == 1.0;
    return report;
}

NondegeneracyReport check_nondegeneracy(const DriftVolSnapshot& snapshot, double eps) {
    snapshot.validate();
    if (!(eps > 0.0)) throw ValidationError("check_nondegeneracy: eps must be positive");
    const Eigen::MatrixXd cov = snapshot.sigma * snapshot.sigma.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    NondegeneracyReport report;
    report.min_eigenvalue = solver.eigenvalues().minCoeff();
    report.nondegenerate = report.min_eigenvalue >= eps;
    return report;
}

CoherenceTable check_coherence(const std::vector<MarketPath>& paths,
                               const std::vector<double>& horizons, const TimeGrid& grid) {
    if (paths.empty()) throw ValidationError("check_coherence: empty ensemble");
    const int n = paths.front().n_securities();
    const int n_h = static_cast<int>(horizons.size());
    const int n_paths = static_cast<int>(paths.size());

    CoherenceTable table;
    table.horizons = horizons;
    table.mean = Eigen::MatrixXd::Zero(n, n_h);
    table.mean_abs = Eigen::MatrixXd::Zero(n, n_h);
    table.q05 = Eigen::MatrixXd::Zero(n, n_h);
    table.q95 = Eigen::MatrixXd::Zero(n, n_h);

    std::vector<double> samples(n_paths);
    for (int h = 0; h < n_h; ++h) {
        const int idx = grid.index_of(horizons[h]);
        if (idx == 0) throw ValidationError("check_coherence: horizon must be positive");
        for (int i = 0; i < n; ++i) {
            for (int p = 0; p < n_paths; ++p) {
                const Eigen::VectorXd mu = market_portfolio(paths[p].prices.col(idx));
                const Eigen::VectorXd mu0 = market_portfolio(paths[p].prices.col(0));
                samples[p] = std::log(mu[i] / mu0[i]) / horizons[h];
            }
            double mean = 0.0, mean_abs = 0.0;
            for (double s : samples) { mean += s; mean_abs += std::abs(s); }
            table.mean(i, h) = mean / n_paths;
            table.mean_abs(i, h) = mean_abs / n_paths;
            std::vector<double> sorted = samples;
            std::sort(sorted.begin(), sorted.end());
            table.q05(i, h) = sorted[static_cast<std::size_t>(0.05 * (n_paths - 1))];
            table.q95(i, h) = sorted[static_cast<std::size_t>(0.95 * (n_paths - 1))];
        }
    }
    return table;
}

}  // namespace arblab
