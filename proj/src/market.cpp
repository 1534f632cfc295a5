#include "arblab/market.hpp"

#include <cmath>

#include "arblab/errors.hpp"
#include "arblab/rng.hpp"

namespace arblab {

Scheme scheme_from_string(const std::string& tag) {
    if (tag == "log-exact") return Scheme::LogExact;
    if (tag == "euler") return Scheme::Euler;
    throw ValidationError("unknown scheme tag '" + tag + "' (expected log-exact or euler)");
}

std::string to_string(Scheme scheme) {
    return scheme == Scheme::LogExact ? "log-exact" : "euler";
}

void TimeGrid::validate() const {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw ValidationError("grid: horizon must be positive and finite");
    if (steps < 1) throw ValidationError("grid: steps must be >= 1");
}

int TimeGrid::index_of(double t, double rel_tol) const {
    const double k = t / dt();
    const auto rounded = static_cast<int>(std::llround(k));
    if (rounded < 0 || rounded > steps || std::abs(k - rounded) > rel_tol * std::max(1.0, std::abs(k)))
        throw ValidationError("horizon " + std::to_string(t) + " does not lie on the grid");
    return rounded;
}

void MarketSpec::validate() const {
    if (n_securities < 1) throw ValidationError("market: n_securities must be >= 1");
    if (n_drivers < 1) throw ValidationError("market: n_drivers must be >= 1");
    if (n_drivers > n_securities)
        throw ValidationError("market: n_drivers must be <= n_securities");
    if (initial_prices.size() != n_securities)
        throw ValidationError("market: initial_prices must have length n_securities");
    if (!(initial_prices.array() > 0.0).all())
        throw ValidationError("market: initial prices must be strictly positive");
    if (drift.segments() == 0 || vol.segments() == 0)
        throw ValidationError("market: drift and vol schedules must be set");
    for (const auto& a : drift.values()) {
        if (a.size() != n_securities)
            throw ValidationError("market: each drift segment must have length n_securities");
        if (!a.allFinite()) throw ValidationError("market: drift must be finite");
    }
    for (const auto& s : vol.values()) {
        if (s.rows() != n_securities || s.cols() != n_drivers)
            throw ValidationError("market: each vol segment must be n_securities x n_drivers");
        if (!s.allFinite()) throw ValidationError("market: vol must be finite");
    }
}

namespace {

Eigen::VectorXd grid_times(const TimeGrid& grid) {
    Eigen::VectorXd t(grid.steps + 1);
    for (int k = 0; k <= grid.steps; ++k) t[k] = grid.time_at(k);
    return t;
}

}  // namespace

MarketPath simulate_market(const MarketSpec& spec, const TimeGrid& grid, std::uint64_t seed,
                           Scheme scheme, std::uint64_t path_index) {
    spec.validate();
    grid.validate();

    const int n = spec.n_securities;
    const int m = spec.n_drivers;
    const double dt = grid.dt();
    const double sqrt_dt = std::sqrt(dt);

    MarketPath path;
    path.times = grid_times(grid);
    path.prices.resize(n, grid.steps + 1);
    path.driver_increments.resize(m, grid.steps);
    path.seed = seed;
    path.scheme = scheme;
    path.prices.col(0) = spec.initial_prices;

    NormalStream normals(seed, path_index);
    for (int k = 0; k < grid.steps; ++k) {
        for (int a = 0; a < m; ++a) path.driver_increments(a, k) = sqrt_dt * normals.next();

        const double t = grid.slice_time(k);
        const Eigen::VectorXd& alpha = spec.drift_at(t);
        const Eigen::MatrixXd& sigma = spec.vol_at(t);
        const Eigen::VectorXd shock = sigma * path.driver_increments.col(k);

        if (scheme == Scheme::LogExact) {
            for (int i = 0; i < n; ++i) {
                const double exponent = (alpha[i] - 0.5 * sigma.row(i).squaredNorm()) * dt + shock[i];
                path.prices(i, k + 1) = path.prices(i, k) * std::exp(exponent);
            }
        } else {
            for (int i = 0; i < n; ++i) {
                const double next = path.prices(i, k) * (1.0 + alpha[i] * dt + shock[i]);
                if (!(next > 0.0))
                    throw ContractError("euler scheme produced non-positive price for security " +
                                        std::to_string(i + 1) + " at step " + std::to_string(k + 1));
                path.prices(i, k + 1) = next;
            }
        }
    }
    return path;
}

MarketPath simulate_drift_only(const MarketSpec& spec, const TimeGrid& grid,
                               const PiecewiseConstant<Eigen::VectorXd>& drift_override) {
    spec.validate();
    grid.validate();
    for (const auto& g : drift_override.values())
        if (g.size() != spec.n_securities)
            throw ValidationError("drift_override: each segment must have length n_securities");

    const int n = spec.n_securities;
    const double dt = grid.dt();

    MarketPath path;
    path.times = grid_times(grid);
    path.prices.resize(n, grid.steps + 1);
    path.driver_increments = Eigen::MatrixXd::Zero(spec.n_drivers, grid.steps);
    path.seed = 0;
    path.scheme = Scheme::LogExact;
    path.prices.col(0) = spec.initial_prices;

    for (int k = 0; k < grid.steps; ++k) {
        const Eigen::VectorXd& g = drift_override.at(grid.slice_time(k));
        for (int i = 0; i < n; ++i)
            path.prices(i, k + 1) = path.prices(i, k) * std::exp(g[i] * dt);
    }
    return path;
}

}  // namespace arblab
