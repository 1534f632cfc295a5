// Market simulation: closed-form cases, Monte Carlo moments against the
// lognormal law, scheme convergence, and the determinism contract.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "arblab/errors.hpp"
#include "arblab/market.hpp"
#include "oracles.hpp"

using namespace arblab;

namespace {

MarketSpec make_spec(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& sigma,
                     const Eigen::VectorXd& s0) {
    MarketSpec spec;
    spec.n_securities = static_cast<int>(alpha.size());
    spec.n_drivers = static_cast<int>(sigma.cols());
    spec.drift = PiecewiseConstant<Eigen::VectorXd>(alpha);
    spec.vol = PiecewiseConstant<Eigen::MatrixXd>(sigma);
    spec.initial_prices = s0;
    return spec;
}

}  // namespace

TEST_CASE("zero dynamics keeps prices constant") {
    const MarketSpec spec = make_spec(Eigen::Vector2d::Zero(), Eigen::MatrixXd::Zero(2, 1),
                                      Eigen::Vector2d::Ones());
    const TimeGrid grid{1.0, 16};
    for (Scheme scheme : {Scheme::LogExact, Scheme::Euler}) {
        const MarketPath path = simulate_market(spec, grid, 3, scheme);
        CHECK((path.prices.array() == 1.0).all());
    }
}

TEST_CASE("deterministic exponential growth without vol") {
    const MarketSpec spec = make_spec(Eigen::Vector2d::Constant(0.05),
                                      Eigen::MatrixXd::Zero(2, 1), Eigen::Vector2d::Ones());
    const TimeGrid grid{1.0, 10};
    const MarketPath path = simulate_market(spec, grid, 3, Scheme::LogExact);
    CHECK(path.prices(0, 10) == doctest::Approx(std::exp(0.05)).epsilon(1e-14));
    CHECK(path.prices(1, 10) == doctest::Approx(std::exp(0.05)).epsilon(1e-14));
}

TEST_CASE("monte carlo terminal mean matches the lognormal law") {
    // alpha = 0.1, |sigma row|^2 = 0.04: E S_T = S0 exp(alpha T).
    Eigen::MatrixXd sigma(1, 1);
    sigma << 0.2;
    const MarketSpec spec =
        make_spec(Eigen::VectorXd::Constant(1, 0.1), sigma, Eigen::VectorXd::Ones(1));
    const TimeGrid grid{1.0, 4};
    const int n_paths = 100000;
    std::vector<double> terminal(n_paths);
    for (int p = 0; p < n_paths; ++p)
        terminal[p] = simulate_market(spec, grid, 99, Scheme::LogExact, p).prices(0, 4);
    const double expected = std::exp(0.1);
    CHECK(std::abs(oracle::mean_of(terminal) - expected) < 3.0 * oracle::stderr_of(terminal));
}

TEST_CASE("log-price moments match the scheme's law") {
    Eigen::MatrixXd sigma(2, 2);
    sigma << 0.25, 0.05, -0.1, 0.2;
    Eigen::VectorXd alpha(2);
    alpha << 0.07, 0.02;
    const MarketSpec spec = make_spec(alpha, sigma, Eigen::Vector2d::Constant(2.0));
    const TimeGrid grid{2.0, 8};
    const int n_paths = 100000;
    std::vector<std::vector<double>> logs(2, std::vector<double>(n_paths));
    for (int p = 0; p < n_paths; ++p) {
        const MarketPath path = simulate_market(spec, grid, 5, Scheme::LogExact, p);
        for (int i = 0; i < 2; ++i) logs[i][p] = std::log(path.prices(i, 8) / 2.0);
    }
    for (int i = 0; i < 2; ++i) {
        const double row_sq = sigma.row(i).squaredNorm();
        const double want_mean = (alpha[i] - 0.5 * row_sq) * grid.horizon;
        const double want_var = row_sq * grid.horizon;
        const double mean = oracle::mean_of(logs[i]);
        double var = 0.0;
        for (double x : logs[i]) var += (x - mean) * (x - mean);
        var /= (n_paths - 1);
        CHECK(std::abs(mean - want_mean) < 4.0 * std::sqrt(want_var / n_paths));
        CHECK(std::abs(var - want_var) < 4.0 * want_var * std::sqrt(2.0 / (n_paths - 1)));
    }
}

TEST_CASE("identical inputs give bit-identical paths; substreams differ") {
    Eigen::MatrixXd sigma(3, 2);
    sigma << 0.2, 0.0, 0.1, 0.15, -0.05, 0.3;
    Eigen::VectorXd alpha(3);
    alpha << 0.03, 0.05, 0.01;
    const MarketSpec spec = make_spec(alpha, sigma, Eigen::Vector3d::Constant(1.5));
    const TimeGrid grid{1.0, 64};
    const MarketPath a = simulate_market(spec, grid, 11, Scheme::LogExact, 7);
    const MarketPath b = simulate_market(spec, grid, 11, Scheme::LogExact, 7);
    CHECK((a.prices.array() == b.prices.array()).all());
    CHECK((a.driver_increments.array() == b.driver_increments.array()).all());
    const MarketPath c = simulate_market(spec, grid, 11, Scheme::LogExact, 8);
    CHECK((a.driver_increments.array() != c.driver_increments.array()).any());
}

TEST_CASE("euler converges strongly to the exact scheme") {
    // Same Brownian path at each level: coarse increments are sums of fine
    // ones; the exact scheme is invariant under that coarsening, so it serves
    // as the reference at every level.
    Eigen::MatrixXd sigma(2, 1);
    sigma << 0.3, 0.2;
    Eigen::VectorXd alpha(2);
    alpha << 0.05, 0.08;
    const MarketSpec spec = make_spec(alpha, sigma, Eigen::Vector2d::Ones());
    const int fine_steps = 512;
    const TimeGrid fine{1.0, fine_steps};
    const int n_paths = 200;

    std::vector<int> levels{64, 128, 256, 512};
    std::vector<double> errs(levels.size(), 0.0);
    for (int p = 0; p < n_paths; ++p) {
        const MarketPath ref = simulate_market(spec, fine, 21, Scheme::LogExact, p);
        for (std::size_t lev = 0; lev < levels.size(); ++lev) {
            const int steps = levels[lev];
            const int group = fine_steps / steps;
            const double dt = 1.0 / steps;
            Eigen::Vector2d s = spec.initial_prices;
            for (int k = 0; k < steps; ++k) {
                double dw = 0.0;
                for (int j = 0; j < group; ++j) dw += ref.driver_increments(0, k * group + j);
                for (int i = 0; i < 2; ++i)
                    s[i] *= 1.0 + alpha[i] * dt + sigma(i, 0) * dw;
            }
            errs[lev] += (s - ref.prices.col(fine_steps)).cwiseAbs().maxCoeff() / n_paths;
        }
    }
    std::vector<double> log_dt, log_err;
    for (std::size_t lev = 0; lev < levels.size(); ++lev) {
        log_dt.push_back(std::log(1.0 / levels[lev]));
        log_err.push_back(std::log(errs[lev]));
    }
    const auto fit = oracle::fit_line(log_dt, log_err);
    CHECK(fit.slope >= 0.5);
    CHECK(fit.r2 >= 0.9);
}

TEST_CASE("drift-only propagation") {
    Eigen::MatrixXd sigma(2, 1);
    sigma << 0.4, 0.1;
    const MarketSpec spec = make_spec(Eigen::Vector2d::Constant(0.3), sigma,
                                      Eigen::Vector2d::Constant(2.0));
    const TimeGrid grid{1.0, 10};

    SUBCASE("zero override keeps prices constant") {
        const auto path = simulate_drift_only(
            spec, grid, PiecewiseConstant<Eigen::VectorXd>(Eigen::Vector2d::Zero()));
        CHECK((path.prices.array() == 2.0).all());
        CHECK((path.driver_increments.array() == 0.0).all());
    }
    SUBCASE("constant override compounds exponentially, no Ito correction") {
        const auto path = simulate_drift_only(
            spec, grid, PiecewiseConstant<Eigen::VectorXd>(Eigen::Vector2d::Constant(0.07)));
        CHECK(path.prices(0, 10) == doctest::Approx(2.0 * std::exp(0.07)).epsilon(1e-14));
    }
    SUBCASE("piecewise override integrates exactly") {
        // g1 on [0, 1/2), g2 on [1/2, 1): S_T = S0 exp((g1 + g2)/2).
        const double g1 = 0.12, g2 = -0.04;
        const PiecewiseConstant<Eigen::VectorXd> override_sched(
            {0.0, 0.5}, {Eigen::Vector2d::Constant(g1), Eigen::Vector2d::Constant(g2)});
        const auto path = simulate_drift_only(spec, grid, override_sched);
        CHECK(path.prices(1, 10) ==
              doctest::Approx(2.0 * std::exp((g1 + g2) / 2.0)).epsilon(1e-14));
    }
    SUBCASE("dimension mismatch is rejected") {
        CHECK_THROWS_AS(simulate_drift_only(
                            spec, grid, PiecewiseConstant<Eigen::VectorXd>(Eigen::Vector3d::Zero())),
                        ValidationError);
    }
}

TEST_CASE("euler failure names the step") {
    Eigen::MatrixXd sigma(1, 1);
    sigma << 0.0;
    const MarketSpec spec =
        make_spec(Eigen::VectorXd::Constant(1, -300.0), sigma, Eigen::VectorXd::Ones(1));
    const TimeGrid grid{1.0, 100};
    CHECK_THROWS_WITH_AS(simulate_market(spec, grid, 1, Scheme::Euler),
                         doctest::Contains("step 1"), ContractError);
}

TEST_CASE("spec validation") {
    Eigen::MatrixXd sigma(2, 3);
    sigma.setZero();
    MarketSpec spec = make_spec(Eigen::Vector2d::Zero(), sigma, Eigen::Vector2d::Ones());
    CHECK_THROWS_AS(spec.validate(), ValidationError);  // m > n

    spec = make_spec(Eigen::Vector2d::Zero(), Eigen::MatrixXd::Zero(2, 1),
                     Eigen::Vector2d::Zero());
    CHECK_THROWS_AS(spec.validate(), ValidationError);  // non-positive price

    CHECK_THROWS_AS(scheme_from_string("milstein"), ValidationError);
}

TEST_CASE("piecewise coefficient schedules bind on grid slices") {
    // Drift switches at t = 0.5; the log-exact terminal value integrates each
    // segment exactly.
    MarketSpec spec;
    spec.n_securities = 1;
    spec.n_drivers = 1;
    spec.initial_prices = Eigen::VectorXd::Ones(1);
    spec.drift = PiecewiseConstant<Eigen::VectorXd>(
        {0.0, 0.5}, {Eigen::VectorXd::Constant(1, 0.2), Eigen::VectorXd::Constant(1, -0.1)});
    spec.vol = PiecewiseConstant<Eigen::MatrixXd>(Eigen::MatrixXd::Zero(1, 1));
    const TimeGrid grid{1.0, 250};
    const MarketPath path = simulate_market(spec, grid, 1, Scheme::LogExact);
    CHECK(path.prices(0, 250) == doctest::Approx(std::exp(0.05)).epsilon(1e-13));
}
