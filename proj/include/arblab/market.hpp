#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "arblab/schedule.hpp"

namespace arblab {

enum class Scheme { LogExact, Euler };

Scheme scheme_from_string(const std::string& tag);
std::string to_string(Scheme scheme);

// Uniform grid on [0, horizon] with `steps` slices of width dt = horizon/steps.
struct TimeGrid {
    double horizon = 1.0;
    int steps = 1;

    double dt() const { return horizon / steps; }
    double time_at(int k) const { return horizon * k / steps; }
    // Slice k covers [time_at(k), time_at(k+1)); schedules are sampled at the
    // midpoint so grid-aligned breakpoints bind exactly despite rounding.
    double slice_time(int k) const { return horizon * (k + 0.5) / steps; }
    void validate() const;
    // Grid index of a horizon value; the horizon must sit on the grid.
    int index_of(double t, double rel_tol = 1e-9) const;
};

// n securities driven by m <= n Brownian motions. Drift (1/time) and vol
// (1/sqrt(time)) are piecewise-constant in time; state dependence is out of
// scope.
struct MarketSpec {
    int n_securities = 0;
    int n_drivers = 0;
    PiecewiseConstant<Eigen::VectorXd> drift;  // length n per segment
    PiecewiseConstant<Eigen::MatrixXd> vol;    // n x m per segment
    Eigen::VectorXd initial_prices;

    void validate() const;
    const Eigen::VectorXd& drift_at(double t) const { return drift.at(t); }
    const Eigen::MatrixXd& vol_at(double t) const { return vol.at(t); }
};

// One realized trajectory: prices per grid point, driver increments per slice.
struct MarketPath {
    Eigen::VectorXd times;              // steps + 1
    Eigen::MatrixXd prices;             // n x (steps + 1)
    Eigen::MatrixXd driver_increments;  // m x steps
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::LogExact;

    int steps() const { return static_cast<int>(driver_increments.cols()); }
    int n_securities() const { return static_cast<int>(prices.rows()); }
    // Arithmetic returns dS/S over slice k.
    Eigen::VectorXd returns_at(int k) const {
        return (prices.col(k + 1).array() / prices.col(k).array() - 1.0).matrix();
    }
};

// Simulates one path. Driver increments are iid N(0, dt) drawn from the
// (seed, path_index) substream, so ensembles are reproducible and
// order-independent. LogExact steps S by exp((alpha - |sigma_row|^2/2) dt +
// sigma dW); Euler steps S by (1 + alpha dt + sigma dW) and fails loudly if a
// price becomes non-positive.
MarketPath simulate_market(const MarketSpec& spec, const TimeGrid& grid, std::uint64_t seed,
                           Scheme scheme, std::uint64_t path_index = 0);

// Propagates the drift-only flow dS/S = g(t) dt with all driver increments
// forced to zero. No Ito correction is applied: the conditioned differential
// has no quadratic variation. `drift_override` supplies g (length n per
// segment).
MarketPath simulate_drift_only(const MarketSpec& spec, const TimeGrid& grid,
                               const PiecewiseConstant<Eigen::VectorXd>& drift_override);

}  // namespace arblab
