#pragma once

#include <vector>

#include <Eigen/Dense>

#include "arblab/market.hpp"

namespace arblab {

// Drift vector and vol loading matrix at one instant.
struct DriftVolSnapshot {
    Eigen::VectorXd alpha;  // length n, 1/time
    Eigen::MatrixXd sigma;  // n x m, 1/sqrt(time)
    double t = 0.0;

    int n_securities() const { return static_cast<int>(alpha.size()); }
    int n_drivers() const { return static_cast<int>(sigma.cols()); }
    void validate() const;
};

// Orthogonal split of the drift for one time slice:
//
//   alpha = abar * 1 + sigma_hat * beta + J * alpha_A
//
// where sigma_hat is the cross-sectionally centered vol, beta the minimum-norm
// regression of the centered drift on sigma_hat, and J an orthonormal basis of
// {x : 1'x = 0, sigma_hat'x = 0}. alpha_A = J' alpha is the drift component
// reachable by no combination of market mean and excess-vol exposure; its
// squared norm is the arbitrage measure.
struct GaugeDecomposition {
    double market_drift = 0.0;       // abar
    Eigen::VectorXd market_vol;      // sbar, length m
    Eigen::MatrixXd excess_vol;      // sigma_hat, n x m
    Eigen::VectorXd beta;            // length m
    Eigen::MatrixXd J;               // n x k, orthonormal columns
    Eigen::VectorXd alpha_A;         // length k
    int k = 0;                       // n - 1 - rank(sigma_hat)
    double reconstruction_residual = 0.0;  // |alpha - reconstruction|_2

    int n_securities() const { return static_cast<int>(excess_vol.rows()); }
    // Shifted mean drift abar - beta . sbar used by the measure change.
    double alpha_star() const { return market_drift - beta.dot(market_vol); }
};

// Computes the decomposition. Singular values of sigma_hat below
// rank_tol * sigma_max are treated as zero, which fixes both the
// pseudoinverse behind beta and k = n - 1 - rank. J's orientation is made
// deterministic: each column's largest-magnitude entry (lowest index on
// ties) is positive, and columns are ordered by descending |alpha_A|.
GaugeDecomposition decompose(const DriftVolSnapshot& snapshot, double rank_tol = 1e-10);

// abar * 1 + sigma_hat * beta + J * alpha_A.
Eigen::VectorXd reconstruct_drift(const GaugeDecomposition& decomp);

// Sum of squared alpha_A entries; zero iff alpha lies in span{1, sigma_hat}.
double arbitrage_measure(const GaugeDecomposition& decomp);

// Integral of the arbitrage measure over the grid, one decomposition per
// slice. Exact for piecewise-constant coefficients.
double arbitrage_wealth(const std::vector<GaugeDecomposition>& decomps, const TimeGrid& grid);

// Coefficient snapshot for grid slice k (schedules sampled at the slice
// midpoint, timestamped at the slice start).
DriftVolSnapshot snapshot_at_slice(const MarketSpec& spec, const TimeGrid& grid, int k);

// Per-slice decompositions of a market's coefficient schedules, deduplicated
// by schedule segment.
struct DecompositionSchedule {
    std::vector<GaugeDecomposition> segments;
    std::vector<int> slice_segment;  // size steps

    const GaugeDecomposition& at_slice(int k) const { return segments[slice_segment[k]]; }
    int steps() const { return static_cast<int>(slice_segment.size()); }
    std::vector<GaugeDecomposition> per_slice() const;
};

DecompositionSchedule decompose_schedule(const MarketSpec& spec, const TimeGrid& grid,
                                         double rank_tol = 1e-10);

}  // namespace arblab
