#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "arblab/gauge.hpp"
#include "arblab/market.hpp"

namespace arblab {

enum class WealthScheme { EulerReturns, LogIto };

WealthScheme wealth_scheme_from_string(const std::string& tag);
std::string to_string(WealthScheme scheme);

// Shared weighted-sum kernel. portfolio_value's arithmetic step and the
// portfolio connection increment must agree bit-for-bit, so both go through
// this exact loop.
inline double weighted_sum(const Eigen::VectorXd& weights, const Eigen::VectorXd& values) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) acc += weights[i] * values[i];
    return acc;
}

// Weight process summing to one on every slice. Constant weights, weights
// proportional to prices (market), or an explicit per-slice schedule.
// Long/short allowed; |weight| must stay within `bound`.
class Portfolio {
public:
    enum class Kind { Constant, Market, Schedule };

    static Portfolio constant(Eigen::VectorXd weights, double bound = 10.0);
    static Portfolio market();
    static Portfolio schedule(Eigen::MatrixXd weights, double bound = 10.0);  // n x steps

    Kind kind() const { return kind_; }
    double bound() const { return bound_; }

    // Weights held over slice k. Market weights are formed from prices at the
    // slice start, so the process stays predictable.
    Eigen::VectorXd weights_at(int k, const MarketPath& path) const;

    // Checks shape, the sum-to-one invariant (tolerance 1e-12) and the bound
    // on every slice it can see without a path (Constant / Schedule kinds).
    void validate(int n_securities, int steps) const;

private:
    Kind kind_ = Kind::Market;
    Eigen::VectorXd weights_;
    Eigen::MatrixXd weight_schedule_;
    double bound_ = 10.0;
};

// Checks one weight vector: finite, sums to 1 within 1e-12, |w_i| <= bound.
// Violations are rejected, never renormalized.
void check_weights(const Eigen::VectorXd& weights, double bound = 10.0);

struct WealthPath {
    Eigen::VectorXd values;  // steps + 1
    WealthScheme scheme = WealthScheme::EulerReturns;

    double initial() const { return values[0]; }
    double terminal() const { return values[values.size() - 1]; }
};

// Integrates the portfolio value over a realized path.
//   EulerReturns: Z_{k+1} = Z_k (1 + sum_i pi_i dS_i/S_i)  (arithmetic)
//   LogIto:       log Z stepped by (pi.alpha - pi'ss'pi/2) dt + pi's dW,
//                 using the spec coefficients and the path's increments.
WealthPath portfolio_value(const MarketSpec& spec, const MarketPath& path, const Portfolio& pf,
                           double z0, WealthScheme scheme);

// Weights proportional to prices: mu_i = S_i / sum_j S_j.
Eigen::VectorXd market_portfolio(const Eigen::VectorXd& prices);

// gamma_i = alpha_i - |sigma row i|^2 / 2.
Eigen::VectorXd growth_rate(const DriftVolSnapshot& snapshot);

// Empirical relative-arbitrage verdict on paired wealth ensembles sharing
// driver paths and initial value.
struct RelativeArbitrageReport {
    double q = 0.0;
    double horizon = 0.0;
    double frac_geq = 0.0;   // Z_pi(T) >= Z_rho(T)
    double frac_gt = 0.0;    // strict >
    double floor_ok = 0.0;   // min_t Z_pi/Z_rho >= q
    bool verdict = false;    // frac_geq == 1 and frac_gt > 0 and floor_ok == 1
    int n_paths = 0;
};

RelativeArbitrageReport detect_relative_arbitrage(const std::vector<WealthPath>& z_pi,
                                                  const std::vector<WealthPath>& z_rho,
                                                  double q, const TimeGrid& grid, double horizon);

// min eigenvalue of sigma sigma'; the market is non-degenerate at level eps
// when it is >= eps.
struct NondegeneracyReport {
    bool nondegenerate = false;
    double min_eigenvalue = 0.0;
};

NondegeneracyReport check_nondegeneracy(const DriftVolSnapshot& snapshot, double eps);

// Finite-horizon coherence diagnostic: distribution of the normalized weight
// drift (1/T) log(mu_i(T) / mu_i(0)) across an ensemble, per security and
// horizon. Trends only; the almost-sure limit is not decidable at finite T.
struct CoherenceTable {
    std::vector<double> horizons;
    Eigen::MatrixXd mean;      // n x n_horizons
    Eigen::MatrixXd mean_abs;  // n x n_horizons
    Eigen::MatrixXd q05;       // n x n_horizons
    Eigen::MatrixXd q95;       // n x n_horizons
};

CoherenceTable check_coherence(const std::vector<MarketPath>& paths,
                               const std::vector<double>& horizons, const TimeGrid& grid);

}  // namespace arblab
