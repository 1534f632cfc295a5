#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "arblab/gauge.hpp"
#include "arblab/market.hpp"

namespace arblab {

// Historical or synthetic price table on a uniform grid.
struct PriceTable {
    Eigen::VectorXd times;            // rows, strictly increasing, uniform dt
    Eigen::MatrixXd prices;           // n x rows, strictly positive
    std::vector<std::string> labels;  // n

    int n_securities() const { return static_cast<int>(prices.rows()); }
    int rows() const { return static_cast<int>(prices.cols()); }
    double dt() const { return times[1] - times[0]; }
    void validate() const;
};

// Parses `t,<label1>,...,<labeln>` CSV. Errors name the offending cell.
PriceTable load_prices(const std::string& file_path);

void write_prices(const PriceTable& table, const std::string& file_path);

PriceTable to_price_table(const MarketPath& path, const std::vector<std::string>& labels);

// Rolling moment estimation of log returns feeding the drift decomposition.
//   alpha_i = mean_i/dt + cov_ii/(2 dt)   (targets the SDE drift, not growth)
//   sigma   = top-m spectral factor of cov/dt
// n_drivers = 0 picks the smallest rank explaining var_threshold of the
// covariance trace. Snapshots are stamped with the window's right-edge time.
std::vector<DriftVolSnapshot> estimate_drift_vol(const PriceTable& table, int window,
                                                 int n_drivers, double var_threshold = 0.99);

}  // namespace arblab
