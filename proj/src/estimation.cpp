#include "arblab/estimation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "arblab/errors.hpp"
#include "arblab/reports.hpp"

namespace arblab {

void PriceTable::validate() const {
    if (rows() < 2) throw ValidationError("price table: need at least 2 rows");
    if (n_securities() < 1) throw ValidationError("price table: need at least 1 security");
    if (static_cast<int>(labels.size()) != n_securities())
        throw ValidationError("price table: one label per security required");
    const double step = dt();
    if (!(step > 0.0)) throw ValidationError("price table: times must be increasing");
    for (int k = 1; k < rows(); ++k) {
        const double d = times[k] - times[k - 1];
        if (std::abs(d - step) > 1e-9 * std::max(1.0, std::abs(step)))
            throw ValidationError("price table: non-uniform grid at row " + std::to_string(k + 1));
    }
    for (int i = 0; i < n_securities(); ++i)
        for (int k = 0; k < rows(); ++k)
            if (!(prices(i, k) > 0.0))
                throw ValidationError("price table: non-positive price at row " +
                                      std::to_string(k + 1) + ", column '" + labels[i] + "'");
}

PriceTable load_prices(const std::string& file_path) {
    std::ifstream in(file_path);
    if (!in) throw ValidationError("cannot open price file '" + file_path + "'");

    std::string line;
    if (!std::getline(in, line)) throw ValidationError("price file '" + file_path + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    PriceTable table;
    {
        std::stringstream header(line);
        std::string cell;
        if (!std::getline(header, cell, ',') || cell != "t")
            throw ValidationError("price file: header must start with 't'");
        while (std::getline(header, cell, ',')) table.labels.push_back(cell);
        if (table.labels.empty()) throw ValidationError("price file: no security columns");
    }

    const int n = static_cast<int>(table.labels.size());
    std::vector<double> times;
    std::vector<double> values;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        for (int c = 0; c <= n; ++c) {
            if (!std::getline(ss, cell, ','))
                throw ValidationError("price file: row " + std::to_string(row) + " has " +
                                      std::to_string(c) + " fields, expected " + std::to_string(n + 1));
            std::size_t pos = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != cell.size() || cell.empty())
                throw ValidationError("price file: cannot parse '" + cell + "' at row " +
                                      std::to_string(row) + ", field " + std::to_string(c + 1));
            if (c == 0)
                times.push_back(v);
            else
                values.push_back(v);
        }
        std::string extra;
        if (std::getline(ss, extra, ','))
            throw ValidationError("price file: row " + std::to_string(row) + " has extra fields");
    }
    if (times.size() < 2) throw ValidationError("price file: need at least 2 data rows");

    table.times = Eigen::Map<Eigen::VectorXd>(times.data(), static_cast<Eigen::Index>(times.size()));
    table.prices.resize(n, static_cast<Eigen::Index>(times.size()));
    for (std::size_t k = 0; k < times.size(); ++k)
        for (int i = 0; i < n; ++i) table.prices(i, static_cast<Eigen::Index>(k)) = values[k * n + i];
    table.validate();
    return table;
}

void write_prices(const PriceTable& table, const std::string& file_path) {
    CsvWriter csv(file_path);
    std::vector<std::string> header{"t"};
    header.insert(header.end(), table.labels.begin(), table.labels.end());
    csv.header(header);
    for (int k = 0; k < table.rows(); ++k) {
        csv.value(table.times[k]);
        for (int i = 0; i < table.n_securities(); ++i) csv.value(table.prices(i, k));
        csv.end_row();
    }
}

PriceTable to_price_table(const MarketPath& path, const std::vector<std::string>& labels) {
    PriceTable table;
    table.times = path.times;
    table.prices = path.prices;
    table.labels = labels;
    table.validate();
    return table;
}

std::vector<DriftVolSnapshot> estimate_drift_vol(const PriceTable& table, int window,
                                                 int n_drivers, double var_threshold) {
    table.validate();
    const int n = table.n_securities();
    const int n_returns = table.rows() - 1;
    if (n_drivers < 0 || n_drivers > n)
        throw ValidationError("estimate_drift_vol: n_drivers must be in [0, n]");
    const int min_window = std::max(n_drivers, 1) + 2;
    if (window < min_window)
        throw ValidationError("estimate_drift_vol: window must be >= n_drivers + 2");
    if (window > n_returns)
        throw ValidationError("estimate_drift_vol: window exceeds available returns");

    const double dt = table.dt();
    Eigen::MatrixXd log_returns(n, n_returns);
    for (int k = 0; k < n_returns; ++k)
        log_returns.col(k) =
            (table.prices.col(k + 1).array() / table.prices.col(k).array()).log().matrix();

    std::vector<DriftVolSnapshot> out;
    out.reserve(n_returns - window + 1);
    for (int start = 0; start + window <= n_returns; ++start) {
        const auto block = log_returns.middleCols(start, window);
        const Eigen::VectorXd mean = block.rowwise().mean();
        const Eigen::MatrixXd centered = block.colwise() - mean;
        const Eigen::MatrixXd cov = centered * centered.transpose() / (window - 1);

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov / dt);
        if (eig.info() != Eigen::Success)
            throw ContractError("estimate_drift_vol: eigendecomposition failed");
        // Eigen returns ascending order; work with descending.
        Eigen::VectorXd lambda = eig.eigenvalues().reverse();
        Eigen::MatrixXd vectors = eig.eigenvectors().rowwise().reverse();
        const double trace = lambda.array().max(0.0).sum();
        const double lambda_max = lambda.size() > 0 ? std::max(lambda[0], 0.0) : 0.0;
        int rank = 0;
        for (int i = 0; i < lambda.size(); ++i)
            if (lambda[i] > 1e-12 * lambda_max && lambda[i] > 0.0) ++rank;

        int m = n_drivers;
        if (m == 0) {
            // Auto mode on zero covariance yields a factor-free snapshot.
            double cum = 0.0;
            for (int i = 0; i < rank; ++i) {
                cum += lambda[i];
                if (cum >= var_threshold * trace) { m = i + 1; break; }
            }
            if (m == 0) m = rank;
        } else if (m > rank) {
            throw ValidationError("estimate_drift_vol: requested " + std::to_string(m) +
                                  " drivers but data rank is " + std::to_string(rank));
        }

        DriftVolSnapshot snap;
        snap.t = table.times[start + window];
        snap.alpha = mean / dt + 0.5 * cov.diagonal() / dt;
        snap.sigma.resize(n, m);
        for (int j = 0; j < m; ++j) {
            Eigen::VectorXd col = std::sqrt(std::max(lambda[j], 0.0)) * vectors.col(j);
            int arg = 0;
            for (int i = 1; i < n; ++i)
                if (std::abs(col[i]) > std::abs(col[arg])) arg = i;
            if (col[arg] < 0.0) col = -col;
            snap.sigma.col(j) = col;
        }
        out.push_back(std::move(snap));
    }
    return out;
}

}  // namespace arblab
