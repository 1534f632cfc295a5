#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "arblab/gauge.hpp"
#include "arblab/market.hpp"
#include "arblab/portfolio.hpp"
#include "arblab/relative.hpp"
#include "arblab/transport.hpp"

namespace arblab {

// %.17g rendering: enough digits to round-trip a double, identical bytes for
// identical values.
std::string format_double(double v);

// Comma-separated writer with the fixed float format above.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    void header(const std::vector<std::string>& names);
    void value(double v);
    void text(const std::string& s);
    void empty();
    void end_row();

private:
    std::ofstream out_;
    bool row_started_ = false;
    void sep();
};

void write_text_file(const std::string& path, const std::string& content);

// ---- module exports --------------------------------------------------------

// `t,S1..Sn,dW1..dWm`; dW columns are empty on the first row.
void write_path_csv(const MarketPath& path, const std::string& file_path);

// `t,Z`.
void write_wealth_csv(const TimeGrid& grid, const WealthPath& wealth,
                      const std::string& file_path);

// `T,rms_residual,mean_residual,n_paths`.
void write_residual_table_csv(const ResidualTable& table, const std::string& file_path);

// `t,alpha_1..alpha_n,sigma_11..sigma_nm` (sigma in row-major order).
void write_snapshots_csv(const std::vector<DriftVolSnapshot>& snapshots,
                         const std::string& file_path);

void write_matrix_csv(const Eigen::MatrixXd& matrix, const std::string& file_path);

nlohmann::json market_spec_to_json(const MarketSpec& spec);
MarketSpec market_spec_from_json(const nlohmann::json& j, const std::string& where);

// {abar, sbar[], beta[], k, alphaA[], measure, residual}.
nlohmann::json decomposition_to_json(const GaugeDecomposition& decomp);

// {q, T, frac_geq, frac_gt, floor_ok, verdict, n_paths}.
nlohmann::json relative_arbitrage_to_json(const RelativeArbitrageReport& report);

nlohmann::json transport_report_to_json(const TransportReport& report);

void write_json(const nlohmann::json& j, const std::string& file_path);

}  // namespace arblab
