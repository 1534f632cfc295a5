#include "arblab/reports.hpp"

#include <cstdio>

#include <nlohmann/json.hpp>

#include "arblab/errors.hpp"

namespace arblab {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path) {
    if (!out_) throw ValidationError("cannot open '" + path + "' for writing");
}

void CsvWriter::sep() {
    if (row_started_) out_ << ',';
    row_started_ = true;
}

void CsvWriter::header(const std::vector<std::string>& names) {
    for (const auto& n : names) { sep(); out_ << n; }
    end_row();
}

void CsvWriter::value(double v) { sep(); out_ << format_double(v); }
void CsvWriter::text(const std::string& s) { sep(); out_ << s; }
void CsvWriter::empty() { sep(); }

void CsvWriter::end_row() {
    out_ << '\n';
    row_started_ = false;
    if (!out_) throw ContractError("csv write failed");
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw ContractError("write failed for '" + path + "'");
}

void write_path_csv(const MarketPath& path, const std::string& file_path) {
    CsvWriter csv(file_path);
    std::vector<std::string> names{"t"};
    for (int i = 1; i <= path.n_securities(); ++i) names.push_back("S" + std::to_string(i));
    const int m = static_cast<int>(path.driver_increments.rows());
    for (int a = 1; a <= m; ++a) names.push_back("dW" + std::to_string(a));
    csv.header(names);
    for (int k = 0; k <= path.steps(); ++k) {
        csv.value(path.times[k]);
        for (int i = 0; i < path.n_securities(); ++i) csv.value(path.prices(i, k));
        for (int a = 0; a < m; ++a) {
            if (k == 0) csv.empty();
            else csv.value(path.driver_increments(a, k - 1));
        }
        csv.end_row();
    }
}

void write_wealth_csv(const TimeGrid& grid, const WealthPath& wealth,
                      const std::string& file_path) {
    CsvWriter csv(file_path);
    csv.header({"t", "Z"});
    for (int k = 0; k <= grid.steps; ++k) {
        csv.value(grid.time_at(k));
        csv.value(wealth.values[k]);
        csv.end_row();
    }
}

void write_residual_table_csv(const ResidualTable& table, const std::string& file_path) {
    CsvWriter csv(file_path);
    csv.header({"T", "rms_residual", "mean_residual", "n_paths"});
    for (std::size_t h = 0; h < table.horizons.size(); ++h) {
        csv.value(table.horizons[h]);
        csv.value(table.rms[h]);
        csv.value(table.mean[h]);
        csv.value(table.n_paths);
        csv.end_row();
    }
}

void write_snapshots_csv(const std::vector<DriftVolSnapshot>& snapshots,
                         const std::string& file_path) {
    CsvWriter csv(file_path);
    std::vector<std::string> names{"t"};
    if (!snapshots.empty()) {
        const int n = snapshots.front().n_securities();
        const int m = snapshots.front().n_drivers();
        for (int i = 1; i <= n; ++i) names.push_back("alpha_" + std::to_string(i));
        for (int i = 1; i <= n; ++i)
            for (int a = 1; a <= m; ++a)
                names.push_back("sigma_" + std::to_string(i) + std::to_string(a));
    }
    csv.header(names);
    for (const auto& snap : snapshots) {
        csv.value(snap.t);
        for (int i = 0; i < snap.n_securities(); ++i) csv.value(snap.alpha[i]);
        for (int i = 0; i < snap.n_securities(); ++i)
            for (int a = 0; a < snap.n_drivers(); ++a) csv.value(snap.sigma(i, a));
        csv.end_row();
    }
}

void write_matrix_csv(const Eigen::MatrixXd& matrix, const std::string& file_path) {
    CsvWriter csv(file_path);
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
        for (Eigen::Index j = 0; j < matrix.cols(); ++j) csv.value(matrix(i, j));
        csv.end_row();
    }
}

namespace {

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.empty())
        throw ValidationError(where + ": expected a non-empty array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            throw ValidationError(where + "/" + std::to_string(i) + ": expected a number");
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.empty())
        throw ValidationError(where + ": expected a non-empty array of rows");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0) throw ValidationError(where + "/0: expected a non-empty row array");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            throw ValidationError(where + "/" + std::to_string(i) + ": ragged row");
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[i][c].is_number())
                throw ValidationError(where + "/" + std::to_string(i) + "/" + std::to_string(c) +
                                      ": expected a number");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[i][c].get<double>();
        }
    }
    return m;
}

// Accepts a constant (array) or a schedule object {breakpoints, values}.
template <typename ValueT, typename ParseSegment>
PiecewiseConstant<ValueT> schedule_from_json(const nlohmann::json& j, const std::string& where,
                                             ParseSegment parse_segment) {
    if (j.is_object()) {
        for (const auto& [key, _] : j.items())
            if (key != "breakpoints" && key != "values")
                throw ValidationError(where + "/" + key + ": unknown key");
        if (!j.contains("breakpoints") || !j.contains("values"))
            throw ValidationError(where + ": schedule needs breakpoints and values");
        const auto& bps = j["breakpoints"];
        const auto& vals = j["values"];
        if (!bps.is_array() || !vals.is_array() || bps.size() != vals.size() || bps.empty())
            throw ValidationError(where + ": breakpoints and values must be equal-length arrays");
        std::vector<double> breakpoints;
        std::vector<ValueT> values;
        for (std::size_t i = 0; i < bps.size(); ++i) {
            if (!bps[i].is_number())
                throw ValidationError(where + "/breakpoints/" + std::to_string(i) +
                                      ": expected a number");
            breakpoints.push_back(bps[i].get<double>());
            values.push_back(parse_segment(vals[i], where + "/values/" + std::to_string(i)));
        }
        return PiecewiseConstant<ValueT>(std::move(breakpoints), std::move(values));
    }
    return PiecewiseConstant<ValueT>(parse_segment(j, where));
}

nlohmann::json schedule_to_json(const PiecewiseConstant<Eigen::VectorXd>& s) {
    if (s.is_constant()) return vector_to_json(s.values()[0]);
    nlohmann::json j;
    j["breakpoints"] = s.breakpoints();
    nlohmann::json vals = nlohmann::json::array();
    for (const auto& v : s.values()) vals.push_back(vector_to_json(v));
    j["values"] = std::move(vals);
    return j;
}

nlohmann::json schedule_to_json(const PiecewiseConstant<Eigen::MatrixXd>& s) {
    if (s.is_constant()) return matrix_to_json(s.values()[0]);
    nlohmann::json j;
    j["breakpoints"] = s.breakpoints();
    nlohmann::json vals = nlohmann::json::array();
    for (const auto& v : s.values()) vals.push_back(matrix_to_json(v));
    j["values"] = std::move(vals);
    return j;
}

}  // namespace

nlohmann::json market_spec_to_json(const MarketSpec& spec) {
    nlohmann::json j;
    j["n_securities"] = spec.n_securities;
    j["n_drivers"] = spec.n_drivers;
    j["initial_prices"] = vector_to_json(spec.initial_prices);
    j["drift"] = schedule_to_json(spec.drift);
    j["vol"] = schedule_to_json(spec.vol);
    return j;
}

MarketSpec market_spec_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        if (key != "n_securities" && key != "n_drivers" && key != "initial_prices" &&
            key != "drift" && key != "vol")
            throw ValidationError(where + "/" + key + ": unknown key");
    }
    for (const char* req : {"n_securities", "n_drivers", "initial_prices", "drift", "vol"})
        if (!j.contains(req))
            throw ValidationError(where + "/" + req + ": missing required key");

    MarketSpec spec;
    if (!j["n_securities"].is_number_integer())
        throw ValidationError(where + "/n_securities: expected an integer");
    if (!j["n_drivers"].is_number_integer())
        throw ValidationError(where + "/n_drivers: expected an integer");
    spec.n_securities = j["n_securities"].get<int>();
    spec.n_drivers = j["n_drivers"].get<int>();
    spec.initial_prices = vector_from_json(j["initial_prices"], where + "/initial_prices");
    spec.drift = schedule_from_json<Eigen::VectorXd>(j["drift"], where + "/drift",
                                                     vector_from_json);
    spec.vol = schedule_from_json<Eigen::MatrixXd>(j["vol"], where + "/vol", matrix_from_json);
    spec.validate();
    return spec;
}

nlohmann::json decomposition_to_json(const GaugeDecomposition& d) {
    nlohmann::json j;
    j["abar"] = d.market_drift;
    j["sbar"] = vector_to_json(d.market_vol);
    j["beta"] = vector_to_json(d.beta);
    j["k"] = d.k;
    j["alphaA"] = vector_to_json(d.alpha_A);
    j["measure"] = arbitrage_measure(d);
    j["residual"] = d.reconstruction_residual;
    return j;
}

nlohmann::json relative_arbitrage_to_json(const RelativeArbitrageReport& r) {
    nlohmann::json j;
    j["q"] = r.q;
    j["T"] = r.horizon;
    j["frac_geq"] = r.frac_geq;
    j["frac_gt"] = r.frac_gt;
    j["floor_ok"] = r.floor_ok;
    j["verdict"] = r.verdict;
    j["n_paths"] = r.n_paths;
    return j;
}

nlohmann::json transport_report_to_json(const TransportReport& r) {
    nlohmann::json j;
    j["t"] = r.t;
    j["T"] = r.horizon;
    j["dt"] = r.dt;
    j["n_paths"] = r.n_paths;
    j["residual_corrected_mean"] = r.residual_corrected_mean;
    j["residual_corrected_max"] = r.residual_corrected_max;
    j["residual_verbatim_mean"] = r.residual_verbatim_mean;
    j["residual_verbatim_max"] = r.residual_verbatim_max;
    j["verbatim_log_bias_mean"] = r.verbatim_log_bias_mean;
    j["predicted_bias_mean"] = r.predicted_bias_mean;
    j["novikov_estimate"] = r.novikov_estimate;
    j["density_mean"] = r.density_mean;
    j["normal_expectation_residual"] = r.normal_expectation_residual;
    return j;
}

void write_json(const nlohmann::json& j, const std::string& file_path) {
    write_text_file(file_path, j.dump(2) + "\n");
}

}  // namespace arblab
