#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arblab/market.hpp"
#include "arblab/portfolio.hpp"

namespace arblab {

// Subcommand-specific options, all defaulted; defaults are echoed in the
// emitted effective config so no silent value exists.
struct ExperimentOptions {
    std::string out_dir = "out";
    std::string scheme = "log-exact";
    std::string wealth_scheme = "euler-returns";
    double rank_tol = 1e-10;
    double weight_bound = 10.0;
    double q = 0.5;
    double z0 = 1.0;
    int t_index = 0;
    double tolerance = 0.01;
    bool emit_j = false;
    std::vector<double> horizons;  // filled from the grid when absent
    std::string pi;
    std::string rho;
    std::string input;
    int window = 0;         // 0: full history
    int est_drivers = 0;    // 0: auto by variance threshold
    double var_threshold = 0.99;
    bool horizons_explicit = false;
};

struct ExperimentConfig {
    MarketSpec market;
    TimeGrid grid;
    std::map<std::string, Portfolio> portfolios;
    std::uint64_t seed = 1;
    int n_paths = 1;
    ExperimentOptions options;
    nlohmann::json effective;  // fully-defaulted document for emission

    const Portfolio& portfolio(const std::string& name) const;
};

// Parses and validates a config file. Unknown keys and shape violations are
// reported with a JSON-pointer-style location.
ExperimentConfig parse_config(const std::string& file_path);
ExperimentConfig parse_config_json(const nlohmann::json& doc);

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> n_paths;
    std::optional<std::string> out_dir;
    std::optional<double> dt;
    std::optional<double> tolerance;
};

void apply_overrides(ExperimentConfig& cfg, const CliOverrides& overrides);

}  // namespace arblab
