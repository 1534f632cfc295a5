#include "arblab/runner.hpp"

#include <filesystem>

#include <nlohmann/json.hpp>

#include "arblab/errors.hpp"
#include "arblab/estimation.hpp"
#include "arblab/parallel.hpp"
#include "arblab/relative.hpp"
#include "arblab/reports.hpp"
#include "arblab/transport.hpp"

namespace arblab {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    return (fs::path(cfg.options.out_dir) / name).string();
}

void prepare_out_dir(const ExperimentConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.options.out_dir, ec);
    if (ec) throw ValidationError("cannot create output directory '" + cfg.options.out_dir + "'");
    write_json(cfg.effective, out_path(cfg, "effective_config.json"));
}

const Portfolio& required_portfolio(const ExperimentConfig& cfg, const std::string& name,
                                    const std::string& option) {
    if (name.empty())
        throw ValidationError("/options/" + option + ": required for this subcommand");
    return cfg.portfolio(name);
}

int run_simulate(const ExperimentConfig& cfg) {
    const Scheme scheme = scheme_from_string(cfg.options.scheme);
    for (int p = 0; p < cfg.n_paths; ++p) {
        const MarketPath path = simulate_market(cfg.market, cfg.grid, cfg.seed, scheme,
                                                static_cast<std::uint64_t>(p));
        write_path_csv(path, out_path(cfg, "path_" + std::to_string(p) + ".csv"));
    }
    return 0;
}

int run_decompose(const ExperimentConfig& cfg) {
    const DecompositionSchedule sched =
        decompose_schedule(cfg.market, cfg.grid, cfg.options.rank_tol);
    json segments = json::array();
    int slice = 0;
    for (std::size_t s = 0; s < sched.segments.size(); ++s) {
        while (sched.slice_segment[slice] != static_cast<int>(s)) ++slice;
        json seg = decomposition_to_json(sched.segments[s]);
        seg["t"] = cfg.grid.time_at(slice);
        segments.push_back(std::move(seg));
        if (cfg.options.emit_j)
            write_matrix_csv(sched.segments[s].J,
                             out_path(cfg, "J_segment_" + std::to_string(s) + ".csv"));
    }
    json doc;
    doc["segments"] = std::move(segments);
    write_json(doc, out_path(cfg, "decomposition.json"));
    return 0;
}

int run_arb_wealth(const ExperimentConfig& cfg) {
    const DecompositionSchedule sched =
        decompose_schedule(cfg.market, cfg.grid, cfg.options.rank_tol);
    const double wealth = arbitrage_wealth(sched.per_slice(), cfg.grid);
    json doc;
    doc["T"] = cfg.grid.horizon;
    doc["wealth_integral"] = wealth;
    json measures = json::array();
    int slice = 0;
    for (std::size_t s = 0; s < sched.segments.size(); ++s) {
        while (sched.slice_segment[slice] != static_cast<int>(s)) ++slice;
        measures.push_back({{"t", cfg.grid.time_at(slice)},
                            {"measure", arbitrage_measure(sched.segments[s])}});
    }
    doc["measures"] = std::move(measures);
    write_json(doc, out_path(cfg, "arb_wealth.json"));
    return 0;
}

int run_portfolio(const ExperimentConfig& cfg) {
    const Portfolio& pi = required_portfolio(cfg, cfg.options.pi, "pi");
    const Portfolio& rho = required_portfolio(cfg, cfg.options.rho, "rho");
    const Scheme scheme = scheme_from_string(cfg.options.scheme);
    const WealthScheme wscheme = wealth_scheme_from_string(cfg.options.wealth_scheme);

    std::vector<WealthPath> z_pi(cfg.n_paths), z_rho(cfg.n_paths);
    parallel_for_index(cfg.n_paths, [&](std::int64_t p) {
        const MarketPath path = simulate_market(cfg.market, cfg.grid, cfg.seed, scheme,
                                                static_cast<std::uint64_t>(p));
        z_pi[p] = portfolio_value(cfg.market, path, pi, cfg.options.z0, wscheme);
        z_rho[p] = portfolio_value(cfg.market, path, rho, cfg.options.z0, wscheme);
    });
    const RelativeArbitrageReport report =
        detect_relative_arbitrage(z_pi, z_rho, cfg.options.q, cfg.grid, cfg.grid.horizon);
    write_json(relative_arbitrage_to_json(report), out_path(cfg, "relative_arbitrage.json"));
    write_wealth_csv(cfg.grid, z_pi[0], out_path(cfg, "wealth_" + cfg.options.pi + ".csv"));
    write_wealth_csv(cfg.grid, z_rho[0], out_path(cfg, "wealth_" + cfg.options.rho + ".csv"));
    return 0;
}

int run_relative(const ExperimentConfig& cfg) {
    const Portfolio& pi = required_portfolio(cfg, cfg.options.pi, "pi");
    const Portfolio& rho = required_portfolio(cfg, cfg.options.rho, "rho");
    const Scheme scheme = scheme_from_string(cfg.options.scheme);
    const WealthScheme wscheme = wealth_scheme_from_string(cfg.options.wealth_scheme);
    const DecompositionSchedule sched =
        decompose_schedule(cfg.market, cfg.grid, cfg.options.rank_tol);

    const MarketPath path = simulate_market(cfg.market, cfg.grid, cfg.seed, scheme, 0);

    // Per-segment predicted coefficients with the weights at the segment's
    // first slice.
    json segments = json::array();
    int slice = 0;
    for (std::size_t s = 0; s < sched.segments.size(); ++s) {
        while (sched.slice_segment[slice] != static_cast<int>(s)) ++slice;
        const DriftVolSnapshot snap = snapshot_at_slice(cfg.market, cfg.grid, slice);
        const Eigen::VectorXd w_pi = pi.weights_at(slice, path);
        const Eigen::VectorXd w_rho = rho.weights_at(slice, path);
        const GaugeDecomposition& d = sched.segments[s];
        const RelativeCoefficients coeffs = predicted_relative_coeffs(d, snap, w_pi, w_rho);
        const RelativeSdeCoefficients sde = relative_sde_coeffs(snap, d, w_pi, w_rho);
        const double gauge_drift = relative_drift_from_gauge(d, coeffs, w_pi, w_rho);
        json seg;
        seg["t"] = cfg.grid.time_at(slice);
        seg["beta_hat"] = std::vector<double>(coeffs.beta_hat.data(),
                                              coeffs.beta_hat.data() + coeffs.beta_hat.size());
        seg["beta_tilde"] = std::vector<double>(coeffs.beta_tilde.data(),
                                                coeffs.beta_tilde.data() + coeffs.beta_tilde.size());
        seg["drift"] = sde.drift;
        seg["vol"] = std::vector<double>(sde.vol.data(), sde.vol.data() + sde.vol.size());
        seg["log_drift"] = sde.log_drift;
        seg["gauge_drift"] = gauge_drift;
        seg["consistency_gap"] = std::abs(sde.drift - gauge_drift);
        segments.push_back(std::move(seg));
    }
    write_json(json{{"segments", segments}}, out_path(cfg, "relative_coeffs.json"));

    const WealthPath z_pi = portfolio_value(cfg.market, path, pi, cfg.options.z0, wscheme);
    const WealthPath z_rho = portfolio_value(cfg.market, path, rho, cfg.options.z0, wscheme);
    const RelativeWealth rel = relative_wealth_paths(z_pi, z_rho);
    CsvWriter csv(out_path(cfg, "relative_wealth.csv"));
    csv.header({"t", "ratio", "log_ratio"});
    for (int k = 0; k <= cfg.grid.steps; ++k) {
        csv.value(cfg.grid.time_at(k));
        csv.value(rel.ratio[k]);
        csv.value(rel.log_ratio[k]);
        csv.end_row();
    }
    return 0;
}

int run_corollary(const ExperimentConfig& cfg) {
    const Portfolio& pi = required_portfolio(cfg, cfg.options.pi, "pi");
    const Portfolio& rho = required_portfolio(cfg, cfg.options.rho, "rho");
    const DecompositionSchedule sched =
        decompose_schedule(cfg.market, cfg.grid, cfg.options.rank_tol);

    std::vector<Eigen::VectorXd> residuals(cfg.n_paths);
    parallel_for_index(cfg.n_paths, [&](std::int64_t p) {
        const MarketPath path = simulate_market(cfg.market, cfg.grid, cfg.seed, Scheme::LogExact,
                                                static_cast<std::uint64_t>(p));
        const WealthPath z_pi =
            portfolio_value(cfg.market, path, pi, cfg.options.z0, WealthScheme::EulerReturns);
        const WealthPath z_rho =
            portfolio_value(cfg.market, path, rho, cfg.options.z0, WealthScheme::EulerReturns);
        const RelativeWealth rel = relative_wealth_paths(z_pi, z_rho);
        Eigen::VectorXd drift(cfg.grid.steps);
        for (int k = 0; k < cfg.grid.steps; ++k) {
            const DriftVolSnapshot snap = snapshot_at_slice(cfg.market, cfg.grid, k);
            drift[k] = relative_sde_coeffs(snap, sched.at_slice(k), pi.weights_at(k, path),
                                           rho.weights_at(k, path))
                           .log_drift;
        }
        residuals[p] = longterm_residual(rel.log_ratio, drift, cfg.grid, cfg.options.horizons);
    });
    const ResidualTable table = aggregate_residuals(residuals, cfg.options.horizons);
    write_residual_table_csv(table, out_path(cfg, "residual_table.csv"));
    return 0;
}

int run_transport(const ExperimentConfig& cfg) {
    const Portfolio& pi = required_portfolio(cfg, cfg.options.pi, "pi");
    const TransportReport report = transport_experiment(
        cfg.market, cfg.grid, pi, cfg.options.t_index, cfg.seed, cfg.n_paths,
        cfg.options.rank_tol);
    write_json(transport_report_to_json(report), out_path(cfg, "transport_report.json"));
    if (report.normal_expectation_residual > 1e-10)
        throw ContractError("drift-only transport residual " +
                            format_double(report.normal_expectation_residual) + " exceeds 1e-10");
    if (report.residual_corrected_max > cfg.options.tolerance)
        throw ContractError("transport residual " + format_double(report.residual_corrected_max) +
                            " exceeds tolerance " + format_double(cfg.options.tolerance));
    return 0;
}

int run_estimate(const ExperimentConfig& cfg) {
    if (cfg.options.input.empty())
        throw ValidationError("/options/input: required for the estimate subcommand");
    const PriceTable table = load_prices(cfg.options.input);
    const int window = cfg.options.window == 0 ? table.rows() - 1 : cfg.options.window;
    const std::vector<DriftVolSnapshot> snapshots =
        estimate_drift_vol(table, window, cfg.options.est_drivers, cfg.options.var_threshold);
    write_snapshots_csv(snapshots, out_path(cfg, "snapshots.csv"));

    json estimates = json::array();
    for (const auto& snap : snapshots) {
        json e;
        if (snap.n_drivers() > 0) e = decomposition_to_json(decompose(snap, cfg.options.rank_tol));
        e["t"] = snap.t;
        e["m"] = snap.n_drivers();
        estimates.push_back(std::move(e));
    }
    write_json(json{{"estimates", estimates}}, out_path(cfg, "estimates.json"));
    return 0;
}

}  // namespace

bool is_known_subcommand(const std::string& subcommand) {
    static const char* names[] = {"simulate", "decompose", "arb-wealth", "portfolio",
                                  "relative", "corollary", "transport", "estimate"};
    for (const char* n : names)
        if (subcommand == n) return true;
    return false;
}

int run(const std::string& subcommand, const ExperimentConfig& cfg) {
    if (!is_known_subcommand(subcommand))
        throw ValidationError("unknown subcommand '" + subcommand + "'");
    prepare_out_dir(cfg);
    if (subcommand == "simulate") return run_simulate(cfg);
    if (subcommand == "decompose") return run_decompose(cfg);
    if (subcommand == "arb-wealth") return run_arb_wealth(cfg);
    if (subcommand == "portfolio") return run_portfolio(cfg);
    if (subcommand == "relative") return run_relative(cfg);
    if (subcommand == "corollary") return run_corollary(cfg);
    if (subcommand == "transport") return run_transport(cfg);
    return run_estimate(cfg);
}

}  // namespace arblab
