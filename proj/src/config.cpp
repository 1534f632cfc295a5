#include "arblab/config.hpp"

#include <cmath>
#include <fstream>

#include "arblab/errors.hpp"
#include "arblab/reports.hpp"

namespace arblab {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::string& where,
                         std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) { ok = true; break; }
        if (!ok) throw ValidationError(where + "/" + key + ": unknown key");
    }
}

double get_number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ValidationError(where + ": expected a number");
    return j.get<double>();
}

int get_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw ValidationError(where + ": expected an integer");
    return j.get<int>();
}

std::string get_string(const json& j, const std::string& where) {
    if (!j.is_string()) throw ValidationError(where + ": expected a string");
    return j.get<std::string>();
}

bool get_bool(const json& j, const std::string& where) {
    if (!j.is_boolean()) throw ValidationError(where + ": expected a boolean");
    return j.get<bool>();
}

TimeGrid grid_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + ": expected an object");
    reject_unknown_keys(j, where, {"horizon", "steps"});
    if (!j.contains("horizon")) throw ValidationError(where + "/horizon: missing required key");
    if (!j.contains("steps")) throw ValidationError(where + "/steps: missing required key");
    TimeGrid grid;
    grid.horizon = get_number(j["horizon"], where + "/horizon");
    grid.steps = get_int(j["steps"], where + "/steps");
    grid.validate();
    return grid;
}

Portfolio portfolio_from_json(const json& j, const std::string& where, int n, int steps,
                              double bound) {
    if (!j.is_object()) throw ValidationError(where + ": expected an object");
    reject_unknown_keys(j, where, {"type", "weights"});
    if (!j.contains("type")) throw ValidationError(where + "/type: missing required key");
    const std::string type = get_string(j["type"], where + "/type");
    if (type == "market") {
        if (j.contains("weights"))
            throw ValidationError(where + "/weights: not allowed for market portfolios");
        return Portfolio::market();
    }
    if (!j.contains("weights")) throw ValidationError(where + "/weights: missing required key");
    const json& w = j["weights"];
    try {
        if (type == "constant") {
            if (!w.is_array() || w.size() != static_cast<std::size_t>(n))
                throw ValidationError(where + "/weights: expected " + std::to_string(n) +
                                      " numbers");
            Eigen::VectorXd v(n);
            for (int i = 0; i < n; ++i) v[i] = get_number(w[i], where + "/weights");
            return Portfolio::constant(v, bound);
        }
        if (type == "schedule") {
            if (!w.is_array() || w.size() != static_cast<std::size_t>(steps))
                throw ValidationError(where + "/weights: expected one row per grid slice (" +
                                      std::to_string(steps) + ")");
            Eigen::MatrixXd m(n, steps);
            for (int k = 0; k < steps; ++k) {
                if (!w[k].is_array() || w[k].size() != static_cast<std::size_t>(n))
                    throw ValidationError(where + "/weights/" + std::to_string(k) +
                                          ": expected " + std::to_string(n) + " numbers");
                for (int i = 0; i < n; ++i)
                    m(i, k) = get_number(w[k][i], where + "/weights/" + std::to_string(k));
            }
            return Portfolio::schedule(m, bound);
        }
    } catch (const ValidationError& e) {
        throw ValidationError(std::string(e.what()).find(where) == 0
                                  ? e.what()
                                  : where + ": " + e.what());
    }
    throw ValidationError(where + "/type: expected constant, market, or schedule");
}

json portfolio_echo(const json& input) { return input; }

std::vector<double> default_horizons(const TimeGrid& grid) {
    std::vector<int> indices{std::max(1, grid.steps / 16), std::max(1, grid.steps / 4),
                             grid.steps};
    std::vector<double> horizons;
    for (int idx : indices) {
        const double t = grid.time_at(idx);
        if (horizons.empty() || horizons.back() < t) horizons.push_back(t);
    }
    return horizons;
}

}  // namespace

const Portfolio& ExperimentConfig::portfolio(const std::string& name) const {
    auto it = portfolios.find(name);
    if (it == portfolios.end())
        throw ValidationError("portfolio '" + name + "' is not defined in the config");
    return it->second;
}

ExperimentConfig parse_config(const std::string& file_path) {
    std::ifstream in(file_path);
    if (!in) throw ValidationError("cannot open config file '" + file_path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ValidationError("config parse failure: " + std::string(e.what()));
    }
    return parse_config_json(doc);
}

ExperimentConfig parse_config_json(const json& doc) {
    if (!doc.is_object()) throw ValidationError(": config root must be an object");
    reject_unknown_keys(doc, "", {"market", "grid", "portfolios", "seed", "n_paths", "options"});
    if (!doc.contains("market")) throw ValidationError("/market: missing required key");
    if (!doc.contains("grid")) throw ValidationError("/grid: missing required key");

    ExperimentConfig cfg;
    cfg.market = market_spec_from_json(doc["market"], "/market");
    cfg.grid = grid_from_json(doc["grid"], "/grid");

    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer() || doc["seed"].get<std::int64_t>() < 0)
            throw ValidationError("/seed: expected a non-negative integer");
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("n_paths")) {
        cfg.n_paths = get_int(doc["n_paths"], "/n_paths");
        if (cfg.n_paths < 1) throw ValidationError("/n_paths: must be >= 1");
    }

    ExperimentOptions& o = cfg.options;
    if (doc.contains("options")) {
        const json& j = doc["options"];
        if (!j.is_object()) throw ValidationError("/options: expected an object");
        reject_unknown_keys(j, "/options",
                            {"out_dir", "scheme", "wealth_scheme", "rank_tol", "weight_bound",
                             "q", "z0", "t_index", "tolerance", "emit_j", "horizons", "pi",
                             "rho", "input", "window", "est_drivers", "var_threshold"});
        if (j.contains("out_dir")) o.out_dir = get_string(j["out_dir"], "/options/out_dir");
        if (j.contains("scheme")) {
            o.scheme = get_string(j["scheme"], "/options/scheme");
            scheme_from_string(o.scheme);
        }
        if (j.contains("wealth_scheme")) {
            o.wealth_scheme = get_string(j["wealth_scheme"], "/options/wealth_scheme");
            wealth_scheme_from_string(o.wealth_scheme);
        }
        if (j.contains("rank_tol")) {
            o.rank_tol = get_number(j["rank_tol"], "/options/rank_tol");
            if (!(o.rank_tol > 0.0)) throw ValidationError("/options/rank_tol: must be positive");
        }
        if (j.contains("weight_bound")) {
            o.weight_bound = get_number(j["weight_bound"], "/options/weight_bound");
            if (!(o.weight_bound > 0.0))
                throw ValidationError("/options/weight_bound: must be positive");
        }
        if (j.contains("q")) {
            o.q = get_number(j["q"], "/options/q");
            if (!(o.q > 0.0)) throw ValidationError("/options/q: must be positive");
        }
        if (j.contains("z0")) {
            o.z0 = get_number(j["z0"], "/options/z0");
            if (!(o.z0 > 0.0)) throw ValidationError("/options/z0: must be positive");
        }
        if (j.contains("t_index")) {
            o.t_index = get_int(j["t_index"], "/options/t_index");
            if (o.t_index < 0 || o.t_index >= cfg.grid.steps)
                throw ValidationError("/options/t_index: out of grid range");
        }
        if (j.contains("tolerance")) {
            o.tolerance = get_number(j["tolerance"], "/options/tolerance");
            if (!(o.tolerance > 0.0)) throw ValidationError("/options/tolerance: must be positive");
        }
        if (j.contains("emit_j")) o.emit_j = get_bool(j["emit_j"], "/options/emit_j");
        if (j.contains("horizons")) {
            if (!j["horizons"].is_array() || j["horizons"].empty())
                throw ValidationError("/options/horizons: expected a non-empty array");
            for (std::size_t h = 0; h < j["horizons"].size(); ++h) {
                const double t =
                    get_number(j["horizons"][h], "/options/horizons/" + std::to_string(h));
                cfg.grid.index_of(t);  // must lie on the grid
                o.horizons.push_back(t);
            }
            o.horizons_explicit = true;
        }
        if (j.contains("pi")) o.pi = get_string(j["pi"], "/options/pi");
        if (j.contains("rho")) o.rho = get_string(j["rho"], "/options/rho");
        if (j.contains("input")) o.input = get_string(j["input"], "/options/input");
        if (j.contains("window")) {
            o.window = get_int(j["window"], "/options/window");
            if (o.window < 0) throw ValidationError("/options/window: must be >= 0");
        }
        if (j.contains("est_drivers")) {
            o.est_drivers = get_int(j["est_drivers"], "/options/est_drivers");
            if (o.est_drivers < 0) throw ValidationError("/options/est_drivers: must be >= 0");
        }
        if (j.contains("var_threshold")) {
            o.var_threshold = get_number(j["var_threshold"], "/options/var_threshold");
            if (!(o.var_threshold > 0.0 && o.var_threshold <= 1.0))
                throw ValidationError("/options/var_threshold: must be in (0, 1]");
        }
    }
    if (o.horizons.empty()) o.horizons = default_horizons(cfg.grid);

    json portfolios_echo = json::object();
    if (doc.contains("portfolios")) {
        const json& j = doc["portfolios"];
        if (!j.is_object()) throw ValidationError("/portfolios: expected an object");
        for (const auto& [name, pj] : j.items()) {
            cfg.portfolios.emplace(name, portfolio_from_json(pj, "/portfolios/" + name,
                                                             cfg.market.n_securities,
                                                             cfg.grid.steps, o.weight_bound));
            portfolios_echo[name] = portfolio_echo(pj);
        }
    }
    for (const std::string& name : {o.pi, o.rho})
        if (!name.empty() && cfg.portfolios.find(name) == cfg.portfolios.end())
            throw ValidationError("/options: portfolio '" + name + "' is not defined");

    // Effective document: every default made explicit.
    json eff;
    eff["market"] = market_spec_to_json(cfg.market);
    eff["grid"] = {{"horizon", cfg.grid.horizon}, {"steps", cfg.grid.steps}};
    eff["portfolios"] = portfolios_echo;
    eff["seed"] = cfg.seed;
    eff["n_paths"] = cfg.n_paths;
    eff["options"] = {{"out_dir", o.out_dir},
                      {"scheme", o.scheme},
                      {"wealth_scheme", o.wealth_scheme},
                      {"rank_tol", o.rank_tol},
                      {"weight_bound", o.weight_bound},
                      {"q", o.q},
                      {"z0", o.z0},
                      {"t_index", o.t_index},
                      {"tolerance", o.tolerance},
                      {"emit_j", o.emit_j},
                      {"horizons", o.horizons},
                      {"pi", o.pi},
                      {"rho", o.rho},
                      {"input", o.input},
                      {"window", o.window},
                      {"est_drivers", o.est_drivers},
                      {"var_threshold", o.var_threshold}};
    cfg.effective = std::move(eff);
    return cfg;
}

void apply_overrides(ExperimentConfig& cfg, const CliOverrides& overrides) {
    if (overrides.seed) {
        cfg.seed = *overrides.seed;
        cfg.effective["seed"] = cfg.seed;
    }
    if (overrides.n_paths) {
        if (*overrides.n_paths < 1) throw ValidationError("--paths must be >= 1");
        cfg.n_paths = *overrides.n_paths;
        cfg.effective["n_paths"] = cfg.n_paths;
    }
    if (overrides.out_dir) {
        cfg.options.out_dir = *overrides.out_dir;
        cfg.effective["options"]["out_dir"] = cfg.options.out_dir;
    }
    if (overrides.dt) {
        const double dt = *overrides.dt;
        if (!(dt > 0.0)) throw ValidationError("--dt must be positive");
        const double steps = cfg.grid.horizon / dt;
        const auto rounded = static_cast<int>(std::llround(steps));
        if (rounded < 1 || std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps))
            throw ValidationError("--dt must divide the grid horizon");
        cfg.grid.steps = rounded;
        cfg.effective["grid"]["steps"] = rounded;
        if (cfg.options.horizons_explicit) {
            for (double t : cfg.options.horizons) cfg.grid.index_of(t);
        } else {
            cfg.options.horizons = default_horizons(cfg.grid);
            cfg.effective["options"]["horizons"] = cfg.options.horizons;
        }
    }
    if (overrides.tolerance) {
        if (!(*overrides.tolerance > 0.0)) throw ValidationError("--tolerance must be positive");
        cfg.options.tolerance = *overrides.tolerance;
        cfg.effective["options"]["tolerance"] = cfg.options.tolerance;
    }
}

}  // namespace arblab
