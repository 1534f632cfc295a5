// Config parsing, defaults, overrides, and subcommand dispatch through the
// library entry points the binary uses.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "arblab/config.hpp"
#include "arblab/errors.hpp"
#include "arblab/runner.hpp"

using namespace arblab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json minimal_config() {
    return json::parse(R"({
        "market": {
            "n_securities": 3, "n_drivers": 1,
            "initial_prices": [1.0, 1.0, 1.0],
            "drift": [0.06, 0.03, 0.06],
            "vol": [[0.1], [0.2], [0.3]]
        },
        "grid": {"horizon": 1.0, "steps": 100}
    })");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::path("cli_test_out") / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path.parent_path()); }
};

}  // namespace

TEST_CASE("minimal config gets explicit defaults") {
    const ExperimentConfig cfg = parse_config_json(minimal_config());
    CHECK(cfg.seed == 1);
    CHECK(cfg.n_paths == 1);
    CHECK(cfg.options.q == 0.5);
    CHECK(cfg.options.tolerance == 0.01);
    CHECK(cfg.options.out_dir == "out");
    CHECK(cfg.options.scheme == "log-exact");
    CHECK(cfg.options.wealth_scheme == "euler-returns");
    CHECK_FALSE(cfg.options.horizons.empty());

    // Every default appears in the effective document.
    const json& eff = cfg.effective;
    CHECK(eff["seed"] == 1);
    CHECK(eff["n_paths"] == 1);
    CHECK(eff["options"]["q"] == 0.5);
    CHECK(eff["options"]["rank_tol"] == 1e-10);
    CHECK(eff["options"]["weight_bound"] == 10.0);
    CHECK(eff["options"]["horizons"].size() == cfg.options.horizons.size());
}

TEST_CASE("unknown keys are named") {
    json doc = minimal_config();
    doc["marketx"] = 1;
    CHECK_THROWS_WITH_AS(parse_config_json(doc), doctest::Contains("/marketx"), ValidationError);

    doc = minimal_config();
    doc["options"] = {{"qq", 1.0}};
    CHECK_THROWS_WITH_AS(parse_config_json(doc), doctest::Contains("/options/qq"),
                         ValidationError);

    doc = minimal_config();
    doc["market"]["extra"] = 1;
    CHECK_THROWS_WITH_AS(parse_config_json(doc), doctest::Contains("/market/extra"),
                         ValidationError);
}

TEST_CASE("shape and value violations carry their location") {
    json doc = minimal_config();
    doc["market"]["initial_prices"] = {1.0, 1.0};
    CHECK_THROWS_AS(parse_config_json(doc), ValidationError);

    doc = minimal_config();
    doc["market"]["vol"] = {{0.1}, {0.2}};
    CHECK_THROWS_AS(parse_config_json(doc), ValidationError);

    doc = minimal_config();
    doc["options"] = {{"q", -1.0}};
    CHECK_THROWS_WITH_AS(parse_config_json(doc), doctest::Contains("/options/q"),
                         ValidationError);

    doc = minimal_config();
    doc["options"] = {{"horizons", {0.333}}};  // off the grid
    CHECK_THROWS_AS(parse_config_json(doc), ValidationError);

    doc = minimal_config();
    doc["portfolios"] = {{"bad", {{"type", "constant"}, {"weights", {0.5, 0.6, 0.2}}}}};
    CHECK_THROWS_AS(parse_config_json(doc), ValidationError);

    doc = minimal_config();
    doc["options"] = {{"pi", "ghost"}};
    CHECK_THROWS_WITH_AS(parse_config_json(doc), doctest::Contains("ghost"), ValidationError);
}

TEST_CASE("effective config round-trips") {
    json doc = minimal_config();
    doc["portfolios"] = {{"ew", {{"type", "constant"},
                                 {"weights", {1.0 / 3, 1.0 / 3, 1.0 / 3}}}},
                         {"mkt", {{"type", "market"}}}};
    doc["seed"] = 99;
    doc["options"] = {{"pi", "ew"}, {"rho", "mkt"}, {"q", 0.25}};
    const ExperimentConfig cfg = parse_config_json(doc);
    const ExperimentConfig reparsed = parse_config_json(cfg.effective);
    CHECK(cfg.effective == reparsed.effective);
}

TEST_CASE("cli overrides") {
    ExperimentConfig cfg = parse_config_json(minimal_config());
    CliOverrides ov;
    ov.seed = 123;
    ov.n_paths = 5;
    ov.dt = 0.005;
    ov.tolerance = 0.5;
    apply_overrides(cfg, ov);
    CHECK(cfg.seed == 123);
    CHECK(cfg.n_paths == 5);
    CHECK(cfg.grid.steps == 200);
    CHECK(cfg.options.tolerance == 0.5);
    CHECK(cfg.effective["grid"]["steps"] == 200);
    CHECK(cfg.effective["seed"] == 123);

    CliOverrides bad;
    bad.dt = 0.00031;  // does not divide the horizon
    CHECK_THROWS_AS(apply_overrides(cfg, bad), ValidationError);
}

TEST_CASE("run dispatch and report files") {
    TempDir dir("dispatch");
    json doc = minimal_config();
    doc["portfolios"] = {{"ew", {{"type", "constant"},
                                 {"weights", {1.0 / 3, 1.0 / 3, 1.0 / 3}}}},
                         {"mkt", {{"type", "market"}}}};
    doc["n_paths"] = 4;
    doc["options"] = {{"pi", "ew"}, {"rho", "mkt"}, {"out_dir", (dir.path / "a").string()}};
    ExperimentConfig cfg = parse_config_json(doc);

    CHECK_THROWS_AS(run("frobnicate", cfg), ValidationError);

    CHECK(run("decompose", cfg) == 0);
    const json decomposition =
        json::parse(read_file((dir.path / "a" / "decomposition.json").string()));
    CHECK(decomposition["segments"].size() == 1);
    CHECK(std::abs(decomposition["segments"][0]["measure"].get<double>() - 6.0e-4) <= 1e-12);
    CHECK(fs::exists(dir.path / "a" / "effective_config.json"));

    CHECK(run("simulate", cfg) == 0);
    CHECK(fs::exists(dir.path / "a" / "path_3.csv"));
    CHECK(run("arb-wealth", cfg) == 0);
    CHECK(run("portfolio", cfg) == 0);
    CHECK(fs::exists(dir.path / "a" / "relative_arbitrage.json"));
    CHECK(run("relative", cfg) == 0);
    CHECK(run("corollary", cfg) == 0);
    CHECK(fs::exists(dir.path / "a" / "residual_table.csv"));
    CHECK(run("transport", cfg) == 0);
    CHECK(fs::exists(dir.path / "a" / "transport_report.json"));

    // Missing portfolio option is a validation error.
    json no_pi = doc;
    no_pi["options"].erase("pi");
    CHECK_THROWS_AS(run("portfolio", parse_config_json(no_pi)), ValidationError);

    // An unreachable tolerance is a contract violation, not a crash.
    json strict = doc;
    strict["options"]["tolerance"] = 1e-300;
    CHECK_THROWS_AS(run("transport", parse_config_json(strict)), ContractError);
}

TEST_CASE("reports are byte-identical across runs") {
    TempDir dir("determinism");
    json doc = minimal_config();
    doc["portfolios"] = {{"ew", {{"type", "constant"},
                                 {"weights", {1.0 / 3, 1.0 / 3, 1.0 / 3}}}},
                         {"mkt", {{"type", "market"}}}};
    doc["n_paths"] = 6;
    doc["seed"] = 2718;
    ExperimentConfig cfg = parse_config_json(doc);

    // Two runs of the same config into the same directory, snapshotting the
    // first run's bytes in between.
    for (const char* sub : {"decompose", "transport", "portfolio"}) {
        cfg.options.out_dir = (dir.path / "run").string();
        fs::remove_all(cfg.options.out_dir);
        REQUIRE(run(sub, cfg) == 0);
        std::map<std::string, std::string> first;
        for (const auto& entry : fs::directory_iterator(cfg.options.out_dir))
            first[entry.path().filename().string()] = read_file(entry.path().string());
        REQUIRE(run(sub, cfg) == 0);
        for (const auto& [name, bytes] : first)
            CHECK(read_file((fs::path(cfg.options.out_dir) / name).string()) == bytes);
        fs::remove_all(cfg.options.out_dir);
    }
}
