// hetnet: coverage, association and energy-efficiency analysis for multi-tier mmWave networks.
//
//   hetnet run <scenario.json>                       evaluate a scenario, write CSVs + manifest
//   hetnet validate <config.json>                    check a network configuration
//   hetnet mc <config.json> --drops N --seed S       Monte Carlo association and coverage
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hetnet/association.hpp"
#include "hetnet/config_io.hpp"
#include "hetnet/intensity.hpp"
#include "hetnet/montecarlo.hpp"
#include "scenario.hpp"

namespace {

using namespace hetnet;

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kNumericalFailure = 2;

int cmd_validate(const std::string& path) {
    const NetworkConfig cfg = load_network_config(path);
    fmt::print("{}: valid, {} tier(s){}\n", path, cfg.num_tiers(), cfg.is_hybrid() ? ", hybrid" : "");
    for (std::size_t k = 0; k < cfg.num_tiers(); ++k) {
        const TierConfig& t = cfg.tiers[k];
        fmt::print("  tier {}: {} BS/km^2, {:.1f} dBm, bias {:.1f} dB, {} ball(s), outage beyond {} m, mass {:.4g}\n",
                   k + 1, t.density * 1e6, watts_to_dbm(t.tx_power), linear_to_db(t.bias), t.balls.size(),
                   t.outage_radius(), total_mass(t));
    }
    return kOk;
}

int cmd_run(const std::string& path, const std::optional<std::string>& mode, const std::optional<std::string>& zone,
            unsigned workers) {
    cli::Scenario sc = cli::load_scenario(path);
    if (mode) sc.options.mode = parse_coverage_mode(*mode);
    if (zone) sc.options.exclusion = parse_exclusion_zone(*zone);
    if (workers > 0) sc.workers = workers;
    const cli::RunReport report = cli::run(sc);
    for (const auto& f : report.files) fmt::print("wrote {}\n", f.string());
    fmt::print("{} curve(s) in {:.2f} s\n", report.curves.size(), report.wall_seconds);
    if (report.flagged_rows > 0) {
        fmt::print(stderr, "{} point(s) did not converge; see the converged column\n", report.flagged_rows);
        return kNumericalFailure;
    }
    return kOk;
}

int cmd_mc(const std::string& path, std::size_t drops, std::uint64_t seed, unsigned chunks,
           const std::vector<double>& thresholds_db, const std::optional<std::string>& mode,
           const std::optional<std::string>& trace) {
    const NetworkConfig cfg = load_network_config(path);
    SimConfig sim;
    sim.drops = drops;
    sim.seed = seed;
    sim.parallel_chunks = chunks;
    const std::vector<DropResult> results = simulate(cfg, sim);

    const AssociationTable analytic = association_table(cfg);
    const EmpiricalAssociation emp = empirical_association(cfg, results);
    fmt::print("tier,state,monte_carlo,mc_stderr,analytic\n");
    for (std::size_t k = 0; k < cfg.num_tiers(); ++k) {
        for (LinkState s : kLinkStates) {
            const Estimate& e = emp.prob[k][state_index(s)];
            fmt::print("{},{},{:.6f},{:.6f},{:.6f}\n", k + 1, to_string(s), e.value, e.se, analytic.at(k, s));
        }
    }
    fmt::print("outage,,{:.6f},{:.6f},{:.6f}\n\n", emp.outage.value, emp.outage.se, analytic.outage_prob);

    const Metric metric = mode && parse_coverage_mode(*mode) != CoverageMode::SinrFull ? Metric::Snr : Metric::Sinr;
    std::vector<double> lin;
    for (double d : thresholds_db) lin.push_back(db_to_linear(d));
    const EmpiricalCurve curve = empirical_coverage(results, lin, metric);
    fmt::print("threshold_db,{}_coverage,mc_stderr\n", metric == Metric::Sinr ? "sinr" : "snr");
    for (std::size_t i = 0; i < lin.size(); ++i) {
        fmt::print("{:g},{:.6f},{:.6f}\n", thresholds_db[i], curve.coverage[i].value, curve.coverage[i].se);
    }
    if (trace) {
        std::ofstream out(*trace);
        write_trace(out, results);
        if (!out) throw ConfigError("cannot write trace " + *trace);
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coverage, association and energy efficiency of multi-tier mmWave networks"};
    app.require_subcommand(1);

    std::optional<std::string> mode;
    std::optional<std::string> zone;
    app.add_option("--mode", mode, "Coverage formula")->check(CLI::IsMember({"sinr", "snr", "closed24"}));
    app.add_option("--exclusion-zone", zone, "Interferer exclusion rule")
        ->check(CLI::IsMember({"with_gains", "without_gains"}));

    std::string scenario_path;
    unsigned workers = 0;
    auto* run = app.add_subcommand("run", "Evaluate a scenario file");
    run->add_option("scenario", scenario_path, "Scenario JSON")->required();
    run->add_option("--workers", workers, "Worker threads (0 = all cores)");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Validate a network configuration");
    validate->add_option("config", validate_path, "Network configuration JSON")->required();

    std::string mc_path;
    std::size_t drops = 100000;
    std::uint64_t seed = 1;
    unsigned chunks = 8;
    std::vector<double> thresholds_db{-20, -10, 0, 10, 20, 30};
    std::optional<std::string> trace;
    auto* mc = app.add_subcommand("mc", "Monte Carlo association table and coverage");
    mc->add_option("config", mc_path, "Network configuration JSON")->required();
    mc->add_option("--drops", drops, "Number of drops")->check(CLI::PositiveNumber);
    mc->add_option("--seed", seed, "Random seed");
    mc->add_option("--chunks", chunks, "Parallel chunks")->check(CLI::PositiveNumber);
    mc->add_option("--threshold-db", thresholds_db, "Coverage thresholds in dB");
    mc->add_option("--trace", trace, "Write a per-drop CSV trace");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfigError;
    }

    try {
        if (*run) return cmd_run(scenario_path, mode, zone, workers);
        if (*validate) return cmd_validate(validate_path);
        if (*mc) return cmd_mc(mc_path, drops, seed, chunks, thresholds_db, mode, trace);
    } catch (const ConfigError& e) {
        fmt::print(stderr, "configuration error: {}\n", e.what());
        return kConfigError;
    } catch (const cli::ScenarioError& e) {
        fmt::print(stderr, "scenario error: {}\n", e.what());
        return kConfigError;
    } catch (const nlohmann::json::exception& e) {
        fmt::print(stderr, "configuration error: {}\n", e.what());
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        fmt::print(stderr, "configuration error: {}\n", e.what());
        return kConfigError;
    } catch (const std::exception& e) {
        fmt::print(stderr, "numerical failure: {}\n", e.what());
        return kNumericalFailure;
    }
    return kOk;
}
