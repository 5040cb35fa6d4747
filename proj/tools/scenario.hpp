#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "hetnet/coverage.hpp"
#include "hetnet/montecarlo.hpp"

namespace hetnet::cli {

enum class Experiment {
    SinrVsSnr,
    GainSweep,
    BallParams,
    BiasSweep,
    BeamError,
    Rate,
    Energy,
    AssocVsBias,
    HybridBias,
    HybridDensity,
};

const char* to_string(Experiment e);
Experiment parse_experiment(const std::string& s);

/// Scenario-file problem (schema, missing grid keys, empty grid). Maps to exit code 1.
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MonteCarloSpec {
    std::size_t drops = 20000;
    std::uint64_t seed = 1;
    unsigned chunks = 8;
};

struct Scenario {
    std::string name;
    std::filesystem::path config_path;  // resolved against the scenario file's directory
    Experiment experiment = Experiment::SinrVsSnr;
    nlohmann::json grid;
    std::optional<MonteCarloSpec> monte_carlo;
    std::filesystem::path output_dir;
    CoverageOptions options;
    unsigned workers = 0;  // 0 selects the hardware concurrency
};

/// Parses and checks a scenario document. Relative paths resolve against `base_dir`.
Scenario parse_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& path);

/// One emitted value with its quadrature error estimate and optional simulation estimate.
struct Row {
    double x = 0.0;
    double analytic = 0.0;
    double error = 0.0;
    bool converged = true;
    std::optional<Estimate> monte_carlo;
};

struct Curve {
    std::string name;  // file stem
    std::vector<Row> rows;
};

struct RunReport {
    std::vector<Curve> curves;
    std::vector<std::filesystem::path> files;
    std::size_t flagged_rows = 0;  // non-converged or non-finite analytic values
    double wall_seconds = 0.0;
};

/// Evaluates every curve of the scenario without touching the filesystem.
std::vector<Curve> evaluate(const Scenario& sc);

/// Evaluates, then writes one CSV per curve plus manifest.json into `sc.output_dir`.
RunReport run(const Scenario& sc);

/// CSV text of one curve; Monte Carlo columns appear when any row carries an estimate.
std::string format_csv(const Curve& curve);

/// 64-bit FNV-1a, used for the manifest's configuration hash.
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace hetnet::cli
