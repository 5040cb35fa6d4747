#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "hetnet/core_model.hpp"

namespace hetnet {

struct SimConfig {
    std::size_t drops = 100000;
    double window_radius = 0.0;  // 0 selects the largest outage radius
    std::uint64_t seed = 1;
    unsigned parallel_chunks = 1;
    bool interference = true;
    std::optional<double> beam_error_sigma;  // radians, misalignment at both link ends
};

struct DropResult {
    int tier = -1;  // -1 when no tier has a non-outage BS
    LinkState state = LinkState::Outage;
    double path_loss = 0.0;
    double serving_gain = 0.0;
    double sinr = 0.0;
    double snr = 0.0;
    double rate = 0.0;  // bits/s
    std::vector<double> tier_min_loss;  // per tier, +inf when the tier has no visible BS

    bool outage() const { return tier < 0; }
};

/// Generator for one drop: the stream depends only on (seed, drop, stream), never on chunking.
std::mt19937_64 drop_engine(std::uint64_t seed, std::uint64_t drop, std::uint64_t stream = 0);

/// Realises one network drop around the typical UE at the origin. `loads` are the per-tier
/// mean loads N_k used in the rate.
DropResult realize_drop(const NetworkConfig& cfg, const SimConfig& sim, std::uint64_t drop,
                        std::span<const double> loads);

/// All drops, in drop order, split across `parallel_chunks` threads. Mean loads come from
/// the analytic association table.
std::vector<DropResult> simulate(const NetworkConfig& cfg, const SimConfig& sim);

struct Estimate {
    double value = 0.0;
    double se = 0.0;  // standard error
};

/// Binomial proportion with its standard error.
Estimate proportion(std::size_t hits, std::size_t trials);

struct EmpiricalAssociation {
    std::vector<std::array<Estimate, 2>> prob;  // [k][state_index(s)]
    Estimate outage;
};

EmpiricalAssociation empirical_association(const NetworkConfig& cfg, std::span<const DropResult> drops);
EmpiricalAssociation empirical_association(const NetworkConfig& cfg, const SimConfig& sim);

enum class Metric { Sinr, Snr, Rate };

struct EmpiricalCurve {
    std::vector<double> thresholds;
    std::vector<Estimate> coverage;
};

/// Fraction of drops whose metric exceeds each threshold (outage drops never count).
EmpiricalCurve empirical_coverage(std::span<const DropResult> drops, std::span<const double> thresholds, Metric metric);
EmpiricalCurve empirical_coverage(const NetworkConfig& cfg, const SimConfig& sim, std::span<const double> thresholds,
                                  Metric metric);

/// Coverage with Gaussian misalignment of standard deviation `sigma` at both ends of the serving link.
EmpiricalCurve empirical_beam_error_coverage(const NetworkConfig& cfg, SimConfig sim,
                                             std::span<const double> thresholds, double sigma, Metric metric);

/// CSV trace: drop_id, tier, state, path_loss, sinr_db, snr_db, rate_bps.
void write_trace(std::ostream& out, std::span<const DropResult> drops);

}  // namespace hetnet
