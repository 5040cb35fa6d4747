#pragma once

#include <span>
#include <vector>

#include "hetnet/coverage.hpp"

namespace hetnet {

struct RatePoint {
    std::vector<double> rate_thresholds;        // bits/s per tier
    std::vector<double> equivalent_thresholds;  // 2^(rho N_k / W_k) - 1
    std::vector<double> loads;                  // N_k
    double total = 0.0;
    CoveragePoint coverage;
};

/// sum_k P_C^k(2^(rho_k N_k / W_k) - 1) * A_k with mean loads N_k.
RatePoint rate_coverage(const NetworkConfig& cfg, std::span<const double> rate_thresholds,
                        const CoverageOptions& opts = {});

/// SINR threshold at which a tier-k UE reaches `rate` bits/s.
double equivalent_threshold(double rate, double load, double bandwidth);

/// tau_k = lambda_k * P_C^k * log2(1 + Gamma_k), in bps/Hz per m^2.
double area_spectral_efficiency(const TierConfig& tier, double tier_conditional_coverage, double threshold);

/// lambda_k (P_0,k + Delta_k P_k), in W per m^2.
double average_power(const TierConfig& tier);

struct EnergyReport {
    std::vector<double> ase;        // tau_k
    std::vector<double> avg_power;  // P_avg,k
    double total_ase = 0.0;
    double total_power = 0.0;
    double efficiency = 0.0;        // bps/Hz/W
    CoveragePoint coverage;
};

/// Energy efficiency sum tau_k / sum P_avg,k with per-tier thresholds. `opts.mode` picks
/// the coverage formula (SINR by default).
EnergyReport energy_efficiency(const NetworkConfig& cfg, std::span<const double> thresholds,
                               const CoverageOptions& opts = {});

/// Assembles the report from already computed per-tier conditional coverages.
EnergyReport energy_report(const NetworkConfig& cfg, std::span<const double> thresholds,
                           std::span<const double> tier_conditional);

}  // namespace hetnet
