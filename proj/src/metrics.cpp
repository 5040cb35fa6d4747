#include "hetnet/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace hetnet {

double equivalent_threshold(double rate, double load, double bandwidth) {
    return std::exp2(rate * load / bandwidth) - 1.0;
}

RatePoint rate_coverage(const NetworkConfig& cfg, std::span<const double> rate_thresholds,
                        const CoverageOptions& opts) {
    if (rate_thresholds.size() != cfg.num_tiers()) {
        throw std::invalid_argument("rate_coverage: one rate threshold per tier is required");
    }
    for (double r : rate_thresholds) {
        if (!(r >= 0.0)) throw std::invalid_argument("rate_coverage: rate thresholds must be nonnegative");
    }
    RatePoint out;
    out.rate_thresholds.assign(rate_thresholds.begin(), rate_thresholds.end());
    const AssociationTable table = association_table(cfg, opts.outer);
    out.loads = mean_loads(cfg, table);
    for (std::size_t k = 0; k < cfg.num_tiers(); ++k) {
        out.equivalent_thresholds.push_back(
            equivalent_threshold(rate_thresholds[k], out.loads[k], cfg.tiers[k].bandwidth));
    }
    out.coverage = coverage_point(cfg, out.equivalent_thresholds, opts, &table);
    // P_C^k * A_k is the tier's joint coverage.
    for (std::size_t k = 0; k < cfg.num_tiers(); ++k) out.total += out.coverage.tier_joint(k);
    return out;
}

double area_spectral_efficiency(const TierConfig& tier, double tier_conditional_coverage, double threshold) {
    return tier.density * tier_conditional_coverage * std::log2(1.0 + threshold);
}

double average_power(const TierConfig& tier) {
    return tier.density * (tier.static_power + tier.amp_slope * tier.tx_power);
}

EnergyReport energy_report(const NetworkConfig& cfg, std::span<const double> thresholds,
                           std::span<const double> tier_conditional) {
    EnergyReport out;
    for (std::size_t k = 0; k < cfg.num_tiers(); ++k) {
        out.ase.push_back(area_spectral_efficiency(cfg.tiers[k], tier_conditional[k], thresholds[k]));
        out.avg_power.push_back(average_power(cfg.tiers[k]));
        out.total_ase += out.ase.back();
        out.total_power += out.avg_power.back();
    }
    out.efficiency = out.total_ase / out.total_power;
    return out;
}

EnergyReport energy_efficiency(const NetworkConfig& cfg, std::span<const double> thresholds,
                               const CoverageOptions& opts) {
    CoveragePoint cov = coverage_point(cfg, thresholds, opts);
    std::vector<double> cond;
    for (std::size_t k = 0; k < cfg.num_tiers(); ++k) cond.push_back(cov.tier_conditional(k));
    EnergyReport out = energy_report(cfg, thresholds, cond);
    out.coverage = std::move(cov);
    return out;
}

}  // namespace hetnet
