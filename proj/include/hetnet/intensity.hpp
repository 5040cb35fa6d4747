#pragma once

#include <vector>

#include "hetnet/core_model.hpp"

namespace hetnet {

/// Expected number of tier BSs whose path loss to the origin is below x, Lambda_k([0, x)).
double lambda_total(const TierConfig& tier, double x);

/// LOS or NLOS part of lambda_total. The two parts add up to lambda_total for every x.
double lambda_split(const TierConfig& tier, LinkState s, double x);

/// d/dx lambda_split. Zero at the breakpoints themselves and outside the support.
double lambda_density(const TierConfig& tier, LinkState s, double x);

/// Positive path-loss values where the density of either state jumps, sorted and deduplicated.
/// Pieces whose state probability is zero contribute nothing.
std::vector<double> breakpoints(const TierConfig& tier);

/// Supremum of the support of lambda_density(tier, s, .); zero when the state carries no mass.
double support_upper(const TierConfig& tier, LinkState s);

/// Expected BS count within the outage radius, pi * lambda * R_D^2.
double total_mass(const TierConfig& tier);

/// Bundles the evaluators for one tier.
class IntensityMeasure {
public:
    explicit IntensityMeasure(const TierConfig& tier);

    double operator()(double x) const { return lambda_total(*tier_, x); }
    double split(LinkState s, double x) const { return lambda_split(*tier_, s, x); }
    double density(LinkState s, double x) const { return lambda_density(*tier_, s, x); }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    double total_mass() const { return total_mass_; }

private:
    const TierConfig* tier_;
    std::vector<double> breakpoints_;
    double total_mass_;
};

}  // namespace hetnet
