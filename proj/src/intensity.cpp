#include "hetnet/intensity.hpp"

#include <algorithm>
#include <cmath>

namespace hetnet {

namespace {

// Contribution of ball d in state s: pi*lambda*p*(min(R_d^2, (x/kappa)^(2/alpha)) - R_{d-1}^2)^+.
double piece_measure(const TierConfig& tier, std::size_t d, LinkState s, double x) {
    const BallSpec& b = tier.balls[d];
    const double p = b.state_prob(s);
    if (p <= 0.0) {
        return 0.0;
    }
    const double r0 = tier.inner_radius(d);
    const double r1 = b.radius;
    const double kappa = b.kappa(s);
    const double alpha = b.alpha(s);
    const double lo = kappa * std::pow(r0, alpha);
    const double hi = kappa * std::pow(r1, alpha);
    double area = 0.0;
    if (x >= hi) {
        area = r1 * r1 - r0 * r0;
    } else if (x > lo) {
        area = std::pow(x / kappa, 2.0 / alpha) - r0 * r0;
    }
    return kPi * tier.density * p * area;
}

double piece_density(const TierConfig& tier, std::size_t d, LinkState s, double x) {
    const BallSpec& b = tier.balls[d];
    const double p = b.state_prob(s);
    if (p <= 0.0) {
        return 0.0;
    }
    const double kappa = b.kappa(s);
    const double alpha = b.alpha(s);
    const double lo = kappa * std::pow(tier.inner_radius(d), alpha);
    const double hi = kappa * std::pow(b.radius, alpha);
    if (!(x > lo && x < hi)) {
        return 0.0;
    }
    return 2.0 * kPi * tier.density * p * std::pow(x / kappa, 2.0 / alpha - 1.0) / (alpha * kappa);
}

}  // namespace

double lambda_split(const TierConfig& tier, LinkState s, double x) {
    double sum = 0.0;
    for (std::size_t d = 0; d < tier.balls.size(); ++d) {
        sum += piece_measure(tier, d, s, x);
    }
    return sum;
}

double lambda_total(const TierConfig& tier, double x) {
    return lambda_split(tier, LinkState::Los, x) + lambda_split(tier, LinkState::Nlos, x);
}

double lambda_density(const TierConfig& tier, LinkState s, double x) {
    double sum = 0.0;
    for (std::size_t d = 0; d < tier.balls.size(); ++d) {
        sum += piece_density(tier, d, s, x);
    }
    return sum;
}

std::vector<double> breakpoints(const TierConfig& tier) {
    std::vector<double> out;
    for (std::size_t d = 0; d < tier.balls.size(); ++d) {
        const BallSpec& b = tier.balls[d];
        for (LinkState s : kLinkStates) {
            if (b.state_prob(s) <= 0.0) continue;
            for (double r : {tier.inner_radius(d), b.radius}) {
                const double v = b.kappa(s) * std::pow(r, b.alpha(s));
                if (v > 0.0) out.push_back(v);
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); }),
              out.end());
    return out;
}

double support_upper(const TierConfig& tier, LinkState s) {
    double sup = 0.0;
    for (const BallSpec& b : tier.balls) {
        if (b.state_prob(s) > 0.0) {
            sup = std::max(sup, b.kappa(s) * std::pow(b.radius, b.alpha(s)));
        }
    }
    return sup;
}

double total_mass(const TierConfig& tier) {
    const double r = tier.outage_radius();
    return kPi * tier.density * r * r;
}

IntensityMeasure::IntensityMeasure(const TierConfig& tier)
    : tier_(&tier), breakpoints_(hetnet::breakpoints(tier)), total_mass_(hetnet::total_mass(tier)) {}

}  // namespace hetnet
