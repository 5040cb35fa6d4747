#include "hetnet/association.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hetnet/intensity.hpp"

namespace hetnet {

double ServingPiece::path_loss(double r) const { return kappa * std::pow(r, alpha); }

double association_ratio(const NetworkConfig& cfg, std::size_t j, std::size_t k) {
    return cfg.tiers[j].biased_power() / cfg.tiers[k].biased_power();
}

double association_exponent(const NetworkConfig& cfg, std::size_t k, double l) {
    double sum = 0.0;
    for (std::size_t j = 0; j < cfg.num_tiers(); ++j) {
        sum += lambda_total(cfg.tiers[j], association_ratio(cfg, j, k) * l);
    }
    return sum;
}

std::vector<ServingPiece> serving_pieces(const NetworkConfig& cfg, std::size_t k, LinkState s) {
    const TierConfig& tier = cfg.tiers[k];
    std::vector<ServingPiece> out;
    for (std::size_t d = 0; d < tier.balls.size(); ++d) {
        const BallSpec& b = tier.balls[d];
        const double p = b.state_prob(s);
        if (p <= 0.0) continue;
        ServingPiece piece;
        piece.ball = d;
        piece.r_inner = tier.inner_radius(d);
        piece.r_outer = b.radius;
        piece.kappa = b.kappa(s);
        piece.alpha = b.alpha(s);
        piece.weight = 2.0 * kPi * tier.density * p;
        for (std::size_t j = 0; j < cfg.num_tiers(); ++j) {
            const double ratio = association_ratio(cfg, j, k);
            for (double bp : breakpoints(cfg.tiers[j])) {
                const double r = std::pow(bp / ratio / piece.kappa, 1.0 / piece.alpha);
                if (r > piece.r_inner && r < piece.r_outer) piece.r_breaks.push_back(r);
            }
        }
        std::sort(piece.r_breaks.begin(), piece.r_breaks.end());
        out.push_back(std::move(piece));
    }
    return out;
}

QuadratureResult association_integral(const NetworkConfig& cfg, std::size_t k, LinkState s, const Tolerance& tol) {
    QuadratureResult total;
    for (const ServingPiece& piece : serving_pieces(cfg, k, s)) {
        PiecewiseIntegrand f{
            [&](double r) { return piece.weight * r * std::exp(-association_exponent(cfg, k, piece.path_loss(r))); },
            piece.r_breaks, piece.r_inner, piece.r_outer};
        total += integrate(f, tol);
    }
    return total;
}

double association_prob(const NetworkConfig& cfg, std::size_t k, LinkState s, const Tolerance& tol) {
    return association_integral(cfg, k, s, tol).value;
}

AssociationTable association_table(const NetworkConfig& cfg, const Tolerance& tol) {
    AssociationTable table;
    table.prob.resize(cfg.num_tiers());
    double mass = 0.0;
    for (std::size_t k = 0; k < cfg.num_tiers(); ++k) {
        for (LinkState s : kLinkStates) {
            const QuadratureResult q = association_integral(cfg, k, s, tol);
            table.prob[k][state_index(s)] = q.value;
            table.error += q.error;
            table.converged = table.converged && q.converged;
        }
        mass += total_mass(cfg.tiers[k]);
    }
    table.outage_prob = std::exp(-mass);
    return table;
}

std::pair<double, double> association_closed_form_2tier(const NetworkConfig& cfg) {
    if (cfg.num_tiers() != 2) {
        throw std::invalid_argument("association_closed_form_2tier: exactly two tiers are required");
    }
    for (const TierConfig& t : cfg.tiers) {
        if (t.balls.size() != 1 || t.balls[0].los_prob != 1.0 || t.balls[0].alpha_los != 2.0) {
            throw std::invalid_argument(
                "association_closed_form_2tier: each tier needs one all-LOS ball with alpha_los = 2");
        }
    }
    // A common 1 m intercept cancels; unequal intercepts fold into the per-tier weights.
    std::array<double, 2> w{};
    std::array<double, 2> lam{};
    std::array<double, 2> rad{};
    for (std::size_t k = 0; k < 2; ++k) {
        const TierConfig& t = cfg.tiers[k];
        w[k] = t.biased_power() / t.balls[0].kappa_los;
        lam[k] = t.density;
        rad[k] = t.balls[0].radius;
    }
    const double sum = lam[0] * w[0] + lam[1] * w[1];
    const double all_outage = std::exp(-kPi * (lam[0] * rad[0] * rad[0] + lam[1] * rad[1] * rad[1]));
    auto one = [&](std::size_t k, std::size_t o) {
        const double share = lam[k] * w[k] / sum;
        if (w[k] / w[o] * rad[o] * rad[o] > rad[k] * rad[k]) {
            return share * (1.0 - std::exp(-kPi * rad[k] * rad[k] / w[k] * sum));
        }
        const double e = std::exp(-kPi * rad[o] * rad[o] / w[o] * sum);
        return share * (1.0 - e) + e - all_outage;
    };
    return {one(0, 1), one(1, 0)};
}

double association_approx(const NetworkConfig& cfg, std::size_t k) {
    double sum = 0.0;
    for (const TierConfig& t : cfg.tiers) sum += t.density * t.biased_power();
    return cfg.tiers[k].density * cfg.tiers[k].biased_power() / sum;
}

double mean_load(const NetworkConfig& cfg, std::size_t k, double tier_association) {
    return 1.0 + 1.28 * cfg.ue_density * tier_association / cfg.tiers[k].density;
}

std::vector<double> mean_loads(const NetworkConfig& cfg, const AssociationTable& table) {
    std::vector<double> out;
    for (std::size_t k = 0; k < cfg.num_tiers(); ++k) out.push_back(mean_load(cfg, k, table.tier(k)));
    return out;
}

}  // namespace hetnet
