#include "hetnet/core_model.hpp"

#include <sstream>

namespace hetnet {

const char* to_string(LinkState s) {
    switch (s) {
    case LinkState::Los:
        return "LOS";
    case LinkState::Nlos:
        return "NLOS";
    case LinkState::Outage:
        return "OUTAGE";
    }
    return "?";
}

const char* to_string(Band b) { return b == Band::MmWave ? "mmwave" : "microwave"; }

bool NetworkConfig::is_hybrid() const {
    return !tiers.empty() && tiers.front().band == Band::Microwave;
}

namespace {

void check_pattern(std::ostringstream& out, const AntennaPattern& p, const char* name) {
    if (!(p.side_lobe > 0.0)) {
        out << name << ".side_lobe must be > 0 (got " << p.side_lobe << ")\n";
    }
    if (!(p.main_lobe >= p.side_lobe)) {
        out << name << ".main_lobe must be >= side_lobe (got " << p.main_lobe << " < " << p.side_lobe << ")\n";
    }
    if (!(p.beam_width > 0.0 && p.beam_width <= 2.0 * kPi * (1.0 + 1e-12))) {
        out << name << ".beam_width must lie in (0, 2pi] (got " << p.beam_width << ")\n";
    }
}

}  // namespace

const NetworkConfig& validate(const NetworkConfig& cfg) {
    std::ostringstream out;
    if (cfg.tiers.empty()) {
        out << "network: at least one tier is required\n";
    }
    if (!(cfg.ue_density > 0.0)) {
        out << "network.ue_density must be > 0 (got " << cfg.ue_density << ")\n";
    }
    if (!(cfg.bandwidth > 0.0)) {
        out << "network.bandwidth must be > 0 (got " << cfg.bandwidth << ")\n";
    }
    if (cfg.fading.n_los < 1) {
        out << "fading.n_los must be >= 1 (got " << cfg.fading.n_los << ")\n";
    }
    if (cfg.fading.n_nlos < 1) {
        out << "fading.n_nlos must be >= 1 (got " << cfg.fading.n_nlos << ")\n";
    }
    check_pattern(out, cfg.pattern, "antenna");
    if (cfg.mu_pattern) {
        check_pattern(out, *cfg.mu_pattern, "mu_antenna");
    }

    for (std::size_t k = 0; k < cfg.tiers.size(); ++k) {
        const TierConfig& t = cfg.tiers[k];
        const std::string where = "tier[" + std::to_string(k + 1) + "].";
        if (!(t.density > 0.0)) out << where << "density must be > 0 (got " << t.density << ")\n";
        if (!(t.tx_power > 0.0)) out << where << "tx_power must be > 0 (got " << t.tx_power << ")\n";
        if (!(t.bias > 0.0)) out << where << "bias must be > 0 (got " << t.bias << ")\n";
        if (!(t.noise_power > 0.0)) out << where << "noise_power must be > 0 (got " << t.noise_power << ")\n";
        if (!(t.static_power >= 0.0)) out << where << "static_power must be >= 0 (got " << t.static_power << ")\n";
        if (!(t.amp_slope >= 1.0)) out << where << "amp_slope must be >= 1 (got " << t.amp_slope << ")\n";
        if (!(t.serving_gain > 0.0)) out << where << "serving_gain must be > 0 (got " << t.serving_gain << ")\n";
        if (!(t.bandwidth > 0.0)) out << where << "bandwidth must be > 0 (got " << t.bandwidth << ")\n";
        if (t.balls.empty()) {
            out << where << "balls must be nonempty\n";
        }
        double prev = 0.0;
        for (std::size_t d = 0; d < t.balls.size(); ++d) {
            const BallSpec& b = t.balls[d];
            const std::string bw = where + "balls[" + std::to_string(d + 1) + "].";
            if (!(b.radius > 0.0)) out << bw << "radius must be > 0 (got " << b.radius << ")\n";
            if (d > 0 && !(b.radius > prev)) {
                out << bw << "radius must be strictly increasing (" << b.radius << " after " << prev << ")\n";
            }
            if (!(b.los_prob >= 0.0 && b.los_prob <= 1.0)) {
                out << bw << "los_prob must lie in [0, 1] (got " << b.los_prob << ")\n";
            }
            if (!(b.alpha_los > 0.0)) out << bw << "alpha_los must be > 0 (got " << b.alpha_los << ")\n";
            if (!(b.alpha_nlos > 0.0)) out << bw << "alpha_nlos must be > 0 (got " << b.alpha_nlos << ")\n";
            if (!(b.kappa_los > 0.0)) out << bw << "kappa_los must be > 0 (got " << b.kappa_los << ")\n";
            if (!(b.kappa_nlos > 0.0)) out << bw << "kappa_nlos must be > 0 (got " << b.kappa_nlos << ")\n";
            prev = b.radius;
        }
        if (k > 0 && t.band == Band::Microwave) {
            out << where << "band: only tier 1 may operate in the microwave band\n";
        }
    }
    if (cfg.is_hybrid() && !cfg.mu_pattern) {
        out << "mu_antenna is required when tier 1 operates in the microwave band\n";
    }

    const std::string report = out.str();
    if (!report.empty()) {
        throw ConfigError(report);
    }
    return cfg;
}

std::array<GainAtom, 3> gain_pmf(const AntennaPattern& p) {
    const double q = std::min(p.beam_width / (2.0 * kPi), 1.0);
    const double r = 1.0 - q;
    return {{{p.main_lobe * p.main_lobe, q * q},
             {p.main_lobe * p.side_lobe, 2.0 * q * r},
             {p.side_lobe * p.side_lobe, r * r}}};
}

std::vector<GainAtom> gain_pmf(const AntennaPattern& tx, const AntennaPattern& rx) {
    const double qt = std::min(tx.beam_width / (2.0 * kPi), 1.0);
    const double qr = std::min(rx.beam_width / (2.0 * kPi), 1.0);
    return {{tx.main_lobe * rx.main_lobe, qt * qr},
            {tx.main_lobe * rx.side_lobe, qt * (1.0 - qr)},
            {tx.side_lobe * rx.main_lobe, (1.0 - qt) * qr},
            {tx.side_lobe * rx.side_lobe, (1.0 - qt) * (1.0 - qr)}};
}

std::vector<GainAtom> interferer_gain_pmf(const NetworkConfig& cfg, std::size_t j) {
    if (cfg.tiers[j].band == Band::Microwave && cfg.mu_pattern) {
        return gain_pmf(*cfg.mu_pattern, cfg.pattern);
    }
    const auto atoms = gain_pmf(cfg.pattern);
    return {atoms.begin(), atoms.end()};
}

std::optional<std::size_t> ball_index(const TierConfig& tier, double r) {
    for (std::size_t d = 0; d < tier.balls.size(); ++d) {
        if (r < tier.balls[d].radius) {
            return d;
        }
    }
    return std::nullopt;
}

std::optional<double> los_probability(const TierConfig& tier, double r) {
    if (auto d = ball_index(tier, r)) {
        return tier.balls[*d].los_prob;
    }
    return std::nullopt;
}

double path_loss(const TierConfig& tier, std::size_t d, LinkState s, double r) {
    if (s == LinkState::Outage) {
        throw std::invalid_argument("path_loss: no path loss is defined in the outage state");
    }
    if (d >= tier.balls.size()) {
        throw std::invalid_argument("path_loss: ball index out of range");
    }
    const BallSpec& b = tier.balls[d];
    return b.kappa(s) * std::pow(r, b.alpha(s));
}

}  // namespace hetnet
