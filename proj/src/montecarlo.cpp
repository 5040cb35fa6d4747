#include "hetnet/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "hetnet/association.hpp"

namespace hetnet {

namespace {

struct VisibleBs {
    std::size_t tier;
    LinkState state;
    double loss;
};

double unit_gamma(std::mt19937_64& rng, int order) {
    // Nakagami power gain, Gamma(shape N, scale 1/N): unit mean.
    std::gamma_distribution<double> dist(order, 1.0 / order);
    return dist(rng);
}

double draw_gain(std::mt19937_64& rng, const std::vector<GainAtom>& atoms) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double acc = 0.0;
    for (const GainAtom& a : atoms) {
        acc += a.prob;
        if (u < acc) return a.gain;
    }
    return atoms.back().gain;
}

double window_of(const NetworkConfig& cfg, const SimConfig& sim) {
    double outer = 0.0;
    for (const TierConfig& t : cfg.tiers) outer = std::max(outer, t.outage_radius());
    if (sim.window_radius == 0.0) return outer;
    if (sim.window_radius < outer) {
        throw std::invalid_argument("simulation window must cover the largest outage radius");
    }
    return sim.window_radius;
}

}  // namespace

std::mt19937_64 drop_engine(std::uint64_t seed, std::uint64_t drop, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(drop), static_cast<std::uint32_t>(drop >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

DropResult realize_drop(const NetworkConfig& cfg, const SimConfig& sim, std::uint64_t drop,
                        std::span<const double> loads) {
    const double window = window_of(cfg, sim);
    std::mt19937_64 rng = drop_engine(sim.seed, drop);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    DropResult out;
    out.tier_min_loss.assign(cfg.num_tiers(), std::numeric_limits<double>::infinity());

    std::vector<VisibleBs> visible;
    for (std::size_t k = 0; k < cfg.num_tiers(); ++k) {
        const TierConfig& tier = cfg.tiers[k];
        std::poisson_distribution<long> count(tier.density * kPi * window * window);
        const long n = count(rng);
        for (long i = 0; i < n; ++i) {
            const double r = window * std::sqrt(unit(rng));
            const double mark = unit(rng);
            const auto d = ball_index(tier, r);
            if (!d) continue;
            const LinkState s = mark < tier.balls[*d].los_prob ? LinkState::Los : LinkState::Nlos;
            const double loss = path_loss(tier, *d, s, r);
            visible.push_back({k, s, loss});
            out.tier_min_loss[k] = std::min(out.tier_min_loss[k], loss);
        }
    }

    // Serving BS: maximum biased received power P G B / L over all visible BSs.
    std::size_t serving = visible.size();
    double best = 0.0;
    for (std::size_t i = 0; i < visible.size(); ++i) {
        const double metric = cfg.tiers[visible[i].tier].biased_power() / visible[i].loss;
        if (metric > best) {
            best = metric;
            serving = i;
        }
    }
    if (serving == visible.size()) {
        return out;
    }

    const VisibleBs& bs = visible[serving];
    const TierConfig& tier = cfg.tiers[bs.tier];
    out.tier = static_cast<int>(bs.tier);
    out.state = bs.state;
    out.path_loss = bs.loss;
    out.serving_gain = tier.serving_gain;
    if (sim.beam_error_sigma && tier.band == Band::MmWave) {
        std::mt19937_64 steer = drop_engine(sim.seed, drop, 1);
        std::normal_distribution<double> err(0.0, 1.0);
        const double half = 0.5 * cfg.pattern.beam_width;
        const double e_bs = *sim.beam_error_sigma * err(steer);
        const double e_ue = *sim.beam_error_sigma * err(steer);
        const double g_bs = std::abs(e_bs) <= half ? cfg.pattern.main_lobe : cfg.pattern.side_lobe;
        const double g_ue = std::abs(e_ue) <= half ? cfg.pattern.main_lobe : cfg.pattern.side_lobe;
        out.serving_gain = g_bs * g_ue;
    }

    const double signal = tier.tx_power * out.serving_gain * unit_gamma(rng, cfg.fading.order(bs.state)) / bs.loss;
    double interference = 0.0;
    if (sim.interference) {
        std::vector<std::vector<GainAtom>> pmfs;
        for (std::size_t j = 0; j < cfg.num_tiers(); ++j) pmfs.push_back(interferer_gain_pmf(cfg, j));
        for (std::size_t i = 0; i < visible.size(); ++i) {
            if (i == serving || !cfg.shares_band(bs.tier, visible[i].tier)) continue;
            const VisibleBs& other = visible[i];
            const double g = draw_gain(rng, pmfs[other.tier]);
            const double h = unit_gamma(rng, cfg.fading.order(other.state));
            interference += cfg.tiers[other.tier].tx_power * g * h / other.loss;
        }
    }
    out.snr = signal / tier.noise_power;
    out.sinr = signal / (tier.noise_power + interference);
    out.rate = tier.bandwidth / loads[bs.tier] * std::log2(1.0 + out.sinr);
    return out;
}

std::vector<DropResult> simulate(const NetworkConfig& cfg, const SimConfig& sim) {
    validate(cfg);
    if (sim.drops == 0) {
        throw std::invalid_argument("simulate: at least one drop is required");
    }
    window_of(cfg, sim);
    const std::vector<double> loads = mean_loads(cfg, association_table(cfg));

    std::vector<DropResult> out(sim.drops);
    const std::size_t chunks = std::clamp<std::size_t>(sim.parallel_chunks, 1, sim.drops);
    auto work = [&](std::size_t c) {
        const std::size_t begin = sim.drops * c / chunks;
        const std::size_t end = sim.drops * (c + 1) / chunks;
        for (std::size_t i = begin; i < end; ++i) out[i] = realize_drop(cfg, sim, i, loads);
    };
    if (chunks == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t c = 0; c < chunks; ++c) pool.emplace_back(work, c);
    }
    return out;
}

Estimate proportion(std::size_t hits, std::size_t trials) {
    const double p = static_cast<double>(hits) / static_cast<double>(trials);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials))};
}

EmpiricalAssociation empirical_association(const NetworkConfig& cfg, std::span<const DropResult> drops) {
    std::vector<std::array<std::size_t, 2>> hits(cfg.num_tiers(), {0, 0});
    std::size_t outage = 0;
    for (const DropResult& d : drops) {
        if (d.outage()) {
            ++outage;
        } else {
            ++hits[d.tier][state_index(d.state)];
        }
    }
    EmpiricalAssociation out;
    for (const auto& h : hits) out.prob.push_back({proportion(h[0], drops.size()), proportion(h[1], drops.size())});
    out.outage = proportion(outage, drops.size());
    return out;
}

EmpiricalAssociation empirical_association(const NetworkConfig& cfg, const SimConfig& sim) {
    const auto drops = simulate(cfg, sim);
    return empirical_association(cfg, drops);
}

EmpiricalCurve empirical_coverage(std::span<const DropResult> drops, std::span<const double> thresholds,
                                  Metric metric) {
    EmpiricalCurve out;
    out.thresholds.assign(thresholds.begin(), thresholds.end());
    for (double t : thresholds) {
        std::size_t hits = 0;
        for (const DropResult& d : drops) {
            if (d.outage()) continue;
            const double v = metric == Metric::Sinr ? d.sinr : metric == Metric::Snr ? d.snr : d.rate;
            if (v > t) ++hits;
        }
        out.coverage.push_back(proportion(hits, drops.size()));
    }
    return out;
}

EmpiricalCurve empirical_coverage(const NetworkConfig& cfg, const SimConfig& sim, std::span<const double> thresholds,
                                  Metric metric) {
    const auto drops = simulate(cfg, sim);
    return empirical_coverage(drops, thresholds, metric);
}

EmpiricalCurve empirical_beam_error_coverage(const NetworkConfig& cfg, SimConfig sim,
                                             std::span<const double> thresholds, double sigma, Metric metric) {
    if (!(sigma >= 0.0)) {
        throw std::invalid_argument("beam error standard deviation must be nonnegative");
    }
    sim.beam_error_sigma = sigma;
    return empirical_coverage(cfg, sim, thresholds, metric);
}

void write_trace(std::ostream& out, std::span<const DropResult> drops) {
    out << "drop_id,tier,state,path_loss,sinr_db,snr_db,rate_bps\n";
    for (std::size_t i = 0; i < drops.size(); ++i) {
        const DropResult& d = drops[i];
        out << i << ',' << (d.outage() ? 0 : d.tier + 1) << ',' << to_string(d.state) << ',';
        if (d.outage()) {
            out << ",,,\n";
        } else {
            out << d.path_loss << ',' << linear_to_db(d.sinr) << ',' << linear_to_db(d.snr) << ',' << d.rate << '\n';
        }
    }
}

}  // namespace hetnet
