#pragma once

// Shared fixtures and independent oracles for the test binaries.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "hetnet/config_io.hpp"
#include "hetnet/core_model.hpp"

namespace testing {

using namespace hetnet;

inline std::filesystem::path data_path(const std::string& name) {
    return std::filesystem::path(HETNET_DATA_DIR) / name;
}

inline NetworkConfig table1() { return load_network_config(data_path("table1.json")); }
inline NetworkConfig hybrid() { return load_network_config(data_path("hybrid.json")); }

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random mmWave tier: 1..max_balls balls, radii 10..400 m, exponents near the usual values.
/// Probabilities sometimes hit 0 or 1 exactly, which empties one state of a ball.
inline TierConfig random_tier(std::mt19937_64& rng, int max_balls = 3, bool los_2_4 = false) {
    TierConfig t;
    t.density = log_uniform(rng, 1e-5, 1e-3);
    t.tx_power = dbm_to_watts(uniform(rng, 20.0, 53.0));
    t.bias = db_to_linear(uniform(rng, 0.0, 10.0));
    t.noise_power = noise_power_watts(-174.0, 1e9, 10.0);
    t.static_power = uniform(rng, 1.0, 150.0);
    t.amp_slope = uniform(rng, 1.0, 10.0);
    t.serving_gain = 100.0;
    t.bandwidth = 1e9;
    const int balls = std::uniform_int_distribution<int>(1, max_balls)(rng);
    double r = 0.0;
    const double kappa = free_space_intercept(28e9);
    for (int d = 0; d < balls; ++d) {
        BallSpec b;
        r += uniform(rng, 10.0, 150.0);
        b.radius = r;
        const int kind = std::uniform_int_distribution<int>(0, 4)(rng);
        b.los_prob = kind == 0 ? 0.0 : kind == 1 ? 1.0 : uniform(rng, 0.0, 1.0);
        b.alpha_los = los_2_4 ? 2.0 : uniform(rng, 1.8, 2.6);
        b.alpha_nlos = los_2_4 ? 4.0 : uniform(rng, 2.8, 4.5);
        b.kappa_los = kappa;
        b.kappa_nlos = kappa * (los_2_4 ? 1.0 : db_to_linear(uniform(rng, 0.0, 10.0)));
        t.balls.push_back(b);
    }
    return t;
}

inline NetworkConfig random_config(std::mt19937_64& rng, int max_tiers = 3, int max_balls = 3, bool los_2_4 = false) {
    NetworkConfig cfg;
    cfg.ue_density = 1e-3;
    cfg.bandwidth = 1e9;
    cfg.pattern = {10.0, 0.1, 30.0 * kPi / 180.0};
    cfg.fading = {std::uniform_int_distribution<int>(1, 4)(rng), std::uniform_int_distribution<int>(1, 3)(rng)};
    const int k = std::uniform_int_distribution<int>(1, max_tiers)(rng);
    for (int i = 0; i < k; ++i) cfg.tiers.push_back(random_tier(rng, max_balls, los_2_4));
    return validate(cfg);
}

/// Two single-ball all-LOS tiers with alpha = 2 (the closed-form association family).
inline NetworkConfig random_two_tier_los(std::mt19937_64& rng) {
    NetworkConfig cfg;
    cfg.ue_density = 1e-3;
    cfg.bandwidth = 1e9;
    cfg.pattern = {10.0, 0.1, 30.0 * kPi / 180.0};
    cfg.fading = {3, 2};
    for (int i = 0; i < 2; ++i) {
        TierConfig t = random_tier(rng, 1);
        t.balls[0].los_prob = 1.0;
        t.balls[0].alpha_los = 2.0;
        t.balls[0].radius = uniform(rng, 50.0, 300.0);
        t.balls[0].kappa_los = free_space_intercept(28e9) * db_to_linear(uniform(rng, -3.0, 3.0));
        cfg.tiers.push_back(t);
    }
    return validate(cfg);
}

/// Lambda_s([0, x)) computed in the distance domain: a state-s BS of ball d at distance r has
/// loss below x iff r < (x / kappa)^(1/alpha). Written independently of the library.
inline double oracle_lambda(const TierConfig& t, LinkState s, double x) {
    double out = 0.0;
    double inner = 0.0;
    for (const BallSpec& b : t.balls) {
        const double p = s == LinkState::Los ? b.los_prob : 1.0 - b.los_prob;
        const double kap = s == LinkState::Los ? b.kappa_los : b.kappa_nlos;
        const double alpha = s == LinkState::Los ? b.alpha_los : b.alpha_nlos;
        const double reach = std::pow(x / kap, 1.0 / alpha);
        const double hi = std::clamp(reach, inner, b.radius);
        out += kPi * t.density * p * (hi * hi - inner * inner);
        inner = b.radius;
    }
    return out;
}

inline double oracle_lambda(const TierConfig& t, double x) {
    return oracle_lambda(t, LinkState::Los, x) + oracle_lambda(t, LinkState::Nlos, x);
}

/// Composite Simpson rule on [a, b] with n (even) panels.
template <class F>
double simpson(F&& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// Association probability by brute-force Simpson over serving distance inside each ball,
/// using the distance-domain oracle for every competing tier. The integrand has kinks
/// where a competing ball edge crosses the serving loss, so Simpson restarts there.
inline double oracle_association(const NetworkConfig& cfg, std::size_t k, LinkState s, int panels = 4000) {
    const TierConfig& tk = cfg.tiers[k];
    double out = 0.0;
    double inner = 0.0;
    for (const BallSpec& b : tk.balls) {
        const double p = s == LinkState::Los ? b.los_prob : 1.0 - b.los_prob;
        if (p > 0.0) {
            auto f = [&](double r) {
                const double l = b.kappa(s) * std::pow(r, b.alpha(s));
                double expo = 0.0;
                for (const TierConfig& tj : cfg.tiers) expo += oracle_lambda(tj, tj.biased_power() / tk.biased_power() * l);
                return 2.0 * kPi * tk.density * p * r * std::exp(-expo);
            };
            std::vector<double> cuts{inner, b.radius};
            for (const TierConfig& tj : cfg.tiers) {
                const double ratio = tj.biased_power() / tk.biased_power();
                for (const BallSpec& c : tj.balls) {
                    for (LinkState cs : {LinkState::Los, LinkState::Nlos}) {
                        const double edge = c.kappa(cs) * std::pow(c.radius, c.alpha(cs)) / ratio;
                        const double r = std::pow(edge / b.kappa(s), 1.0 / b.alpha(s));
                        if (r > inner && r < b.radius) cuts.push_back(r);
                    }
                }
            }
            std::sort(cuts.begin(), cuts.end());
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i) out += simpson(f, cuts[i], cuts[i + 1], panels);
        }
        inner = b.radius;
    }
    return out;
}

}  // namespace testing
