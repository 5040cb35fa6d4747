#include "doctest.h"

#include <stdexcept>

#include "hetnet/coverage.hpp"
#include "support.hpp"

using namespace hetnet;

namespace {

std::vector<double> same(const NetworkConfig& cfg, double t) { return std::vector<double>(cfg.num_tiers(), t); }

// One tier, one all-LOS ball, alpha = 2, Rayleigh fading: the interference Laplace
// transform has a logarithmic closed form, so only the serving distance needs quadrature.
NetworkConfig rayleigh_single_tier() {
    NetworkConfig cfg = testing::table1();
    cfg.tiers = {cfg.tiers[1]};
    cfg.tiers[0].balls = {cfg.tiers[0].balls[0]};
    cfg.tiers[0].balls[0].radius = 80.0;
    cfg.tiers[0].balls[0].los_prob = 1.0;
    cfg.fading = {1, 1};
    return validate(cfg);
}

double rayleigh_oracle(const NetworkConfig& cfg, double gamma, bool interference) {
    const TierConfig& t = cfg.tiers[0];
    const BallSpec& b = t.balls[0];
    const double big_r2 = b.radius * b.radius;
    const double lam = kPi * t.density;
    auto f = [&](double r) {
        if (r == 0.0) return 0.0;
        const double l = b.kappa_los * r * r;
        double expo = lam * r * r + gamma * t.noise_power * l / (t.tx_power * t.serving_gain);
        if (interference) {
            for (const GainAtom& g : gain_pmf(cfg.pattern)) {
                const double x = gamma * g.gain * r * r / t.serving_gain;
                expo += g.prob * lam * x * std::log((big_r2 + x) / (r * r + x));
            }
        }
        return 2.0 * lam * r * std::exp(-expo);
    };
    return testing::simpson(f, 0.0, b.radius, 20000);
}

}  // namespace

TEST_CASE("Alzer helpers") {
    CHECK(psi(3, 2.0) == doctest::Approx(26.0 / 27.0).epsilon(1e-15));
    CHECK(psi(1, 0.0) == 0.0);
    CHECK(psi(2, 1e-12) == doctest::Approx(2e-12).epsilon(1e-6));
    CHECK(eta(1) == doctest::Approx(1.0));
    CHECK(eta(2) == doctest::Approx(2.0 / std::sqrt(2.0)));
    CHECK(eta(3) == doctest::Approx(3.0 / std::cbrt(6.0)).epsilon(1e-14));
    CHECK(binomial(10, 3) == 120.0);
    CHECK(binomial(4, 5) == 0.0);
    // The alternating binomial sum that makes zero-threshold coverage equal association.
    for (int n = 1; n <= 10; ++n) {
        double s = 0.0;
        for (int i = 1; i <= n; ++i) s += (i % 2 ? 1.0 : -1.0) * binomial(n, i);
        CHECK(s == 1.0);
    }
}

TEST_CASE("zero threshold gives the association probabilities") {
    const NetworkConfig cfg = testing::table1();
    const AssociationTable tab = association_table(cfg);
    for (CoverageMode m : {CoverageMode::SinrFull, CoverageMode::SnrOnly, CoverageMode::ClosedForm24}) {
        CoverageOptions o;
        o.mode = m;
        const CoveragePoint p = coverage_point(cfg, same(cfg, 0.0), o);
        CHECK(p.total == doctest::Approx(1.0 - tab.outage_prob).epsilon(1e-7));
        for (std::size_t k = 0; k < 3; ++k) CHECK(p.tier_conditional(k) == doctest::Approx(1.0).epsilon(1e-7));
    }
}

TEST_CASE("Rayleigh single tier matches the logarithmic closed form") {
    const NetworkConfig cfg = rayleigh_single_tier();
    for (double db : {-10.0, 0.0, 5.0, 10.0, 20.0}) {
        const double g = db_to_linear(db);
        CHECK(std::abs(sinr_coverage(cfg, same(cfg, g)).total - rayleigh_oracle(cfg, g, true)) < 1e-7);
        CHECK(std::abs(snr_coverage(cfg, same(cfg, g)).total - rayleigh_oracle(cfg, g, false)) < 1e-7);
        CHECK(std::abs(snr_coverage_closed_form(cfg, same(cfg, g)).total - rayleigh_oracle(cfg, g, false)) < 1e-7);
    }
}

TEST_CASE("interference term equals the PPP Laplace functional") {
    // exp(-term) = E[prod_i (1 + s G_i / (N t_i))^-N] = E[exp(-s sum_i G_i h_i / t_i)],
    // h_i ~ Gamma(N, 1/N), over interferers beyond the exclusion radius.
    const NetworkConfig cfg = testing::table1();
    const std::size_t k = 1;
    const std::size_t j = 2;
    const double l = path_loss(cfg.tiers[k], 0, LinkState::Los, 25.0);
    const double gamma = db_to_linear(5.0);
    const int n = 2;
    const CoverageOptions opts;
    const TierConfig& tj = cfg.tiers[j];
    const double s = n * eta(cfg.fading.n_los) * gamma * tj.tx_power * l / (cfg.tiers[k].tx_power * cfg.tiers[k].serving_gain);
    const double t_min = tj.biased_power() / cfg.tiers[k].biased_power() * l;
    const auto gains = gain_pmf(cfg.pattern);

    for (LinkState si : kLinkStates) {
        const int order = cfg.fading.order(si);
        const double term = interference_term(cfg, j, si, k, LinkState::Los, n, gamma, l, cfg.tiers[k].serving_gain, opts).value;

        std::mt19937_64 rng(31 + state_index(si));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::gamma_distribution<double> fade(order, 1.0 / order);
        std::discrete_distribution<int> pick({gains[0].prob, gains[1].prob, gains[2].prob});
        const double rmax = tj.outage_radius();
        std::poisson_distribution<int> count(tj.density * kPi * rmax * rmax);
        const int drops = 200000;
        double sum = 0.0;
        double sq = 0.0;
        for (int d = 0; d < drops; ++d) {
            const int m = count(rng);
            double acc = 0.0;
            for (int i = 0; i < m; ++i) {
                const double r = rmax * std::sqrt(u(rng));
                const auto ball = ball_index(tj, r);
                const bool los = u(rng) < tj.balls[*ball].los_prob;
                if (los != (si == LinkState::Los)) continue;
                const double t = path_loss(tj, *ball, si, r);
                if (t <= t_min) continue;
                acc += gains[pick(rng)].gain * fade(rng) / t;
            }
            const double y = std::exp(-s * acc);
            sum += y;
            sq += y * y;
        }
        const double mean = sum / drops;
        const double se = std::sqrt((sq / drops - mean * mean) / drops);
        CHECK(std::abs(std::exp(-term) - mean) < 4.0 * se + 1e-12);
    }
}

TEST_CASE("noise-limited coverage dominates SINR coverage") {
    const NetworkConfig cfg = testing::table1();
    double prev_sinr = 1.0;
    for (double db = -20.0; db <= 30.0; db += 5.0) {
        const auto g = same(cfg, db_to_linear(db));
        const double sinr = sinr_coverage(cfg, g).total;
        const double snr = snr_coverage(cfg, g).total;
        CHECK(snr >= sinr - 1e-9);
        CHECK(sinr <= prev_sinr + 1e-9);
        prev_sinr = sinr;
    }
}

TEST_CASE("closed form agrees with quadrature") {
    const NetworkConfig t1 = testing::table1();
    for (double db = -20.0; db <= 30.0; db += 2.5) {
        const auto g = same(t1, db_to_linear(db));
        CHECK(std::abs(snr_coverage_closed_form(t1, g).total - snr_coverage(t1, g).total) < 1e-6);
    }
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        const NetworkConfig cfg = testing::random_config(rng, 3, 3, true);
        const auto g = same(cfg, db_to_linear(testing::uniform(rng, -20.0, 30.0)));
        const CoveragePoint a = snr_coverage_closed_form(cfg, g);
        const CoveragePoint b = snr_coverage(cfg, g);
        for (std::size_t k = 0; k < cfg.num_tiers(); ++k) {
            for (std::size_t s = 0; s < 2; ++s) CHECK(std::abs(a.parts[k][s].joint - b.parts[k][s].joint) < 1e-6);
        }
    }
    NetworkConfig bent = t1;
    bent.tiers[0].balls[0].alpha_los = 2.1;
    CHECK_THROWS_AS(snr_coverage_closed_form(bent, same(bent, 1.0)), std::invalid_argument);
}

TEST_CASE("exclusion zones coincide when every tier has the same serving gain") {
    const NetworkConfig cfg = testing::table1();
    CoverageOptions with;
    CoverageOptions without;
    without.exclusion = ExclusionZone::WithoutGains;
    const auto g = same(cfg, db_to_linear(5.0));
    CHECK(coverage_point(cfg, g, with).total == doctest::Approx(coverage_point(cfg, g, without).total).epsilon(1e-12));
    CHECK(parse_exclusion_zone("without_gains") == ExclusionZone::WithoutGains);
    CHECK_THROWS_AS(parse_exclusion_zone("none"), std::invalid_argument);
    CHECK(parse_coverage_mode("closed24") == CoverageMode::ClosedForm24);
    CHECK_THROWS_AS(parse_coverage_mode("exact"), std::invalid_argument);
}

TEST_CASE("beam error mixture") {
    const NetworkConfig cfg = testing::table1();
    const auto g = same(cfg, db_to_linear(5.0));
    const double base = sinr_coverage(cfg, g).total;
    CHECK(coverage_with_beam_error(cfg, g, 0.0).total == doctest::Approx(base).epsilon(1e-12));
    CHECK(alignment_probability(kPi / 6.0, 0.0) == 1.0);
    CHECK(alignment_probability(kPi / 6.0, 0.1) == doctest::Approx(std::erf(kPi / 6.0 / (2.0 * std::sqrt(2.0) * 0.1))));

    // sigma -> infinity: both ends always miss, so the serving gain is side^2.
    CoverageOptions side;
    side.serving_gain = cfg.pattern.side_lobe * cfg.pattern.side_lobe;
    CHECK(coverage_with_beam_error(cfg, g, 1e9).total == doctest::Approx(sinr_coverage(cfg, g, side).total).epsilon(1e-6));

    const double sigma = 10.0 * kPi / 180.0;
    const double f = alignment_probability(cfg.pattern.beam_width, sigma);
    double expect = 0.0;
    const double m = cfg.pattern.main_lobe;
    const double s = cfg.pattern.side_lobe;
    for (auto [gain, w] : {std::pair{m * m, f * f}, {m * s, 2 * f * (1 - f)}, {s * s, (1 - f) * (1 - f)}}) {
        CoverageOptions o;
        o.serving_gain = gain;
        expect += w * sinr_coverage(cfg, g, o).total;
    }
    const double mixed = coverage_with_beam_error(cfg, g, sigma).total;
    CHECK(mixed == doctest::Approx(expect).epsilon(1e-12));
    CHECK(mixed < base);
    CHECK_THROWS_AS(coverage_with_beam_error(testing::hybrid(), same(testing::hybrid(), 1.0), sigma), std::invalid_argument);
    CHECK_THROWS_AS(coverage_with_beam_error(cfg, g, -1.0), std::invalid_argument);
}

TEST_CASE("hybrid coverage keeps interference inside each band") {
    const NetworkConfig cfg = testing::hybrid();
    const auto g = same(cfg, db_to_linear(5.0));
    const CoveragePoint base = hybrid_coverage(cfg, g);
    CHECK(base.converged);

    // A different microwave pattern changes macro-tier interference only; the serving
    // gain is left untouched so association stays fixed.
    NetworkConfig wide = cfg;
    wide.mu_pattern->side_lobe = 1.0;
    const CoveragePoint alt = hybrid_coverage(wide, g);
    CHECK(alt.tier_joint(0) < base.tier_joint(0));
    for (std::size_t k = 1; k < 3; ++k) CHECK(alt.tier_joint(k) == doctest::Approx(base.tier_joint(k)).epsilon(1e-12));

    // Removing all mmWave interference leaves the macro tier unchanged.
    CoverageOptions snr;
    snr.mode = CoverageMode::SnrOnly;
    const CoveragePoint quiet = coverage_point(cfg, g, snr);
    CHECK(quiet.tier_joint(0) >= base.tier_joint(0));

    CHECK_THROWS_AS(hybrid_coverage(testing::table1(), same(testing::table1(), 1.0)), std::invalid_argument);
    NetworkConfig nlos = cfg;
    nlos.tiers[0].balls[0].los_prob = 0.5;
    CHECK_THROWS_AS(hybrid_coverage(nlos, g), std::invalid_argument);
}

TEST_CASE("threshold validation") {
    const NetworkConfig cfg = testing::table1();
    CHECK_THROWS_AS(sinr_coverage(cfg, std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(sinr_coverage(cfg, std::vector<double>{1.0, -1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(sinr_coverage(cfg, std::vector<double>{1.0, std::nan(""), 1.0}), std::invalid_argument);
}

TEST_CASE("coverage curve sweeps a common threshold") {
    const NetworkConfig cfg = testing::table1();
    const std::vector<double> th{0.1, 1.0, 10.0};
    const CoverageCurve c = coverage_curve(cfg, th);
    CHECK(c.formula == "sinr");
    REQUIRE(c.points.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(c.totals()[i] == sinr_coverage(cfg, same(cfg, th[i])).total);
}
