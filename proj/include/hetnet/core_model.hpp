#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hetnet {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 2.998e8;  // m/s

/// dB/dBm helpers. Everything past the configuration boundary is linear.
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watts(double dbm) { return db_to_linear(dbm - 30.0); }
inline double watts_to_dbm(double w) { return linear_to_db(w) + 30.0; }

/// Free-space loss at 1 m, (4 pi f / c)^2.
inline double free_space_intercept(double carrier_hz) {
    const double v = 4.0 * kPi * carrier_hz / kSpeedOfLight;
    return v * v;
}

/// Thermal noise power in watts for a bandwidth and receiver noise figure.
inline double noise_power_watts(double psd_dbm_hz, double bandwidth_hz, double noise_figure_db) {
    return dbm_to_watts(psd_dbm_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db);
}

enum class LinkState { Los, Nlos, Outage };
enum class Band { MmWave, Microwave };

const char* to_string(LinkState s);
const char* to_string(Band b);

/// Index helper for per-state arrays {LOS, NLOS}.
inline std::size_t state_index(LinkState s) { return s == LinkState::Los ? 0 : 1; }
inline constexpr std::array<LinkState, 2> kLinkStates{LinkState::Los, LinkState::Nlos};

/// Two-level sectored pattern: gain `main_lobe` over `beam_width` radians, `side_lobe` elsewhere.
struct AntennaPattern {
    double main_lobe = 1.0;
    double side_lobe = 1.0;
    double beam_width = 2.0 * kPi;
};

struct FadingConfig {
    int n_los = 1;
    int n_nlos = 1;

    int order(LinkState s) const { return s == LinkState::Los ? n_los : n_nlos; }
};

/// One annulus of the D-ball blockage model. `kappa_*` are linear losses at 1 m.
struct BallSpec {
    double radius = 0.0;
    double los_prob = 1.0;
    double alpha_los = 2.0;
    double alpha_nlos = 4.0;
    double kappa_los = 1.0;
    double kappa_nlos = 1.0;

    double alpha(LinkState s) const { return s == LinkState::Los ? alpha_los : alpha_nlos; }
    double kappa(LinkState s) const { return s == LinkState::Los ? kappa_los : kappa_nlos; }
    double state_prob(LinkState s) const { return s == LinkState::Los ? los_prob : 1.0 - los_prob; }
};

struct TierConfig {
    double density = 0.0;        // BS per m^2
    double tx_power = 0.0;       // W
    double bias = 1.0;           // linear
    std::vector<BallSpec> balls;  // strictly increasing radii
    double noise_power = 0.0;    // W
    double static_power = 0.0;   // W
    double amp_slope = 1.0;
    Band band = Band::MmWave;
    double serving_gain = 1.0;   // intended-link gain used for association
    double bandwidth = 0.0;      // Hz; shared by the UEs of one BS

    double outage_radius() const { return balls.back().radius; }
    double inner_radius(std::size_t d) const { return d == 0 ? 0.0 : balls[d - 1].radius; }
    /// P * G * B, the association weight of the tier.
    double biased_power() const { return tx_power * serving_gain * bias; }
};

struct NetworkConfig {
    std::vector<TierConfig> tiers;
    double ue_density = 0.0;
    double bandwidth = 0.0;
    AntennaPattern pattern;
    std::optional<AntennaPattern> mu_pattern;
    FadingConfig fading;

    std::size_t num_tiers() const { return tiers.size(); }
    bool is_hybrid() const;
    /// Tiers k and j interfere only when they share a band.
    bool shares_band(std::size_t k, std::size_t j) const { return tiers[k].band == tiers[j].band; }
};

struct GainAtom {
    double gain;
    double prob;
};

/// Thrown by validate() with every violation found, one per line.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Checks every invariant of the configuration types; throws ConfigError naming tier and field.
const NetworkConfig& validate(const NetworkConfig& cfg);

/// Interferer gain distribution {MM, Mm, mm} for a uniformly oriented pair of sectored antennas.
std::array<GainAtom, 3> gain_pmf(const AntennaPattern& pattern);

/// Product-gain distribution when transmitter and receiver use different patterns.
std::vector<GainAtom> gain_pmf(const AntennaPattern& tx, const AntennaPattern& rx);

/// Interferer gain distribution seen by the typical UE from a BS of tier `j`.
std::vector<GainAtom> interferer_gain_pmf(const NetworkConfig& cfg, std::size_t j);

/// Index of the ball whose half-open annulus [R_{d-1}, R_d) contains r; nullopt in outage.
std::optional<std::size_t> ball_index(const TierConfig& tier, double r);

/// LOS probability at distance r, or nullopt beyond the outermost ball.
std::optional<double> los_probability(const TierConfig& tier, double r);

/// kappa * r^alpha for ball `d` in state `s`. Throws std::invalid_argument for OUTAGE.
double path_loss(const TierConfig& tier, std::size_t d, LinkState s, double r);

}  // namespace hetnet
