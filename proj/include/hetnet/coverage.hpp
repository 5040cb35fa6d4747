#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hetnet/association.hpp"
#include "hetnet/core_model.hpp"
#include "hetnet/quadrature.hpp"

namespace hetnet {

enum class CoverageMode { SinrFull, SnrOnly, ClosedForm24, Hybrid };

/// Lower limit of the interferer integrals: the nearest admissible interferer of tier j
/// sits at path loss ratio * l, with or without the intended-link gains in the ratio.
enum class ExclusionZone { WithGains, WithoutGains };

const char* to_string(CoverageMode m);
const char* to_string(ExclusionZone z);
CoverageMode parse_coverage_mode(const std::string& s);
ExclusionZone parse_exclusion_zone(const std::string& s);

struct CoverageOptions {
    CoverageMode mode = CoverageMode::SinrFull;
    ExclusionZone exclusion = ExclusionZone::WithGains;
    std::optional<double> serving_gain;  // G0 override for every tier
    Tolerance outer{1e-9, 1e-7, 4000};
    Tolerance inner{1e-10, 1e-8, 2000};
};

/// Psi(N, x) = 1 - (1 + x)^(-N).
double psi(int n, double x);

/// eta(N) = N * (N!)^(-1/N), evaluated in log space.
double eta(int n);

/// Binomial coefficient C(n, k) evaluated in log space.
double binomial(int n, int k);

/// Expected number of state-`interferer_state` tier-j BSs that knock out a tier-k link:
/// sum_G p_G * integral of Psi(N, n eta Gamma P_j G l / (P_k G0 t N)) Lambda'_j(t) dt over
/// t > ratio * l. `serving_state` selects eta; `interferer_state` selects N and the measure.
QuadratureResult interference_term(const NetworkConfig& cfg, std::size_t j, LinkState interferer_state,
                                   std::size_t k, LinkState serving_state, int n, double threshold,
                                   double serving_loss, double serving_gain, const CoverageOptions& opts);

struct TierStateCoverage {
    double joint = 0.0;        // P(SINR > Gamma_k, served by tier k in state s)
    double association = 0.0;  // A_{k,s}
    double conditional = 0.0;  // joint / association
};

struct CoveragePoint {
    std::vector<double> thresholds;  // per-tier Gamma_k, linear
    double total = 0.0;
    std::vector<std::array<TierStateCoverage, 2>> parts;
    double error = 0.0;
    bool converged = true;

    double tier_joint(std::size_t k) const { return parts[k][0].joint + parts[k][1].joint; }
    double tier_association(std::size_t k) const { return parts[k][0].association + parts[k][1].association; }
    /// P_C^k: coverage conditioned on association with tier k (0 when the tier serves nobody).
    double tier_conditional(std::size_t k) const;
};

struct CoverageCurve {
    std::string formula;
    std::vector<double> thresholds;
    std::vector<CoveragePoint> points;

    std::vector<double> totals() const;
};

/// Evaluates one coverage point with per-tier thresholds. The association table may be
/// supplied to avoid recomputation; it must belong to `cfg`.
CoveragePoint coverage_point(const NetworkConfig& cfg, std::span<const double> thresholds,
                             const CoverageOptions& opts, const AssociationTable* table = nullptr);

/// SINR coverage including interference. Interference never crosses bands.
CoveragePoint sinr_coverage(const NetworkConfig& cfg, std::span<const double> thresholds,
                            const CoverageOptions& opts = {});

/// Noise-limited coverage (interference terms dropped).
CoveragePoint snr_coverage(const NetworkConfig& cfg, std::span<const double> thresholds,
                           const CoverageOptions& opts = {});

/// Noise-limited coverage in closed form (erf) for alpha_LOS = 2, alpha_NLOS = 4 everywhere.
/// Throws std::invalid_argument when any ball has other exponents.
CoveragePoint snr_coverage_closed_form(const NetworkConfig& cfg, std::span<const double> thresholds,
                                       const CoverageOptions& opts = {});

/// Microwave macro tier plus mmWave small cells; validates the hybrid layout first.
CoveragePoint hybrid_coverage(const NetworkConfig& cfg, std::span<const double> thresholds,
                              const CoverageOptions& opts = {});

/// Half-normal misalignment: P(|eps| <= theta/2) = erf(theta / (2 sqrt(2) sigma)).
double alignment_probability(double beam_width, double sigma);

/// Averages coverage over the serving gain {MM, Mm, mm} with weights (F^2, 2F(1-F), (1-F)^2).
/// All-mmWave networks only; hybrid layouts throw std::invalid_argument.
CoveragePoint coverage_with_beam_error(const NetworkConfig& cfg, std::span<const double> thresholds,
                                       double sigma_be, const CoverageOptions& opts = {});

/// Same threshold on every tier, swept over `thresholds` (linear).
CoverageCurve coverage_curve(const NetworkConfig& cfg, std::span<const double> thresholds,
                             const CoverageOptions& opts = {});

}  // namespace hetnet
