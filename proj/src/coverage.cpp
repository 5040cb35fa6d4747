#include "hetnet/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hetnet/intensity.hpp"

namespace hetnet {

const char* to_string(CoverageMode m) {
    switch (m) {
    case CoverageMode::SinrFull:
        return "sinr";
    case CoverageMode::SnrOnly:
        return "snr";
    case CoverageMode::ClosedForm24:
        return "closed24";
    case CoverageMode::Hybrid:
        return "hybrid";
    }
    return "?";
}

const char* to_string(ExclusionZone z) { return z == ExclusionZone::WithGains ? "with_gains" : "without_gains"; }

CoverageMode parse_coverage_mode(const std::string& s) {
    if (s == "sinr") return CoverageMode::SinrFull;
    if (s == "snr") return CoverageMode::SnrOnly;
    if (s == "closed24") return CoverageMode::ClosedForm24;
    if (s == "hybrid") return CoverageMode::Hybrid;
    throw std::invalid_argument("unknown coverage mode \"" + s + "\" (expected sinr, snr, closed24 or hybrid)");
}

ExclusionZone parse_exclusion_zone(const std::string& s) {
    if (s == "with_gains") return ExclusionZone::WithGains;
    if (s == "without_gains") return ExclusionZone::WithoutGains;
    throw std::invalid_argument("unknown exclusion zone \"" + s + "\" (expected with_gains or without_gains)");
}

double psi(int n, double x) { return -std::expm1(-n * std::log1p(x)); }

double eta(int n) { return n * std::exp(-std::lgamma(n + 1.0) / n); }

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

double CoveragePoint::tier_conditional(std::size_t k) const {
    const double a = tier_association(k);
    return a > 0.0 ? tier_joint(k) / a : 0.0;
}

std::vector<double> CoverageCurve::totals() const {
    std::vector<double> out;
    for (const CoveragePoint& p : points) out.push_back(p.total);
    return out;
}

namespace {

double exclusion_ratio(const NetworkConfig& cfg, std::size_t j, std::size_t k, ExclusionZone zone) {
    if (zone == ExclusionZone::WithGains) return association_ratio(cfg, j, k);
    const TierConfig& tj = cfg.tiers[j];
    const TierConfig& tk = cfg.tiers[k];
    return (tj.tx_power * tj.bias) / (tk.tx_power * tk.bias);
}

double serving_gain_of(const NetworkConfig& cfg, std::size_t k, const CoverageOptions& opts) {
    return opts.serving_gain ? *opts.serving_gain : cfg.tiers[k].serving_gain;
}

bool with_interference(const CoverageOptions& opts) {
    return opts.mode == CoverageMode::SinrFull || opts.mode == CoverageMode::Hybrid;
}

// Joint P(covered, served by a state-s BS of tier k) by nested quadrature.
QuadratureResult joint_by_quadrature(const NetworkConfig& cfg, std::size_t k, LinkState s, double threshold,
                                     const CoverageOptions& opts) {
    const TierConfig& tier = cfg.tiers[k];
    const int order = cfg.fading.order(s);
    const double eta_s = eta(order);
    const double g0 = serving_gain_of(cfg, k, opts);
    const bool interference = with_interference(opts) && threshold > 0.0;

    std::vector<double> coeff(order + 1);
    for (int n = 1; n <= order; ++n) coeff[n] = (n % 2 == 1 ? 1.0 : -1.0) * binomial(order, n);

    QuadratureResult total;
    for (ServingPiece piece : serving_pieces(cfg, k, s)) {
        if (interference && opts.exclusion == ExclusionZone::WithoutGains) {
            // The interferer lower limit then moves through ball edges at other distances.
            for (std::size_t j = 0; j < cfg.num_tiers(); ++j) {
                if (!cfg.shares_band(k, j)) continue;
                const double ratio = exclusion_ratio(cfg, j, k, opts.exclusion);
                for (double bp : breakpoints(cfg.tiers[j])) {
                    const double r = std::pow(bp / ratio / piece.kappa, 1.0 / piece.alpha);
                    if (r > piece.r_inner && r < piece.r_outer) piece.r_breaks.push_back(r);
                }
            }
        }
        bool inner_ok = true;
        double inner_err = 0.0;
        auto integrand = [&](double r) {
            const double l = piece.path_loss(r);
            const double assoc = association_exponent(cfg, k, l);
            double sum = 0.0;
            for (int n = 1; n <= order; ++n) {
                double expo = assoc + n * eta_s * threshold * l * tier.noise_power / (tier.tx_power * g0);
                if (interference) {
                    for (std::size_t j = 0; j < cfg.num_tiers(); ++j) {
                        if (!cfg.shares_band(k, j)) continue;
                        for (LinkState si : kLinkStates) {
                            const QuadratureResult q =
                                interference_term(cfg, j, si, k, s, n, threshold, l, g0, opts);
                            expo += q.value;
                            inner_ok = inner_ok && q.converged;
                            inner_err = std::max(inner_err, q.error);
                        }
                    }
                }
                sum += coeff[n] * std::exp(-expo);
            }
            return piece.weight * r * sum;
        };
        QuadratureResult q = integrate({integrand, piece.r_breaks, piece.r_inner, piece.r_outer}, opts.outer);
        q.converged = q.converged && inner_ok;
        total += q;
    }
    return total;
}

// ---- closed form for alpha_LOS = 2, alpha_NLOS = 4 -------------------------------------

bool exponents_are_2_4(const NetworkConfig& cfg) {
    for (const TierConfig& t : cfg.tiers) {
        for (const BallSpec& b : t.balls) {
            if (b.alpha_los != 2.0 || b.alpha_nlos != 4.0) return false;
        }
    }
    return true;
}

constexpr double kSqrtPi = 1.7724538509055160273;

// h(u) = u sqrt(pi) exp(u^2) erfc(u), and 1 - h(u), both for u >= 0.
double scaled_erfc(double u) {
    if (u < 10.0) return u * kSqrtPi * std::exp(u * u) * std::erfc(u);
    const double v = 1.0 / (2.0 * u * u);
    return 1.0 - v * (1.0 - 3.0 * v * (1.0 - 5.0 * v * (1.0 - 7.0 * v * (1.0 - 9.0 * v * (1.0 - 11.0 * v)))));
}
double one_minus_scaled_erfc(double u) {
    if (u < 10.0) return 1.0 - scaled_erfc(u);
    const double v = 1.0 / (2.0 * u * u);
    return v * (1.0 - 3.0 * v * (1.0 - 5.0 * v * (1.0 - 7.0 * v * (1.0 - 9.0 * v * (1.0 - 11.0 * v)))));
}
// exp(u^2) erfc(u) for u >= 0.
double erfcx(double u) {
    if (u < 10.0) return std::exp(u * u) * std::erfc(u);
    return scaled_erfc(u) / (u * kSqrtPi);
}

// Q(x) = a x^2 + c x + d on one segment.
struct Quadratic {
    double a = 0.0;
    double c = 0.0;
    double d = 0.0;
    double operator()(double x) const { return (a * x + c) * x + d; }
};

// Integrals of exp(-Q) and x exp(-Q) over [x0, x1]; requires a > 0, c >= 0, x0 >= 0.
std::pair<double, double> gaussian_moments(const Quadratic& q, double x0, double x1) {
    if (q.a <= 0.0) {
        // Zero threshold on a segment without an active quadratic piece.
        if (q.c <= 0.0) {
            const double e = std::exp(-q.d);
            return {e * (x1 - x0), 0.5 * e * (x1 * x1 - x0 * x0)};
        }
        const double e0 = std::exp(-q(x0));
        const double e1 = std::exp(-q(x1));
        const double inv = 1.0 / q.c;
        return {(e0 - e1) * inv, (x0 * inv + inv * inv) * e0 - (x1 * inv + inv * inv) * e1};
    }
    const double s = std::sqrt(q.a);
    const double m = q.c / (2.0 * s);
    const double u0 = s * x0 + m;
    const double u1 = s * x1 + m;
    const double e0 = std::exp(-q(x0));
    const double e1 = std::exp(-q(x1));

    double i0;
    if (m < 5.0 && u0 < 2.0) {
        i0 = std::exp(m * m - q.d) * kSqrtPi / (2.0 * s) * (std::erf(u1) - std::erf(u0));
    } else {
        i0 = kSqrtPi / (2.0 * s) * (e0 * erfcx(u0) - e1 * erfcx(u1));
    }

    double i1;
    if (m < 1.0) {
        // e0 - e1 without cancellation
        const double diff = -e0 * std::expm1(-(q.a * (x1 * x1 - x0 * x0) + q.c * (x1 - x0)));
        i1 = diff / (2.0 * q.a) - (m / s) * i0;
    } else {
        // x e^{-Q} = -(e^{-Q})'/(2a) - (c/2a) e^{-Q}, combined as e^{-Q}(1 - m sqrt(pi) erfcx(u)) / (2a)
        auto g = [&](double x, double u) {
            return (s * x) / u + (m / u) * one_minus_scaled_erfc(u);
        };
        i1 = (e0 * g(x0, u0) - e1 * g(x1, u1)) / (2.0 * q.a);
    }
    return {i0, i1};
}

double joint_closed_form(const NetworkConfig& cfg, std::size_t k, LinkState s, double threshold,
                         const CoverageOptions& opts) {
    const TierConfig& tier = cfg.tiers[k];
    const int order = cfg.fading.order(s);
    const double eta_s = eta(order);
    const double g0 = serving_gain_of(cfg, k, opts);
    const bool los = s == LinkState::Los;

    // Segment cuts in x = sqrt(l): every tier's breakpoints mapped through ratio_j * x^2.
    std::vector<double> cuts;
    std::vector<double> ratios(cfg.num_tiers());
    for (std::size_t j = 0; j < cfg.num_tiers(); ++j) {
        ratios[j] = association_ratio(cfg, j, k);
        for (double bp : breakpoints(cfg.tiers[j])) cuts.push_back(std::sqrt(bp / ratios[j]));
    }

    // Association exponent on a segment, read off from which intensity pieces are active at x.
    auto exponent_at = [&](double x) {
        Quadratic q;
        for (std::size_t j = 0; j < cfg.num_tiers(); ++j) {
            const TierConfig& tj = cfg.tiers[j];
            const double y = ratios[j] * x * x;
            for (std::size_t d = 0; d < tj.balls.size(); ++d) {
                const BallSpec& b = tj.balls[d];
                const double r0 = tj.inner_radius(d);
                for (LinkState si : kLinkStates) {
                    const double p = b.state_prob(si);
                    if (p <= 0.0) continue;
                    const double kap = b.kappa(si);
                    const double c = kPi * tj.density * p;
                    const double lo = kap * std::pow(r0, b.alpha(si));
                    const double hi = kap * std::pow(b.radius, b.alpha(si));
                    if (y >= hi) {
                        q.d += c * (b.radius * b.radius - r0 * r0);
                    } else if (y > lo) {
                        if (si == LinkState::Los) {
                            q.a += c * ratios[j] / kap;
                        } else {
                            q.c += c * std::sqrt(ratios[j] / kap);
                        }
                        q.d -= c * r0 * r0;
                    }
                }
            }
        }
        return q;
    };

    double joint = 0.0;
    for (const ServingPiece& piece : serving_pieces(cfg, k, s)) {
        const double x_lo = std::sqrt(piece.path_loss(piece.r_inner));
        const double x_hi = std::sqrt(piece.path_loss(piece.r_outer));
        std::vector<double> seg{x_lo};
        for (double c : cuts) {
            if (c > x_lo && c < x_hi) seg.push_back(c);
        }
        seg.push_back(x_hi);
        std::sort(seg.begin(), seg.end());
        // Lambda' dl in x: LOS gives (weight / kappa) x dx, NLOS gives weight / (2 sqrt(kappa)) dx.
        const double pref = los ? piece.weight / piece.kappa : piece.weight / (2.0 * std::sqrt(piece.kappa));
        for (std::size_t i = 0; i + 1 < seg.size(); ++i) {
            const double x0 = seg[i];
            const double x1 = seg[i + 1];
            if (!(x1 > x0)) continue;
            const Quadratic base = exponent_at(0.5 * (x0 + x1));
            for (int n = 1; n <= order; ++n) {
                Quadratic q = base;
                q.a += n * eta_s * threshold * tier.noise_power / (tier.tx_power * g0);
                const auto [i0, i1] = gaussian_moments(q, x0, x1);
                const double sign = n % 2 == 1 ? 1.0 : -1.0;
                joint += sign * binomial(order, n) * pref * (los ? i1 : i0);
            }
        }
    }
    return joint;
}

void check_thresholds(const NetworkConfig& cfg, std::span<const double> thresholds) {
    if (thresholds.size() != cfg.num_tiers()) {
        throw std::invalid_argument("coverage: one threshold per tier is required");
    }
    for (double t : thresholds) {
        if (!(t >= 0.0) || !std::isfinite(t)) {
            throw std::invalid_argument("coverage: thresholds must be finite and nonnegative");
        }
    }
}

}  // namespace

QuadratureResult interference_term(const NetworkConfig& cfg, std::size_t j, LinkState interferer_state, std::size_t k,
                                   LinkState serving_state, int n, double threshold, double serving_loss,
                                   double serving_gain, const CoverageOptions& opts) {
    QuadratureResult total;
    if (!(threshold > 0.0)) return total;
    const TierConfig& tj = cfg.tiers[j];
    const int n_int = cfg.fading.order(interferer_state);
    const double scale = n * eta(cfg.fading.order(serving_state)) * threshold * tj.tx_power * serving_loss /
                         (cfg.tiers[k].tx_power * serving_gain * n_int);
    const double t_min = exclusion_ratio(cfg, j, k, opts.exclusion) * serving_loss;
    const std::vector<GainAtom> gains = interferer_gain_pmf(cfg, j);

    for (std::size_t d = 0; d < tj.balls.size(); ++d) {
        const BallSpec& b = tj.balls[d];
        const double p = b.state_prob(interferer_state);
        if (p <= 0.0) continue;
        const double kap = b.kappa(interferer_state);
        const double alpha = b.alpha(interferer_state);
        const double r_lo = std::max(tj.inner_radius(d), std::pow(t_min / kap, 1.0 / alpha));
        const double r_hi = b.radius;
        if (!(r_hi > r_lo)) continue;
        const double weight = 2.0 * kPi * tj.density * p;
        auto f = [&](double r) {
            const double x = scale / (kap * std::pow(r, alpha));
            double sum = 0.0;
            for (const GainAtom& g : gains) sum += g.prob * psi(n_int, x * g.gain);
            return weight * r * sum;
        };
        total += integrate({f, {}, r_lo, r_hi}, opts.inner);
    }
    return total;
}

CoveragePoint coverage_point(const NetworkConfig& cfg, std::span<const double> thresholds,
                             const CoverageOptions& opts, const AssociationTable* table) {
    check_thresholds(cfg, thresholds);
    if (opts.mode == CoverageMode::ClosedForm24 && !exponents_are_2_4(cfg)) {
        throw std::invalid_argument("closed-form coverage requires alpha_los = 2 and alpha_nlos = 4 on every ball");
    }
    AssociationTable own;
    if (table == nullptr) {
        own = association_table(cfg, opts.outer);
        table = &own;
    }
    CoveragePoint point;
    point.thresholds.assign(thresholds.begin(), thresholds.end());
    point.parts.resize(cfg.num_tiers());
    point.error = table->error;
    point.converged = table->converged;
    for (std::size_t k = 0; k < cfg.num_tiers(); ++k) {
        for (LinkState s : kLinkStates) {
            TierStateCoverage& part = point.parts[k][state_index(s)];
            part.association = table->at(k, s);
            if (opts.mode == CoverageMode::ClosedForm24) {
                part.joint = joint_closed_form(cfg, k, s, thresholds[k], opts);
            } else {
                const QuadratureResult q = joint_by_quadrature(cfg, k, s, thresholds[k], opts);
                part.joint = q.value;
                point.error += q.error;
                point.converged = point.converged && q.converged;
            }
            part.conditional = part.association > 0.0 ? std::clamp(part.joint / part.association, 0.0, 1.0) : 0.0;
            point.total += part.joint;
        }
    }
    return point;
}

CoveragePoint sinr_coverage(const NetworkConfig& cfg, std::span<const double> thresholds, const CoverageOptions& opts) {
    CoverageOptions o = opts;
    o.mode = CoverageMode::SinrFull;
    return coverage_point(cfg, thresholds, o);
}

CoveragePoint snr_coverage(const NetworkConfig& cfg, std::span<const double> thresholds, const CoverageOptions& opts) {
    CoverageOptions o = opts;
    o.mode = CoverageMode::SnrOnly;
    return coverage_point(cfg, thresholds, o);
}

CoveragePoint snr_coverage_closed_form(const NetworkConfig& cfg, std::span<const double> thresholds,
                                       const CoverageOptions& opts) {
    CoverageOptions o = opts;
    o.mode = CoverageMode::ClosedForm24;
    return coverage_point(cfg, thresholds, o);
}

CoveragePoint hybrid_coverage(const NetworkConfig& cfg, std::span<const double> thresholds,
                              const CoverageOptions& opts) {
    if (!cfg.is_hybrid()) {
        throw std::invalid_argument("hybrid coverage requires tier 1 in the microwave band");
    }
    const TierConfig& macro = cfg.tiers.front();
    for (const BallSpec& b : macro.balls) {
        if (b.los_prob != 1.0) {
            throw std::invalid_argument("hybrid coverage requires all-LOS links for the microwave tier");
        }
    }
    CoverageOptions o = opts;
    o.mode = CoverageMode::Hybrid;
    return coverage_point(cfg, thresholds, o);
}

double alignment_probability(double beam_width, double sigma) {
    if (sigma <= 0.0) return 1.0;
    return std::erf(beam_width / (2.0 * std::sqrt(2.0) * sigma));
}

CoveragePoint coverage_with_beam_error(const NetworkConfig& cfg, std::span<const double> thresholds, double sigma_be,
                                       const CoverageOptions& opts) {
    if (!(sigma_be >= 0.0)) {
        throw std::invalid_argument("beam error standard deviation must be nonnegative");
    }
    if (cfg.is_hybrid()) {
        throw std::invalid_argument("beam error averaging assumes the mmWave pattern on every tier");
    }
    const double f = alignment_probability(cfg.pattern.beam_width, sigma_be);
    const double big = cfg.pattern.main_lobe;
    const double small = cfg.pattern.side_lobe;
    const std::array<std::pair<double, double>, 3> mix{
        {{big * big, f * f}, {big * small, 2.0 * f * (1.0 - f)}, {small * small, (1.0 - f) * (1.0 - f)}}};

    const AssociationTable table = association_table(cfg, opts.outer);
    CoveragePoint out;
    out.thresholds.assign(thresholds.begin(), thresholds.end());
    out.parts.resize(cfg.num_tiers());
    out.error = table.error;
    out.converged = table.converged;
    for (const auto& [gain, weight] : mix) {
        if (weight <= 0.0) continue;
        CoverageOptions o = opts;
        o.serving_gain = gain;
        const CoveragePoint p = coverage_point(cfg, thresholds, o, &table);
        out.total += weight * p.total;
        out.error += weight * (p.error - table.error);
        out.converged = out.converged && p.converged;
        for (std::size_t k = 0; k < cfg.num_tiers(); ++k) {
            for (std::size_t s = 0; s < 2; ++s) {
                out.parts[k][s].association = p.parts[k][s].association;
                out.parts[k][s].joint += weight * p.parts[k][s].joint;
            }
        }
    }
    for (auto& tier : out.parts) {
        for (auto& part : tier) {
            part.conditional = part.association > 0.0 ? std::clamp(part.joint / part.association, 0.0, 1.0) : 0.0;
        }
    }
    return out;
}

CoverageCurve coverage_curve(const NetworkConfig& cfg, std::span<const double> thresholds,
                             const CoverageOptions& opts) {
    CoverageCurve curve;
    curve.formula = to_string(opts.mode);
    curve.thresholds.assign(thresholds.begin(), thresholds.end());
    const AssociationTable table = association_table(cfg, opts.outer);
    for (double t : thresholds) {
        const std::vector<double> per_tier(cfg.num_tiers(), t);
        curve.points.push_back(coverage_point(cfg, per_tier, opts, &table));
    }
    return curve;
}

}  // namespace hetnet
