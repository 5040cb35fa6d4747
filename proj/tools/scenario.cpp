#include "scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <deque>
#include <fstream>
#include <functional>
#include <thread>

#include <fmt/format.h>

#include "hetnet/association.hpp"
#include "hetnet/config_io.hpp"
#include "hetnet/metrics.hpp"

namespace hetnet::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ExperimentName {
    Experiment e;
    const char* name;
};

constexpr ExperimentName kExperiments[] = {
    {Experiment::SinrVsSnr, "SINR_VS_SNR"},     {Experiment::GainSweep, "GAIN_SWEEP"},
    {Experiment::BallParams, "BALL_PARAMS"},    {Experiment::BiasSweep, "BIAS_SWEEP"},
    {Experiment::BeamError, "BEAM_ERROR"},      {Experiment::Rate, "RATE"},
    {Experiment::Energy, "ENERGY"},             {Experiment::AssocVsBias, "ASSOC_VS_BIAS"},
    {Experiment::HybridBias, "HYBRID_BIAS"},    {Experiment::HybridDensity, "HYBRID_DENSITY"},
};

std::vector<double> number_list(const Scenario& sc, const char* key) {
    if (!sc.grid.contains(key)) {
        throw ScenarioError(fmt::format("{}: grid.{} is required", to_string(sc.experiment), key));
    }
    const json& v = sc.grid.at(key);
    if (!v.is_array()) throw ScenarioError(fmt::format("grid.{} must be a list of numbers", key));
    if (v.empty()) throw ScenarioError(fmt::format("grid.{} is empty", key));
    std::vector<double> out;
    for (const json& x : v) {
        if (!x.is_number()) throw ScenarioError(fmt::format("grid.{} must be a list of numbers", key));
        out.push_back(x.get<double>());
    }
    return out;
}

/// 1-based tier list from the grid, defaulting to every tier but the first.
std::vector<std::size_t> tier_list(const Scenario& sc, const char* key, std::size_t num_tiers) {
    std::vector<std::size_t> out;
    if (!sc.grid.contains(key)) {
        for (std::size_t k = 1; k < num_tiers; ++k) out.push_back(k);
        return out;
    }
    for (double v : number_list(sc, key)) {
        if (v < 1 || v > static_cast<double>(num_tiers) || v != std::floor(v)) {
            throw ScenarioError(fmt::format("grid.{}: tier {} does not exist", key, v));
        }
        out.push_back(static_cast<std::size_t>(v) - 1);
    }
    return out;
}

Tolerance parse_tolerance(const json& doc, Tolerance t) {
    t.abs = doc.value("abs", t.abs);
    t.rel = doc.value("rel", t.rel);
    t.max_panels = doc.value("max_panels", t.max_panels);
    if (!(t.abs > 0.0) || !(t.rel > 0.0) || t.max_panels < 1) {
        throw ScenarioError("tolerances must be positive");
    }
    return t;
}

json tolerance_json(const Tolerance& t) { return {{"abs", t.abs}, {"rel", t.rel}, {"max_panels", t.max_panels}}; }

std::string label(double v) { return fmt::format("{:g}", v); }

Row from_point(double x, const CoveragePoint& p) { return {x, p.total, p.error, p.converged, std::nullopt}; }

/// Work item: one analytic row, computed on a pool thread.
struct Job {
    std::size_t curve;
    std::size_t row;
    std::function<Row()> eval;
};

/// Monte Carlo pass over one configuration, filling estimates after the analytic pass.
struct McTask {
    const NetworkConfig* cfg;
    std::optional<double> beam_error_sigma;
    std::function<void(std::span<const DropResult>, std::vector<Curve>&)> fill;
};

class Builder {
public:
    explicit Builder(const Scenario& sc) : sc_(sc) {
        base_ = json::parse(read_text_file(sc.config_path));
    }

    const json& base() const { return base_; }

    const NetworkConfig& config(const json& doc) {
        configs_.push_back(parse_network_config(doc));
        if (sc_.options.mode == CoverageMode::ClosedForm24) {
            for (const TierConfig& t : configs_.back().tiers) {
                for (const BallSpec& ball : t.balls) {
                    if (ball.alpha_los != 2.0 || ball.alpha_nlos != 4.0) {
                        throw ConfigError("mode closed24 needs alpha_los = 2 and alpha_nlos = 4 on every ball");
                    }
                }
            }
        }
        return configs_.back();
    }

    /// Shared association table for a configuration built above.
    const AssociationTable& table(const NetworkConfig& cfg) {
        tables_.push_back(association_table(cfg, sc_.options.outer));
        return tables_.back();
    }

    std::size_t add_curve(std::string name, std::vector<double> xs) {
        Curve c;
        c.name = std::move(name);
        for (double x : xs) c.rows.push_back({x, 0.0, 0.0, true, std::nullopt});
        curves_.push_back(std::move(c));
        return curves_.size() - 1;
    }

    void add_job(std::size_t curve, std::size_t row, std::function<Row()> f) {
        jobs_.push_back({curve, row, std::move(f)});
    }

    void add_mc(const NetworkConfig& cfg, std::optional<double> sigma,
                std::function<void(std::span<const DropResult>, std::vector<Curve>&)> fill) {
        if (sc_.monte_carlo) mc_.push_back({&cfg, sigma, std::move(fill)});
    }

    std::vector<Curve> finish();

private:
    const Scenario& sc_;
    json base_;
    std::deque<NetworkConfig> configs_;
    std::deque<AssociationTable> tables_;
    std::vector<Curve> curves_;
    std::vector<Job> jobs_;
    std::vector<McTask> mc_;
};

std::vector<Curve> Builder::finish() {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = std::clamp<unsigned>(sc_.workers == 0 ? hw : sc_.workers, 1,
                                                  static_cast<unsigned>(std::max<std::size_t>(1, jobs_.size())));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < jobs_.size(); i = next++) {
            Row r;
            try {
                r = jobs_[i].eval();
            } catch (const std::exception&) {
                // A failed point is reported in place; the rest of the grid still runs.
                r = {curves_[jobs_[i].curve].rows[jobs_[i].row].x, std::nan(""), std::nan(""), false, std::nullopt};
            }
            curves_[jobs_[i].curve].rows[jobs_[i].row] = r;
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    for (const McTask& t : mc_) {
        SimConfig sim;
        sim.drops = sc_.monte_carlo->drops;
        sim.seed = sc_.monte_carlo->seed;
        sim.parallel_chunks = sc_.monte_carlo->chunks;
        sim.beam_error_sigma = t.beam_error_sigma;
        const std::vector<DropResult> drops = simulate(*t.cfg, sim);
        t.fill(drops, curves_);
    }
    return std::move(curves_);
}

std::vector<double> db_list_to_linear(const std::vector<double>& db) {
    std::vector<double> out;
    for (double d : db) out.push_back(db_to_linear(d));
    return out;
}

Metric metric_for(CoverageMode m) { return m == CoverageMode::SnrOnly || m == CoverageMode::ClosedForm24 ? Metric::Snr : Metric::Sinr; }

double metric_value(const DropResult& d, Metric m) {
    return m == Metric::Sinr ? d.sinr : m == Metric::Snr ? d.snr : d.rate;
}

/// Per-tier joint coverage from drops: served by `tier` and metric above the threshold.
Estimate tier_joint(std::span<const DropResult> drops, int tier, double threshold, Metric m) {
    std::size_t hits = 0;
    for (const DropResult& d : drops) {
        if (d.tier == tier && metric_value(d, m) > threshold) ++hits;
    }
    return proportion(hits, drops.size());
}

void fill_curve(Curve& c, const EmpiricalCurve& e) {
    for (std::size_t i = 0; i < c.rows.size(); ++i) c.rows[i].monte_carlo = e.coverage[i];
}

/// A coverage curve over thresholds (dB) for one configuration, with its MC twin.
void threshold_curve(Builder& b, const NetworkConfig& cfg, const std::string& name,
                     const std::vector<double>& th_db, CoverageOptions opts) {
    const AssociationTable& tab = b.table(cfg);
    const std::size_t c = b.add_curve(name, th_db);
    for (std::size_t i = 0; i < th_db.size(); ++i) {
        const double x = th_db[i];
        b.add_job(c, i, [&cfg, &tab, opts, x] {
            const std::vector<double> th(cfg.num_tiers(), db_to_linear(x));
            return from_point(x, coverage_point(cfg, th, opts, &tab));
        });
    }
    const Metric m = opts.mode == CoverageMode::Hybrid ? Metric::Sinr : metric_for(opts.mode);
    b.add_mc(cfg, std::nullopt, [c, th_db, m](std::span<const DropResult> drops, std::vector<Curve>& out) {
        const std::vector<double> lin = db_list_to_linear(th_db);
        fill_curve(out[c], empirical_coverage(drops, lin, m));
    });
}

json with_bias(json doc, const std::vector<std::size_t>& tiers, double bias_db) {
    for (std::size_t k : tiers) doc["tiers"][k]["bias_db"] = bias_db;
    return doc;
}

std::size_t tier_count(const json& doc) {
    if (!doc.contains("tiers") || !doc["tiers"].is_array()) throw ConfigError("configuration has no tiers list");
    return doc["tiers"].size();
}

void sinr_vs_snr(Builder& b, const Scenario& sc) {
    const auto th = number_list(sc, "threshold_db");
    const std::size_t k_all = tier_count(b.base());
    std::vector<double> counts{static_cast<double>(k_all)};
    if (sc.grid.contains("tier_counts")) counts = number_list(sc, "tier_counts");
    for (double kc : counts) {
        if (kc < 1 || kc > static_cast<double>(k_all) || kc != std::floor(kc)) {
            throw ScenarioError(fmt::format("grid.tier_counts: {} is not a valid tier count", kc));
        }
        json doc = b.base();
        doc["tiers"].erase(doc["tiers"].begin() + static_cast<long>(kc), doc["tiers"].end());
        const NetworkConfig& cfg = b.config(doc);
        CoverageOptions sinr = sc.options;
        sinr.mode = CoverageMode::SinrFull;
        CoverageOptions snr = sc.options;
        snr.mode = sc.options.mode == CoverageMode::ClosedForm24 ? CoverageMode::ClosedForm24 : CoverageMode::SnrOnly;
        threshold_curve(b, cfg, fmt::format("sinr_K{}", kc), th, sinr);
        threshold_curve(b, cfg, fmt::format("snr_K{}", kc), th, snr);
    }
}

void gain_sweep(Builder& b, const Scenario& sc) {
    const auto th = number_list(sc, "threshold_db");
    for (double m : number_list(sc, "main_lobe_db")) {
        json doc = b.base();
        doc["antenna"]["main_db"] = m;
        threshold_curve(b, b.config(doc), "main_" + label(m) + "dB", th, sc.options);
    }
}

void ball_params(Builder& b, const Scenario& sc) {
    const auto th = number_list(sc, "threshold_db");
    if (!sc.grid.contains("variants") || !sc.grid["variants"].is_array() || sc.grid["variants"].empty()) {
        throw ScenarioError("BALL_PARAMS: grid.variants must be a non-empty list");
    }
    for (const json& v : sc.grid["variants"]) {
        json doc = b.base();
        const std::string name = v.value("label", std::string{});
        if (name.empty()) throw ScenarioError("BALL_PARAMS: every variant needs a label");
        const json balls = v.value("balls", json::array());
        if (balls.size() > doc["tiers"].size()) throw ScenarioError("BALL_PARAMS: more ball lists than tiers");
        for (std::size_t k = 0; k < balls.size(); ++k) {
            if (!balls[k].is_null()) doc["tiers"][k]["balls"] = balls[k];
        }
        threshold_curve(b, b.config(doc), "balls_" + name, th, sc.options);
    }
}

void bias_sweep(Builder& b, const Scenario& sc) {
    const auto th = number_list(sc, "threshold_db");
    const auto tiers = tier_list(sc, "bias_tiers", tier_count(b.base()));
    for (double bias : number_list(sc, "bias_db")) {
        const NetworkConfig& cfg = b.config(with_bias(b.base(), tiers, bias));
        const AssociationTable& tab = b.table(cfg);
        const std::string stem = "bias_" + label(bias) + "dB";
        const std::size_t first = b.add_curve(stem + "_total", th);
        for (std::size_t k = 0; k < cfg.num_tiers(); ++k) b.add_curve(fmt::format("{}_tier{}", stem, k + 1), th);
        const CoverageOptions opts = sc.options;
        for (std::size_t i = 0; i < th.size(); ++i) {
            const double x = th[i];
            b.add_job(first, i, [&cfg, &tab, opts, x] {
                const std::vector<double> t(cfg.num_tiers(), db_to_linear(x));
                return from_point(x, coverage_point(cfg, t, opts, &tab));
            });
            for (std::size_t k = 0; k < cfg.num_tiers(); ++k) {
                b.add_job(first + 1 + k, i, [&cfg, &tab, opts, x, k] {
                    const std::vector<double> t(cfg.num_tiers(), db_to_linear(x));
                    const CoveragePoint p = coverage_point(cfg, t, opts, &tab);
                    return Row{x, p.tier_joint(k), p.error, p.converged, std::nullopt};
                });
            }
        }
        const Metric m = metric_for(opts.mode);
        b.add_mc(cfg, std::nullopt, [first, th, m, n = cfg.num_tiers()](std::span<const DropResult> drops,
                                                                      std::vector<Curve>& out) {
            const auto lin = db_list_to_linear(th);
            fill_curve(out[first], empirical_coverage(drops, lin, m));
            for (std::size_t k = 0; k < n; ++k) {
                for (std::size_t i = 0; i < lin.size(); ++i) {
                    out[first + 1 + k].rows[i].monte_carlo = tier_joint(drops, static_cast<int>(k), lin[i], m);
                }
            }
        });
    }
}

void beam_error(Builder& b, const Scenario& sc) {
    const auto th = number_list(sc, "threshold_db");
    const NetworkConfig& cfg = b.config(b.base());
    for (double deg : number_list(sc, "sigma_be_deg")) {
        if (deg < 0) throw ScenarioError("grid.sigma_be_deg must be nonnegative");
        const double sigma = deg * kPi / 180.0;
        const std::size_t c = b.add_curve("sigma_" + label(deg) + "deg", th);
        const CoverageOptions opts = sc.options;
        for (std::size_t i = 0; i < th.size(); ++i) {
            const double x = th[i];
            b.add_job(c, i, [&cfg, opts, x, sigma] {
                const std::vector<double> t(cfg.num_tiers(), db_to_linear(x));
                return from_point(x, coverage_with_beam_error(cfg, t, sigma, opts));
            });
        }
        const Metric m = metric_for(opts.mode);
        b.add_mc(cfg, sigma, [c, th, m](std::span<const DropResult> drops, std::vector<Curve>& out) {
            fill_curve(out[c], empirical_coverage(drops, db_list_to_linear(th), m));
        });
    }
}

void rate(Builder& b, const Scenario& sc) {
    const auto gbps = number_list(sc, "rate_gbps");
    const NetworkConfig& cfg = b.config(b.base());
    const std::size_t first = b.add_curve("rate_total", gbps);
    for (std::size_t k = 0; k < cfg.num_tiers(); ++k) b.add_curve(fmt::format("rate_tier{}", k + 1), gbps);
    const CoverageOptions opts = sc.options;
    for (std::size_t i = 0; i < gbps.size(); ++i) {
        const double x = gbps[i];
        if (x < 0) throw ScenarioError("grid.rate_gbps must be nonnegative");
        b.add_job(first, i, [&cfg, opts, x] {
            const RatePoint r = rate_coverage(cfg, std::vector<double>(cfg.num_tiers(), x * 1e9), opts);
            return Row{x, r.total, r.coverage.error, r.coverage.converged, std::nullopt};
        });
        for (std::size_t k = 0; k < cfg.num_tiers(); ++k) {
            b.add_job(first + 1 + k, i, [&cfg, opts, x, k] {
                const RatePoint r = rate_coverage(cfg, std::vector<double>(cfg.num_tiers(), x * 1e9), opts);
                return Row{x, r.coverage.tier_joint(k), r.coverage.error, r.coverage.converged, std::nullopt};
            });
        }
    }
    b.add_mc(cfg, std::nullopt, [first, gbps, n = cfg.num_tiers()](std::span<const DropResult> drops,
                                                                  std::vector<Curve>& out) {
        std::vector<double> bps;
        for (double g : gbps) bps.push_back(g * 1e9);
        fill_curve(out[first], empirical_coverage(drops, bps, Metric::Rate));
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t i = 0; i < bps.size(); ++i) {
                out[first + 1 + k].rows[i].monte_carlo = tier_joint(drops, static_cast<int>(k), bps[i], Metric::Rate);
            }
        }
    });
}

/// Energy efficiency estimated from drops: per-tier conditional coverage, delta-method error.
Estimate empirical_efficiency(const NetworkConfig& cfg, std::span<const DropResult> drops, double threshold,
                              Metric m) {
    double power = 0.0;
    for (const TierConfig& t : cfg.tiers) power += average_power(t);
    double value = 0.0;
    double var = 0.0;
    for (std::size_t k = 0; k < cfg.num_tiers(); ++k) {
        std::size_t served = 0;
        std::size_t hits = 0;
        for (const DropResult& d : drops) {
            if (d.tier != static_cast<int>(k)) continue;
            ++served;
            if (metric_value(d, m) > threshold) ++hits;
        }
        if (served == 0) continue;
        const Estimate p = proportion(hits, served);
        const double w = cfg.tiers[k].density * std::log2(1.0 + threshold) / power;
        value += w * p.value;
        var += w * w * p.se * p.se;
    }
    return {value, std::sqrt(var)};
}

void energy(Builder& b, const Scenario& sc) {
    const auto bias = number_list(sc, "bias_db");
    const std::size_t k_all = tier_count(b.base());
    const std::vector<std::size_t> bias_tier = sc.grid.contains("bias_tier")
                                                   ? std::vector<std::size_t>{tier_list(sc, "bias_tier", k_all)}
                                                   : std::vector<std::size_t>{k_all - 1};
    double th_db = 0.0;
    if (sc.grid.contains("threshold_db")) {
        const auto t = number_list(sc, "threshold_db");
        if (t.size() != 1) throw ScenarioError("ENERGY: grid.threshold_db takes a single value");
        th_db = t.front();
    }
    json variants = json::array({{{"label", "base"}, {"multipliers", json::array()}}});
    if (sc.grid.contains("density_variants")) {
        variants = sc.grid["density_variants"];
        if (!variants.is_array() || variants.empty()) {
            throw ScenarioError("ENERGY: grid.density_variants must be a non-empty list");
        }
    }
    for (const json& v : variants) {
        const std::string name = v.value("label", std::string{});
        if (name.empty()) throw ScenarioError("ENERGY: every density variant needs a label");
        const json mult = v.value("multipliers", json::array());
        if (mult.size() > k_all) throw ScenarioError("ENERGY: more density multipliers than tiers");
        const std::size_t c = b.add_curve("ee_" + name, bias);
        for (std::size_t i = 0; i < bias.size(); ++i) {
            json doc = with_bias(b.base(), bias_tier, bias[i]);
            for (std::size_t k = 0; k < mult.size(); ++k) {
                doc["tiers"][k]["density_per_m2"] = doc["tiers"][k]["density_per_m2"].get<double>() * mult[k].get<double>();
            }
            const NetworkConfig& cfg = b.config(doc);
            const CoverageOptions opts = sc.options;
            const double x = bias[i];
            b.add_job(c, i, [&cfg, opts, x, th_db] {
                const double g = db_to_linear(th_db);
                const EnergyReport r = energy_efficiency(cfg, std::vector<double>(cfg.num_tiers(), g), opts);
                double err = 0.0;
                for (std::size_t k = 0; k < cfg.num_tiers(); ++k) {
                    const double a = r.coverage.tier_association(k);
                    if (a > 0.0) err += cfg.tiers[k].density * std::log2(1.0 + g) * r.coverage.error / a;
                }
                return Row{x, r.efficiency, err / r.total_power, r.coverage.converged, std::nullopt};
            });
            const Metric m = metric_for(opts.mode);
            b.add_mc(cfg, std::nullopt, [&cfg, c, i, th_db, m](std::span<const DropResult> drops,
                                                                std::vector<Curve>& out) {
                out[c].rows[i].monte_carlo = empirical_efficiency(cfg, drops, db_to_linear(th_db), m);
            });
        }
    }
}

void assoc_vs_bias(Builder& b, const Scenario& sc) {
    const auto bias = number_list(sc, "bias_db");
    const std::size_t k_all = tier_count(b.base());
    const auto tiers = tier_list(sc, "bias_tiers", k_all);
    std::size_t first = 0;
    for (std::size_t k = 0; k < k_all; ++k) {
        const std::size_t c = b.add_curve(fmt::format("assoc_tier{}", k + 1), bias);
        if (k == 0) first = c;
    }
    for (std::size_t i = 0; i < bias.size(); ++i) {
        const NetworkConfig& cfg = b.config(with_bias(b.base(), tiers, bias[i]));
        const Tolerance tol = sc.options.outer;
        const double x = bias[i];
        for (std::size_t k = 0; k < k_all; ++k) {
            b.add_job(first + k, i, [&cfg, tol, x, k] {
                QuadratureResult q;
                for (LinkState s : kLinkStates) q += association_integral(cfg, k, s, tol);
                return Row{x, q.value, q.error, q.converged, std::nullopt};
            });
        }
        b.add_mc(cfg, std::nullopt, [first, i, k_all](std::span<const DropResult> drops, std::vector<Curve>& out) {
            for (std::size_t k = 0; k < k_all; ++k) {
                std::size_t hits = 0;
                for (const DropResult& d : drops) hits += d.tier == static_cast<int>(k);
                out[first + k].rows[i].monte_carlo = proportion(hits, drops.size());
            }
        });
    }
}

void hybrid_bias(Builder& b, const Scenario& sc) {
    const auto th = number_list(sc, "threshold_db");
    const auto tiers = tier_list(sc, "bias_tiers", tier_count(b.base()));
    CoverageOptions opts = sc.options;
    opts.mode = CoverageMode::Hybrid;
    for (double bias : number_list(sc, "bias_db")) {
        const NetworkConfig& cfg = b.config(with_bias(b.base(), tiers, bias));
        if (!cfg.is_hybrid()) throw ConfigError("HYBRID_BIAS needs tier 1 in the microwave band");
        threshold_curve(b, cfg, "bias_" + label(bias) + "dB", th, opts);
    }
}

void hybrid_density(Builder& b, const Scenario& sc) {
    const auto th = number_list(sc, "threshold_db");
    CoverageOptions opts = sc.options;
    opts.mode = CoverageMode::Hybrid;
    for (double m : number_list(sc, "density_multiplier")) {
        if (!(m > 0)) throw ScenarioError("grid.density_multiplier must be positive");
        json doc = b.base();
        doc["tiers"][0]["density_per_m2"] = doc["tiers"][0]["density_per_m2"].get<double>() * m;
        const NetworkConfig& cfg = b.config(doc);
        if (!cfg.is_hybrid()) throw ConfigError("HYBRID_DENSITY needs tier 1 in the microwave band");
        threshold_curve(b, cfg, "lambda1_x" + label(m), th, opts);
    }
}

std::string hex64(std::uint64_t v) { return fmt::format("{:016x}", v); }

}  // namespace

const char* to_string(Experiment e) {
    for (const auto& x : kExperiments) {
        if (x.e == e) return x.name;
    }
    return "?";
}

Experiment parse_experiment(const std::string& s) {
    for (const auto& x : kExperiments) {
        if (s == x.name) return x.e;
    }
    throw ScenarioError("unknown experiment \"" + s + "\"");
}

Scenario parse_scenario(const json& doc, const fs::path& base_dir) {
    if (!doc.is_object()) throw ScenarioError("scenario must be a JSON object");
    Scenario sc;
    try {
        sc.name = doc.at("name").get<std::string>();
        sc.config_path = base_dir / doc.at("config").get<std::string>();
        sc.experiment = parse_experiment(doc.at("experiment").get<std::string>());
        sc.grid = doc.value("grid", json::object());
        sc.output_dir = base_dir / doc.value("output_dir", "out/" + sc.name);
        if (doc.contains("mode")) sc.options.mode = parse_coverage_mode(doc["mode"].get<std::string>());
        if (doc.contains("exclusion_zone")) {
            sc.options.exclusion = parse_exclusion_zone(doc["exclusion_zone"].get<std::string>());
        }
        if (doc.contains("tolerances")) {
            const json& t = doc["tolerances"];
            if (t.contains("outer")) sc.options.outer = parse_tolerance(t["outer"], sc.options.outer);
            if (t.contains("inner")) sc.options.inner = parse_tolerance(t["inner"], sc.options.inner);
        }
        sc.workers = doc.value("workers", 0u);
        if (doc.contains("monte_carlo") && !doc["monte_carlo"].is_null()) {
            const json& m = doc["monte_carlo"];
            MonteCarloSpec mc;
            mc.drops = m.value("drops", mc.drops);
            mc.seed = m.value("seed", mc.seed);
            mc.chunks = m.value("chunks", mc.chunks);
            if (mc.drops == 0 || mc.chunks == 0) throw ScenarioError("monte_carlo.drops and chunks must be positive");
            sc.monte_carlo = mc;
        }
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("scenario: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(e.what());
    }
    if (sc.name.empty() || sc.name.find_first_of("/\\") != std::string::npos) {
        throw ScenarioError("scenario name must be a non-empty file-name-safe string");
    }
    return sc;
}

Scenario load_scenario(const fs::path& path) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw ScenarioError(path.string() + ": " + e.what());
    }
    return parse_scenario(doc, path.parent_path());
}

std::vector<Curve> evaluate(const Scenario& sc) {
    Builder b(sc);
    switch (sc.experiment) {
    case Experiment::SinrVsSnr:
        sinr_vs_snr(b, sc);
        break;
    case Experiment::GainSweep:
        gain_sweep(b, sc);
        break;
    case Experiment::BallParams:
        ball_params(b, sc);
        break;
    case Experiment::BiasSweep:
        bias_sweep(b, sc);
        break;
    case Experiment::BeamError:
        beam_error(b, sc);
        break;
    case Experiment::Rate:
        rate(b, sc);
        break;
    case Experiment::Energy:
        energy(b, sc);
        break;
    case Experiment::AssocVsBias:
        assoc_vs_bias(b, sc);
        break;
    case Experiment::HybridBias:
        hybrid_bias(b, sc);
        break;
    case Experiment::HybridDensity:
        hybrid_density(b, sc);
        break;
    }
    return b.finish();
}

std::string format_csv(const Curve& curve) {
    const bool mc = std::any_of(curve.rows.begin(), curve.rows.end(), [](const Row& r) { return r.monte_carlo.has_value(); });
    std::string out = mc ? "x,analytic,error,converged,monte_carlo,mc_stderr\n" : "x,analytic,error,converged\n";
    for (const Row& r : curve.rows) {
        const bool ok = r.converged && std::isfinite(r.analytic);
        out += fmt::format("{:.10g},{:.12g},{:.3e},{}", r.x, r.analytic, r.error, ok ? 1 : 0);
        if (mc) {
            if (r.monte_carlo) {
                out += fmt::format(",{:.12g},{:.6g}", r.monte_carlo->value, r.monte_carlo->se);
            } else {
                out += ",,";
            }
        }
        out += '\n';
    }
    return out;
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

RunReport run(const Scenario& sc) {
    const auto start = std::chrono::steady_clock::now();
    RunReport report;
    report.curves = evaluate(sc);

    std::error_code ec;
    fs::create_directories(sc.output_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + sc.output_dir.string() + ": " + ec.message());

    json files = json::array();
    for (const Curve& c : report.curves) {
        for (const Row& r : c.rows) {
            if (!r.converged || !std::isfinite(r.analytic)) ++report.flagged_rows;
        }
        const fs::path p = sc.output_dir / (c.name + ".csv");
        std::ofstream f(p, std::ios::binary);
        f << format_csv(c);
        if (!f) throw ConfigError("cannot write " + p.string());
        report.files.push_back(p);
        files.push_back(p.filename().string());
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const std::string config_bytes = read_text_file(sc.config_path);
    json manifest = {
        {"scenario", sc.name},
        {"experiment", to_string(sc.experiment)},
        {"config", sc.config_path.string()},
        {"config_hash", "fnv1a64:" + hex64(fnv1a(config_bytes))},
        {"grid", sc.grid},
        {"mode", to_string(sc.options.mode)},
        {"exclusion_zone", to_string(sc.options.exclusion)},
        {"tolerances", {{"outer", tolerance_json(sc.options.outer)}, {"inner", tolerance_json(sc.options.inner)}}},
        {"curves", files},
        {"flagged_rows", report.flagged_rows},
        {"wall_time_s", report.wall_seconds},
    };
    if (sc.monte_carlo) {
        manifest["monte_carlo"] = {{"drops", sc.monte_carlo->drops}, {"chunks", sc.monte_carlo->chunks}};
        manifest["seed"] = sc.monte_carlo->seed;
    } else {
        manifest["monte_carlo"] = nullptr;
        manifest["seed"] = nullptr;
    }
    std::ofstream m(sc.output_dir / "manifest.json", std::ios::binary);
    m << manifest.dump(2) << '\n';
    if (!m) throw ConfigError("cannot write manifest.json");
    report.files.push_back(sc.output_dir / "manifest.json");
    return report;
}

}  // namespace hetnet::cli
