#include "hetnet/config_io.hpp"

#include <fstream>
#include <sstream>

namespace hetnet {

using nlohmann::json;

namespace {

double require_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw ConfigError(where + key + " is required");
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
        throw ConfigError(where + key + " must be a number");
    }
    return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
    return obj.contains(key) ? require_number(obj, key, where) : fallback;
}

AntennaPattern parse_pattern(const json& obj, const std::string& where) {
    AntennaPattern p;
    p.main_lobe = db_to_linear(require_number(obj, "main_db", where));
    p.side_lobe = db_to_linear(require_number(obj, "side_db", where));
    p.beam_width = require_number(obj, "beamwidth_deg", where) * kPi / 180.0;
    return p;
}

Band parse_band(const json& tier, const std::string& where) {
    if (!tier.contains("band")) {
        return Band::MmWave;
    }
    const std::string s = tier.at("band").get<std::string>();
    if (s == "mmwave" || s == "MMWAVE") return Band::MmWave;
    if (s == "microwave" || s == "MICROWAVE") return Band::Microwave;
    throw ConfigError(where + "band must be \"mmwave\" or \"microwave\" (got \"" + s + "\")");
}

}  // namespace

NetworkConfig parse_network_config(const json& doc) {
    if (!doc.is_object()) {
        throw ConfigError("configuration root must be a JSON object");
    }
    NetworkConfig cfg;
    cfg.ue_density = require_number(doc, "ue_density_per_m2", "");
    cfg.bandwidth = require_number(doc, "bandwidth_hz", "");
    const double carrier = require_number(doc, "carrier_hz", "");
    const double psd = number_or(doc, "noise_psd_dbm_hz", -174.0, "");

    if (!doc.contains("antenna")) {
        throw ConfigError("antenna is required");
    }
    cfg.pattern = parse_pattern(doc.at("antenna"), "antenna.");
    if (doc.contains("mu_antenna")) {
        cfg.mu_pattern = parse_pattern(doc.at("mu_antenna"), "mu_antenna.");
    }
    if (!doc.contains("fading")) {
        throw ConfigError("fading is required");
    }
    const json& fading = doc.at("fading");
    for (const char* key : {"n_los", "n_nlos"}) {
        if (!fading.contains(key) || !fading.at(key).is_number_integer()) {
            throw ConfigError(std::string("fading.") + key + " must be an integer");
        }
    }
    cfg.fading.n_los = fading.at("n_los").get<int>();
    cfg.fading.n_nlos = fading.at("n_nlos").get<int>();

    if (!doc.contains("tiers") || !doc.at("tiers").is_array()) {
        throw ConfigError("tiers must be an array");
    }
    const json& tiers = doc.at("tiers");
    for (std::size_t k = 0; k < tiers.size(); ++k) {
        const json& jt = tiers[k];
        const std::string where = "tier[" + std::to_string(k + 1) + "].";
        TierConfig t;
        t.band = parse_band(jt, where);
        t.density = require_number(jt, "density_per_m2", where);
        t.tx_power = dbm_to_watts(require_number(jt, "tx_power_dbm", where));
        t.bias = db_to_linear(number_or(jt, "bias_db", 0.0, where));
        t.static_power = require_number(jt, "static_power_w", where);
        t.amp_slope = require_number(jt, "amp_slope", where);
        t.bandwidth = number_or(jt, "bandwidth_hz", cfg.bandwidth, where);
        const double tier_carrier = number_or(jt, "carrier_hz", carrier, where);
        t.noise_power = noise_power_watts(psd, t.bandwidth, require_number(jt, "noise_figure_db", where));

        const AntennaPattern& bs_pattern =
            (t.band == Band::Microwave && cfg.mu_pattern) ? *cfg.mu_pattern : cfg.pattern;
        t.serving_gain = bs_pattern.main_lobe * cfg.pattern.main_lobe;

        if (!jt.contains("balls") || !jt.at("balls").is_array()) {
            throw ConfigError(where + "balls must be an array");
        }
        const double fs = free_space_intercept(tier_carrier);
        const json& balls = jt.at("balls");
        for (std::size_t d = 0; d < balls.size(); ++d) {
            const json& jb = balls[d];
            const std::string bw = where + "balls[" + std::to_string(d + 1) + "].";
            BallSpec b;
            b.radius = require_number(jb, "radius_m", bw);
            b.los_prob = require_number(jb, "los_prob", bw);
            b.alpha_los = require_number(jb, "alpha_los", bw);
            b.alpha_nlos = require_number(jb, "alpha_nlos", bw);
            b.kappa_los = jb.contains("kappa_los_db") ? db_to_linear(require_number(jb, "kappa_los_db", bw)) : fs;
            b.kappa_nlos = jb.contains("kappa_nlos_db") ? db_to_linear(require_number(jb, "kappa_nlos_db", bw)) : fs;
            t.balls.push_back(b);
        }
        cfg.tiers.push_back(std::move(t));
    }
    validate(cfg);
    return cfg;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

NetworkConfig load_network_config(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_network_config(doc);
}

}  // namespace hetnet
