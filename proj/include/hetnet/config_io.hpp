#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "hetnet/core_model.hpp"

namespace hetnet {

/// Builds a validated NetworkConfig from the JSON scenario-file schema.
///
/// Powers are given in dBm, gains and bias in dB, the beam width in degrees.
/// Missing `kappa_los_db` / `kappa_nlos_db` default to the free-space loss at 1 m
/// for the tier's carrier. Noise is `noise_psd_dbm_hz + 10 log10(W) + noise_figure_db`.
/// Throws ConfigError on schema or invariant violations.
NetworkConfig parse_network_config(const nlohmann::json& doc);

NetworkConfig load_network_config(const std::filesystem::path& path);

/// Reads a whole file; throws ConfigError when it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace hetnet
