#pragma once

// Run-config documents (JSON) and the experiment presets.
//
// Keys: kind, N, phys_n, M, delta, rho, K, perturbation, times, seed,
// epsilon, m, viscosity ("fixed" | "tadmor"), cfl, dt_max, dt_fixed,
// probes ([[x1, x2], ...]), lattice, retain_stride, tracer.
// Required: kind, N, times. Unknown keys are rejected.

#include "mvs/ensemble.hpp"

#include <json.hpp>
#include <string>
#include <vector>

namespace mvs {

/// Throws ConfigError whose message starts with the offending key.
EnsembleConfig parse_config(const nlohmann::json& doc);
EnsembleConfig parse_config_text(const std::string& text);
EnsembleConfig load_config(const std::string& path);

/// Fully explicit document; parse_config(config_to_json(c)) == c.
nlohmann::json config_to_json(const EnsembleConfig& cfg);

enum class PresetScale { desk, paper };

inline constexpr int kDeskMaxN = 128;
inline constexpr int kDeskMaxM = 50;

struct PresetEntry {
    std::string label;  // file stem, e.g. "sheet-ensemble_N128"
    EnsembleConfig config;
};

std::vector<std::string> preset_names();
/// Throws ConfigError listing the known presets for an unknown name.
std::vector<PresetEntry> make_preset(const std::string& name, PresetScale scale);
PresetScale parse_preset_scale(const std::string& s);

}  // namespace mvs
