#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "halfvol/minmax.hpp"

namespace halfvol {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct RunManifest {
  nlohmann::json data;
  bool checks_passed = true;
  std::vector<std::string> outputs;
};

/// Fills defaults and rejects unknown keys, wrong types, and out-of-range
/// parameters (q must lie in (2, 11/5), resolutions must be powers of two).
nlohmann::json validate_config(const nlohmann::json& config);

/// Executes the subcommand named in config["command"]
/// (verify-potential | solve | width | weyl | retract | diagnose), writing
/// outputs and a manifest atomically under config["out"].
RunManifest run_command(const nlohmann::json& config);

/// Shortest round-trip decimal formatting (deterministic across runs).
std::string format_double(double v);

/// CSV for width estimates: header
/// p,eps,constrained,value,refined_value,lambda,index_estimate,seed.
std::string spectrum_csv(const std::vector<WidthEstimate>& rows);

/// Log-log scatter of the spectrum with the fitted power law.
std::string spectrum_svg(const SpectrumTable& table, const WeylFit& fit,
                         int p_min, int p_max);

}  // namespace halfvol
