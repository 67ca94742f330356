#pragma once

// Flat key=value configuration and the experiment presets.
//
// Config syntax: one `key = value` per line, `#` starts a comment. Optional
// power knobs (q, rho_bar, rho_max, epsilon) accept `auto`.

#include "mmra/simulator.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mmra {

/// Every recognised key, in echo order.
const std::vector<std::string>& config_keys();

/// Throws std::invalid_argument naming the key on unknown keys or bad values.
void apply_setting(SimParams& params, std::string_view key, std::string_view value);

SimParams parse_config_text(std::string_view text, SimParams base = {});

/// `base` overlaid with the file at `path` (if any), then with each
/// `key=value` override in order. The result is validated.
SimParams load_config(const std::optional<std::filesystem::path>& path,
                      std::span<const std::string> overrides, SimParams base = {});

/// Full effective configuration; parse_config_text(to_config_text(p)) == p.
std::string to_config_text(const SimParams& params);

bool same_params(const SimParams& a, const SimParams& b);

struct PresetSeries {
  Protocol protocol = Protocol::Acbpc;
  bool interference = true;
  double sigma_beta = 0.0;
};

struct ExperimentPreset {
  std::string name;
  SimParams base;
  std::vector<std::int64_t> k0_axis;
  std::vector<PresetSeries> series;
  bool bound_table = false;

  /// One SimParams per (series, K0) pair; series-major order. Point i gets
  /// seed base.seed + i.
  std::vector<SimParams> expand() const;
};

const std::vector<std::string>& preset_names();
/// Throws std::invalid_argument for unknown names.
ExperimentPreset make_preset(std::string_view name);

} // namespace mmra
