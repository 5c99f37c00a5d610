#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "platoon/model.hpp"
#include "platoon/region.hpp"

namespace platoon {

/// A parsed configuration file. A file may describe a platoon, an analysis
/// template, or both.
struct LoadedConfig {
    std::optional<ValidatedConfig> platoon;
    std::optional<RegionTemplate> analysis;
    /// Vehicles as written in the file. Differs from the validated platoon
    /// only when `platoon.clip_depth` truncated some m_i to i.
    std::vector<VehicleParams> declared_vehicles;
};

/// Parses YAML text. `base_dir` resolves relative paths (the leader CSV).
/// Overrides are `dotted.key=value` strings applied before validation, e.g.
/// `platoon.D=0` or `vehicles.3.h=0.5`. Throws ParseError (with the line),
/// UnknownKey, or any validate_platoon error.
LoadedConfig parse_config_text(std::string_view text, const std::vector<std::string>& overrides = {},
                               const std::filesystem::path& base_dir = {});

LoadedConfig parse_config(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides = {});

}  // namespace platoon
