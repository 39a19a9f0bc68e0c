// Built-in families and example scenes.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eigenflow {

// Family source text for ep2, ep2_plus_level, dp, spin, constant.
std::optional<std::string> preset_family(std::string_view name);

// Complete scene text (family, options, named paths, points, surfaces).
std::optional<std::string> preset_scene(std::string_view name);

std::vector<std::string> preset_names();

}  // namespace eigenflow
