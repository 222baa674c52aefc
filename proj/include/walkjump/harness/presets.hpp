#pragma once

#include <string>
#include <vector>

#include "walkjump/harness/config.hpp"

namespace walkjump::harness {

struct PresetInfo {
  std::string name;
  std::string description;
};

std::vector<PresetInfo> list_presets();
// Raw config document; throws ConfigError for unknown names.
json preset_config(const std::string& name);

// Step-size and friction grids searched during tuning; the presets default
// to delta = 0.03, gamma delta = 0.05 instead.
const std::vector<double>& delta_search_grid();
const std::vector<double>& gamma_delta_search_grid();

}  // namespace walkjump::harness
