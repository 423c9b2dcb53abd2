#pragma once

#include <map>
#include <string>
#include <vector>

#include "tenderbake/config.hpp"

namespace tenderbake {

// Scenario files are flat key/value text with [sim], [protocol],
// [adversary], [oracles] and [sweep] sections. Keys are stored as
// "section.key". docs/scenario_format.md lists the accepted keys.
struct Scenario {
  std::string name;
  std::map<std::string, std::string> values;
  std::vector<std::string> properties;
  Round sync_round = 1;
  std::vector<std::uint64_t> seeds;
  // Sweep grid: "section.key" -> alternatives. Expanded as a cartesian product.
  std::map<std::string, std::vector<std::string>> grid;
};

// One grid point: overrides applied on top of the scenario values.
struct GridPoint {
  std::map<std::string, std::string> overrides;
  std::string label() const;
};

// Throws ConfigError (with the offending line or key) on malformed input or
// when the base configuration or any grid point violates a config invariant.
Scenario parse_scenario(const std::string& text, const std::string& name = "scenario");
Scenario load_scenario(const std::string& path);

std::vector<GridPoint> grid_points(const Scenario& s);

SimConfig build_config(const Scenario& s, const GridPoint& point, std::uint64_t seed);
SimConfig build_config(const Scenario& s, std::uint64_t seed);

// "1..200", "7", "1,5,9" or "" (empty). Throws ConfigError.
std::vector<std::uint64_t> parse_seeds(const std::string& text);
// Decimal probability in [0,1] with up to six fractional digits, as ppm.
std::uint32_t parse_probability(const std::string& text);

}  // namespace tenderbake
