#include "tenderbake/config.hpp"

#include <algorithm>

#include "tenderbake/errors.hpp"

namespace tenderbake {

namespace {

constexpr Strategy kStrategies[] = {Strategy::Silent, Strategy::Equivocator, Strategy::DoubleVoter,
                                    Strategy::StaleSpammer, Strategy::FutureLiar};

}  // namespace

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Silent:
      return "Silent";
    case Strategy::Equivocator:
      return "Equivocator";
    case Strategy::DoubleVoter:
      return "DoubleVoter";
    case Strategy::StaleSpammer:
      return "StaleSpammer";
    case Strategy::FutureLiar:
      return "FutureLiar";
  }
  return "Unknown";
}

std::optional<Strategy> strategy_from_string(const std::string& name) {
  for (Strategy s : kStrategies) {
    if (name == to_string(s)) return s;
  }
  return std::nullopt;
}

void SimConfig::validate() const {
  const CommitteeConfig& cc = protocol.committee;
  cc.validate();
  if (delta <= 0) throw ConfigError("sim: delta must be > 0");
  if (gst < 0) throw ConfigError("sim: gst must be >= 0");
  if (rho < 0) throw ConfigError("sim: rho must be >= 0");
  if (delta_err < 0) throw ConfigError("sim: delta_err must be >= 0");
  if (loss_ppm > kPpm) throw ConfigError("sim: loss rate must be in [0, 1]");
  if (horizon <= 0) throw ConfigError("sim: horizon must be > 0");
  if (target_level < 1) throw ConfigError("sim: target_level must be >= 1");
  if (protocol.pull_interval <= 0) throw ConfigError("protocol: pull interval must be > 0");
  if (protocol.genesis.k != cc.k) throw ConfigError("protocol: genesis k differs from committee k");
  if (protocol.durations.phase(1) <= 2 * rho) {
    throw ConfigError("protocol: Δ'(1) ≤ 2ρ (phase(1) = " + std::to_string(protocol.durations.phase(1)) +
                      ", rho = " + std::to_string(rho) + ")");
  }

  std::vector<ProcessId> ids;
  int byzantine = 0;
  for (const auto& p : processes) {
    ids.push_back(p.id);
    if (!p.correct()) ++byzantine;
    if (p.start < 0) throw ConfigError("sim: process start time must be >= 0");
  }
  std::vector<ProcessId> universe = cc.universe;
  std::sort(ids.begin(), ids.end());
  std::sort(universe.begin(), universe.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw ConfigError("sim: duplicate process id");
  if (ids != universe) throw ConfigError("sim: processes must be exactly the committee universe");
  if (byzantine > cc.f) {
    throw ConfigError("sim: " + std::to_string(byzantine) + " Byzantine processes exceed f = " + std::to_string(cc.f));
  }
}

std::vector<ProcessId> SimConfig::correct_ids() const {
  std::vector<ProcessId> out;
  for (const auto& p : processes) {
    if (p.correct()) out.push_back(p.id);
  }
  return out;
}

const ProcessSpec* SimConfig::find(ProcessId id) const {
  for (const auto& p : processes) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

}  // namespace tenderbake
