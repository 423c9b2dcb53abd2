#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tenderbake/node.hpp"

namespace tenderbake {

enum class Strategy : std::uint8_t { Silent, Equivocator, DoubleVoter, StaleSpammer, FutureLiar };

const char* to_string(Strategy s);
std::optional<Strategy> strategy_from_string(const std::string& name);

struct ProcessSpec {
  ProcessId id;
  std::optional<Strategy> byzantine;  // empty for correct processes
  Time start = 0;                     // virtual time the process starts
  bool isolated_until_gst = false;    // every message to or from it is lost before GST

  bool correct() const { return !byzantine.has_value(); }
  friend bool operator==(const ProcessSpec&, const ProcessSpec&) = default;
};

inline constexpr std::uint32_t kPpm = 1'000'000;

struct SimConfig {
  std::uint64_t seed = 1;
  Time gst = 0;             // tau
  Time delta = 10'000;      // post-GST delivery bound
  Time rho = 0;             // post-GST clock skew bound
  Time delta_err = 0;       // pre-GST clock error bound
  std::uint32_t loss_ppm = 0;  // pre-GST drop probability, parts per million
  Time horizon = 60'000'000;
  Level target_level = 10;  // stop once every correct process decided this many levels
  std::vector<ProcessSpec> processes;
  ProtocolParams protocol;

  // Throws ConfigError naming the violated invariant.
  void validate() const;
  std::vector<ProcessId> correct_ids() const;
  const ProcessSpec* find(ProcessId id) const;
};

}  // namespace tenderbake
