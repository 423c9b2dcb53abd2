#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tenderbake/trace.hpp"

namespace tenderbake {

struct DecisionPoint {
  ProcessId p;
  Level level = 0;
  Round round = 0;
  Time t = 0;
};

struct Metrics {
  std::vector<DecisionPoint> decisions;
  std::size_t buffer_high_water = 0;
  std::map<std::string, std::uint64_t> sends_by_kind;
  std::uint64_t deliveries = 0;
  std::uint64_t drops_before_gst = 0;
  std::uint64_t pulls = 0;
  Round max_decision_round = 0;
  // Smallest final chain length - 1 over correct processes.
  Level min_decided_level = 0;
  std::optional<Time> recovery_time;
  Time recovery_bound = 0;
  Time end_time = 0;
  std::string stop_reason;
};

Metrics compute_metrics(const Trace& trace);
std::string metrics_to_json(const Metrics& m);

}  // namespace tenderbake
