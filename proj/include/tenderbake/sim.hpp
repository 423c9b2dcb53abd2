#pragma once

#include <vector>

#include "tenderbake/config.hpp"
#include "tenderbake/trace.hpp"

namespace tenderbake {

// Runs one simulation to the horizon or until every correct process holds a
// chain longer than target_level. Throws ConfigError or HarnessBug.
Trace run_sim(const SimConfig& cfg);

// Pre-GST and post-GST clock offsets the run assigns to each process.
struct ClockOffsets {
  Time before_gst = 0;
  Time after_gst = 0;
};
std::vector<ClockOffsets> sample_clock_offsets(const SimConfig& cfg);

}  // namespace tenderbake
