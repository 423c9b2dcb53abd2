#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tenderbake/metrics.hpp"
#include "tenderbake/scenario.hpp"
#include "tenderbake/verifier.hpp"

namespace tenderbake {

struct RunResult {
  std::string point;  // grid point label
  std::uint64_t seed = 0;
  std::vector<Verdict> verdicts;
  Metrics metrics;
  std::string error;  // harness error, empty if the run completed
};

struct SweepOptions {
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> properties;
  unsigned jobs = 0;  // 0: hardware concurrency
};

// Runs the selected oracles on one trace. "termination" uses the scenario's
// sync round.
std::vector<Verdict> evaluate(const Trace& trace, const std::vector<std::string>& properties, Round sync_round);

RunResult run_one(const Scenario& s, const GridPoint& point, std::uint64_t seed,
                  const std::vector<std::string>& properties);

// Every grid point x every seed, in that order regardless of thread timing.
std::vector<RunResult> run_sweep(const Scenario& s, const SweepOptions& options);

// 0 all pass, 1 any failure or harness error, 3 otherwise inconclusive.
int exit_code(const std::vector<Verdict>& verdicts);
int exit_code(const std::vector<RunResult>& results);

// Per grid point and property: pass / fail / inconclusive counts, plus
// metric ranges.
std::string sweep_table(const std::vector<RunResult>& results, const std::vector<std::string>& properties);

// Runs tasks [0, count) on `jobs` threads.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& task);

}  // namespace tenderbake
