#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tenderbake/trace.hpp"

namespace tenderbake {

enum class Outcome : std::uint8_t { Pass, Fail, Inconclusive };

const char* to_string(Outcome o);

struct Verdict {
  std::string property;
  Outcome outcome = Outcome::Pass;
  // Index of the first offending record (Fail only).
  std::optional<std::size_t> counterexample;
  std::string detail;

  bool passed() const { return outcome == Outcome::Pass; }
};

// Safety oracles. Each inspects records of correct processes only, except
// QC uniqueness, which also counts certificates carried by adversaries.
Verdict check_agreement(const Trace& trace);
Verdict check_validity(const Trace& trace);
Verdict check_vote_once(const Trace& trace);
Verdict check_qc_uniqueness(const Trace& trace);
Verdict check_buffer_bound(const Trace& trace);

// Largest buffer size reported by any correct process.
std::size_t buffer_high_water(const Trace& trace);

// Every correct baker of every level up to the target decides that level at a
// round <= max_round. Inconclusive if the run stopped before the target.
Verdict check_decision_rounds(const Trace& trace, Round max_round);
// Decision by the end of round sync_round + f + 1 (f from the config).
Verdict check_termination(const Trace& trace, Round sync_round);

// Bounded-horizon progress: pass when every correct process reached the
// target level; fail when a correct process decided nothing during a whole
// checkpoint window that starts after the recovery grace period; otherwise
// inconclusive.
Verdict check_progress(const Trace& trace);

struct RecoveryReport {
  Level level_tau = 0;     // highest decided level of a correct process at GST
  Time level_start = 0;    // start of level level_tau + 1
  Round r = 1;
  Round r_prime = 1;
  Time pull_delay = 0;     // modelled as 2 * delta
  Time bound = 0;
  std::optional<Time> tau_rt;  // first round start >= GST with every correct process synchronized
  std::optional<Time> measured;

  bool pass() const { return measured && *measured <= bound; }
};

RecoveryReport recovery_bound(const Trace& trace);
Verdict check_recovery(const Trace& trace);

// Named properties for the CLI: agreement, validity, vote_once,
// qc_uniqueness, buffer_bound, termination, progress, recovery.
const std::vector<std::string>& property_names();
const std::vector<std::string>& safety_property_names();
// Throws ConfigError for an unknown name.
Verdict run_property(const std::string& name, const Trace& trace);

}  // namespace tenderbake
