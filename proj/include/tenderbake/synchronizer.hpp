#pragma once

#include <vector>

#include "tenderbake/chain.hpp"
#include "tenderbake/types.hpp"

namespace tenderbake {

enum class Phase : std::uint8_t { Propose = 0, Preendorse = 1, Endorse = 2 };

inline constexpr int kPhases = 3;

const char* to_string(Phase phase);

// Phase duration schedule: grows geometrically (factor num/den, at least +1
// per round) up to cap_round, then linearly by linear_step per round.
struct DurationParams {
  Time base = 30'000;
  int growth_num = 3;
  int growth_den = 2;
  Round cap_round = 8;
  Time linear_step = 10'000;
};

class DurationFn {
 public:
  explicit DurationFn(DurationParams params);

  const DurationParams& params() const { return params_; }
  // Phase duration of round r.
  Time phase(Round r) const;
  // Round duration: kPhases times the phase duration.
  Time round(Round r) const { return kPhases * phase(r); }
  // Sum of round durations for rounds 1..r (0 for r <= 0).
  Time rounds_total(Round r) const;

 private:
  DurationParams params_;
  std::vector<Time> geometric_;           // phase(1..cap_round)
  std::vector<Time> geometric_prefix_;    // phase-duration prefix sums, index r
};

struct SyncResult {
  Round round = 1;
  Time offset = 0;

  friend bool operator==(const SyncResult&, const SyncResult&) = default;
};

struct PhasePosition {
  Phase phase = Phase::Propose;
  Time offset = 0;

  friend bool operator==(const PhasePosition&, const PhasePosition&) = default;
};

// Start time of the chain's current level: t0 plus, for every decided level
// 1..length-1, the durations of rounds 1..round(level). Genesis contributes 0.
Time level_start(const Chain& chain, const DurationFn& durations, Time t0);

// Round and in-round offset for a local time, given the level start.
// Throws ClockBeforeLevelStart if now < level_start.
SyncResult synchronize_from(Time level_start, Time now, const DurationFn& durations);
SyncResult synchronize(const Chain& chain, Time now, const DurationFn& durations, Time t0);

PhasePosition next_phase(Round round, Time round_offset, const DurationFn& durations);

// Offset of the start of round r within a level (s_1 = 0).
Time round_start_offset(const DurationFn& durations, Round r);

// The round r with s_r <= td < s_{r+1}.
Round delta_inv(const DurationFn& durations, Time td);

}  // namespace tenderbake
