#include "tenderbake/synchronizer.hpp"

#include "tenderbake/errors.hpp"

namespace tenderbake {

namespace {

constexpr Time kMaxPhase = Time{1} << 50;

}  // namespace

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::Propose:
      return "PROPOSE";
    case Phase::Preendorse:
      return "PREENDORSE";
    case Phase::Endorse:
      return "ENDORSE";
  }
  return "UNKNOWN";
}

DurationFn::DurationFn(DurationParams params) : params_(params) {
  if (params_.base < 1) throw ConfigError("durations: base must be >= 1");
  if (params_.growth_den < 1 || params_.growth_num <= params_.growth_den) {
    throw ConfigError("durations: growth factor must be > 1");
  }
  if (params_.cap_round < 1 || params_.cap_round > 64) throw ConfigError("durations: cap_round must be in [1, 64]");
  if (params_.linear_step < 1) throw ConfigError("durations: linear_step must be >= 1");

  geometric_.reserve(static_cast<std::size_t>(params_.cap_round));
  geometric_.push_back(params_.base);
  for (Round r = 2; r <= params_.cap_round; ++r) {
    Time prev = geometric_.back();
    Time grown = prev / params_.growth_den * params_.growth_num +
                 prev % params_.growth_den * params_.growth_num / params_.growth_den;
    if (grown <= prev) grown = prev + 1;
    if (grown > kMaxPhase) throw ConfigError("durations: phase duration overflows at cap_round");
    geometric_.push_back(grown);
  }
  geometric_prefix_.assign(geometric_.size() + 1, 0);
  for (std::size_t i = 0; i < geometric_.size(); ++i) geometric_prefix_[i + 1] = geometric_prefix_[i] + geometric_[i];
}

Time DurationFn::phase(Round r) const {
  if (r < 1) throw Error("durations: round must be >= 1");
  if (r <= params_.cap_round) return geometric_[static_cast<std::size_t>(r - 1)];
  return geometric_.back() + (r - params_.cap_round) * params_.linear_step;
}

Time DurationFn::rounds_total(Round r) const {
  if (r <= 0) return 0;
  const Round cap = params_.cap_round;
  if (r <= cap) return kPhases * geometric_prefix_[static_cast<std::size_t>(r)];
  const Time extra = r - cap;
  const Time linear = extra * geometric_.back() + params_.linear_step * extra * (extra + 1) / 2;
  return kPhases * (geometric_prefix_.back() + linear);
}

Time level_start(const Chain& chain, const DurationFn& durations, Time t0) {
  Time t = t0;
  for (Level l = 1; l < chain.length(); ++l) t += durations.rounds_total(chain.at(l).header.round);
  return t;
}

SyncResult synchronize_from(Time start, Time now, const DurationFn& durations) {
  if (now < start) {
    throw ClockBeforeLevelStart("synchronize: local time " + std::to_string(now) + " precedes level start " +
                                std::to_string(start));
  }
  Time t = start;
  Round r = 1;
  while (t + durations.round(r) <= now) {
    t += durations.round(r);
    ++r;
  }
  return {r, now - t};
}

SyncResult synchronize(const Chain& chain, Time now, const DurationFn& durations, Time t0) {
  return synchronize_from(level_start(chain, durations, t0), now, durations);
}

PhasePosition next_phase(Round round, Time round_offset, const DurationFn& durations) {
  const Time len = durations.phase(round);
  const Time i = round_offset / len;
  if (round_offset < 0 || i >= kPhases) throw Error("next_phase: offset outside the round");
  return {static_cast<Phase>(i), round_offset - i * len};
}

Time round_start_offset(const DurationFn& durations, Round r) {
  if (r < 1) throw Error("round_start_offset: round must be >= 1");
  return durations.rounds_total(r - 1);
}

Round delta_inv(const DurationFn& durations, Time td) {
  if (td < 0) throw Error("delta_inv: negative time difference");
  Round r = 1;
  Time s = 0;
  while (s + durations.round(r) <= td) {
    s += durations.round(r);
    ++r;
  }
  return r;
}

}  // namespace tenderbake
