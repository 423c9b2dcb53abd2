#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "tenderbake/chain.hpp"
#include "tenderbake/synchronizer.hpp"
#include "tenderbake/types.hpp"

namespace tenderbake {

enum class TimerKind : std::uint8_t { PhaseEnd = 0, Retry = 1, Pull = 2 };

const char* to_string(TimerKind kind);

// Outputs of a state transition. The first group asks the environment to act;
// the second group only reports what happened, for the trace.
struct Broadcast {
  Message msg;
};

struct SendTo {
  ProcessId to;
  Message msg;
};

struct PullRequest {};

struct ScheduleTimer {
  TimerKind kind = TimerKind::PhaseEnd;
  Time delay = 0;
  std::uint64_t token = 0;
};

struct SendChain {
  ProcessId to;
  Chain chain;
  std::optional<ProposalOrCertificate> poc;
};

struct Decided {
  Level level = 0;
  Round round = 0;
  Block block;
  QC certificate;
};

enum class ChainCause : std::uint8_t { Start = 0, Decide = 1, Adopt = 2, HeadSwap = 3 };

const char* to_string(ChainCause cause);

struct ChainUpdated {
  ChainCause cause = ChainCause::Start;
  Chain chain;
  std::optional<QC> certificate;
  // Head round before the update (HeadSwap only).
  Round old_head_round = 0;
};

struct PhaseEntered {
  Level level = 0;
  Round round = 0;
  Phase phase = Phase::Propose;
  Time phase_offset = 0;
  bool baker = false;
};

struct LockUpdated {
  Level level = 0;
  Round locked_round = 0;
  Digest value_hash;
};

struct BufferSize {
  std::size_t size = 0;
};

using Effect = std::variant<Broadcast, SendTo, PullRequest, ScheduleTimer, SendChain, Decided, ChainUpdated,
                            PhaseEntered, LockUpdated, BufferSize>;

using Effects = std::vector<Effect>;

}  // namespace tenderbake
