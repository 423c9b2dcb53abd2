#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "tenderbake/chain.hpp"
#include "tenderbake/effects.hpp"
#include "tenderbake/synchronizer.hpp"
#include "tenderbake/types.hpp"

namespace tenderbake {

// Single-shot state of one process at its current level.
struct InstanceState {
  Round round = 1;
  Phase phase = Phase::Propose;
  std::optional<Value> locked_value;
  Round locked_round = 0;
  std::optional<Value> endorsable_value;
  Round endorsable_round = 0;
  std::optional<QC> preendorsement_qc;
  // Proposals, preendorsements and endorsements for rounds round and round+1.
  std::vector<Message> messages;
};

// What the instance needs to know about the process's chain at its level.
struct LevelView {
  ProcessId self;
  Level level = 1;
  Digest head_hash;
  const Chain* chain = nullptr;
  const std::vector<ProcessId>* committee = nullptr;       // at level
  const std::vector<ProcessId>* prev_committee = nullptr;  // at level-1; null at level 1
  const std::optional<QC>* head_certificate = nullptr;
  int f = 1;

  int quorum() const { return 2 * f + 1; }
};

void init_instance(InstanceState& state);

// Upper bound on the message buffer size for committees of size n.
inline std::size_t buffer_bound(int n) { return static_cast<std::size_t>(4 * n + 2); }

enum class Intake : std::uint8_t {
  Buffered,    // stored in the buffer
  Consumed,    // valid certificate message: used, not stored
  Duplicate,   // same kind/sender/round already buffered
  Invalid,     // header matched but validation failed
  Ignored,     // wrong level, hash or round window
};

struct IntakeResult {
  Intake intake = Intake::Ignored;
  // The sender claims a future level or a different predecessor.
  bool suggests_behind = false;
};

IntakeResult handle_message(InstanceState& state, const Message& msg, const LevelView& view);

bool is_valid_message(const InstanceState& state, const Message& msg, const LevelView& view);

void update_endorsable(InstanceState& state, const Message& msg, const LevelView& view);

// Drops every buffered message not for the current round.
void filter_messages(InstanceState& state);

// Drops buffered messages whose predecessor hash is not the view's.
void drop_stale_hash(InstanceState& state, const LevelView& view);

// Buffered proposal for `round` (predecessor = view's head), if any.
const Message* proposal(const InstanceState& state, const LevelView& view, Round round);

// Assembles the (pre)endorsement certificate of the current round from the
// buffer; votes are only buffered if they match the round's proposal.
QC collect_votes(const InstanceState& state, const LevelView& view, MessageKind kind);

Effects propose_phase(InstanceState& state, const LevelView& view, std::uint64_t& next_nonce);
Effects preendorse_phase(InstanceState& state, const LevelView& view);
Effects endorse_phase(InstanceState& state, const LevelView& view);

// Observers follow the same phase schedule but never broadcast.
Effects observer_phase(InstanceState& state, const LevelView& view);

// Phase-entry action for a baker or an observer.
Effects run_phase(InstanceState& state, const LevelView& view, bool baker, std::uint64_t& next_nonce);

std::optional<std::pair<Block, QC>> get_decision(const InstanceState& state, const LevelView& view);

// Whether the same-length chain `incoming` offers a better head than `own`.
bool better_head(const InstanceState& state, const Chain& own, const Chain& incoming,
                 const ProposalOrCertificate& poc);

// Throws MalformedPoc for a proposal above level 1 without a certificate.
std::optional<QC> get_certificate(const ProposalOrCertificate& poc);

}  // namespace tenderbake
