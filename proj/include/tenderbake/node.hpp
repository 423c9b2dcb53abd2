#pragma once

#include <memory>
#include <optional>
#include <variant>

#include "tenderbake/chain.hpp"
#include "tenderbake/consensus.hpp"
#include "tenderbake/effects.hpp"
#include "tenderbake/synchronizer.hpp"
#include "tenderbake/types.hpp"

namespace tenderbake {

// Protocol parameters shared by every process of a run.
struct ProtocolParams {
  CommitteeConfig committee;
  DurationFn durations{DurationParams{}};
  Time pull_interval = 1'000'000;
  Genesis genesis;
};

namespace input {

struct Start {};

struct TimerFired {
  TimerKind kind = TimerKind::PhaseEnd;
  std::uint64_t token = 0;
};

struct NewMessage {
  Message msg;
};

struct NewChain {
  ProcessId from;
  Chain chain;
  std::optional<ProposalOrCertificate> poc;
};

struct PullRequestFrom {
  ProcessId peer;
};

}  // namespace input

using InputEvent =
    std::variant<input::Start, input::TimerFired, input::NewMessage, input::NewChain, input::PullRequestFrom>;

class ProcessNode {
 public:
  // `committees` may be shared between nodes of one (single-threaded) run.
  ProcessNode(ProcessId id, const ProtocolParams& params, std::shared_ptr<CommitteeCache> committees);

  Effects apply(const InputEvent& event, Time local_time);

  ProcessId id() const { return id_; }
  bool started() const { return started_; }
  const Chain& chain() const { return chain_; }
  Level level() const { return chain_.length(); }
  const Digest& head_hash() const { return chain_.head_hash(); }
  const std::optional<QC>& head_certificate() const { return head_certificate_; }
  const InstanceState& instance() const { return instance_; }
  // False while waiting out an "ahead" condition.
  bool in_phase() const { return in_phase_; }
  bool is_baker() const;

  // The view handed to the consensus functions at the current level.
  LevelView view() const;

 private:
  void start(Effects& out, Time now);
  void on_timer(const input::TimerFired& t, Effects& out, Time now);
  void on_message(const Message& msg, Effects& out);
  void on_chain(const input::NewChain& c, Effects& out, Time now);
  void answer_pull(ProcessId peer, Effects& out) const;

  void update_state(Chain chain, std::optional<QC> certificate);
  void enter_instance(Effects& out, Time now);
  void enter_phase(Effects& out, Time phase_offset);
  void end_of_endorse(Effects& out, Time now);
  void schedule_phase_timer(Effects& out, TimerKind kind, Time delay);
  void request_pull(Effects& out);
  void stash_future(const Message& msg);
  void replay_stash();

  ProcessId id_;
  const ProtocolParams* params_;
  std::shared_ptr<CommitteeCache> committees_;

  bool started_ = false;
  Chain chain_;
  std::optional<QC> head_certificate_;
  Time level_start_ = 0;
  InstanceState instance_;
  bool in_phase_ = false;
  std::uint64_t phase_token_ = 0;
  std::uint64_t next_nonce_ = 0;
  // Last (level, round) for which a message triggered a pull.
  std::pair<Level, Round> last_triggered_pull_{0, 0};
  // One proposal for the next level, held until this process gets there. A
  // faster clock lets the next proposer start before we finish the level.
  std::optional<Message> stash_;
  std::size_t reported_buffer_ = 0;
};

}  // namespace tenderbake
