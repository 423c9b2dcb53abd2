#pragma once

#include <deque>
#include <memory>
#include <random>
#include <set>
#include <vector>

#include "tenderbake/config.hpp"
#include "tenderbake/node.hpp"

namespace tenderbake {

// A Byzantine process: an honest shadow node tracks the protocol state and
// the strategy rewrites what the shadow would send. Only the network-facing
// effects (sends, pulls, timers) are returned.
class ByzantineProcess {
 public:
  ByzantineProcess(ProcessId id, Strategy strategy, const ProtocolParams& params,
                   std::shared_ptr<CommitteeCache> committees, std::uint64_t seed);

  Effects apply(const InputEvent& event, Time local_time);

  ProcessId id() const { return shadow_.id(); }
  Strategy strategy() const { return strategy_; }
  const ProcessNode& shadow() const { return shadow_; }

 private:
  void equivocate(const Message& proposal, Effects& out);
  void double_vote(const Message& proposal, Effects& out);
  void spam_stale(Effects& out);
  void lie_about_future(Effects& out);
  SendChain garbage_chain(ProcessId to);
  void remember(const Message& msg);

  ProcessNode shadow_;
  Strategy strategy_;
  const ProtocolParams* params_;
  std::mt19937_64 rng_;
  std::uint64_t fake_nonce_ = std::uint64_t{1} << 40;
  std::set<std::pair<Round, Digest>> double_voted_;
  std::deque<Message> history_;
};

}  // namespace tenderbake
