#include <doctest.h>

#include "support.hpp"
#include "tenderbake/node.hpp"

using namespace tbtest;

namespace {

template <typename T>
std::vector<T> of(const Effects& effects) {
  std::vector<T> out;
  for (const auto& e : effects) {
    if (const auto* x = std::get_if<T>(&e)) out.push_back(*x);
  }
  return out;
}

struct Net {
  ProtocolParams params = protocol_params(1);
  std::shared_ptr<CommitteeCache> cache = std::make_shared<CommitteeCache>(params.committee);

  ProcessNode node(std::uint32_t id) { return ProcessNode(ProcessId{id}, params, cache); }
};

}  // namespace

TEST_CASE("events before Start are ignored") {
  Net net;
  ProcessNode p = net.node(2);
  CHECK(p.apply(input::TimerFired{TimerKind::PhaseEnd, 1}, 0).empty());
  CHECK_FALSE(p.started());
}

TEST_CASE("start: pull timer, initial chain, first phase") {
  Net net;
  ProcessNode p1 = net.node(1);
  const Effects out = p1.apply(input::Start{}, 0);

  const auto timers = of<ScheduleTimer>(out);
  REQUIRE(timers.size() == 2);
  CHECK(timers[0].kind == TimerKind::Pull);
  CHECK(timers[0].delay == net.params.pull_interval);
  CHECK(timers[1].kind == TimerKind::PhaseEnd);
  CHECK(timers[1].delay == net.params.durations.phase(1));

  const auto chains = of<ChainUpdated>(out);
  REQUIRE(chains.size() == 1);
  CHECK(chains[0].cause == ChainCause::Start);
  CHECK(chains[0].chain.length() == 1);

  const auto phases = of<PhaseEntered>(out);
  REQUIRE(phases.size() == 1);
  CHECK(phases[0].level == 1);
  CHECK(phases[0].round == 1);
  CHECK(phases[0].phase == Phase::Propose);
  CHECK(phases[0].baker);

  // Process 1 proposes at round 1 with fixed rotation.
  const auto sent = of<Broadcast>(out);
  REQUIRE(sent.size() == 1);
  CHECK(sent[0].msg.kind == MessageKind::Propose);
}

TEST_CASE("a late start joins mid-round at the right phase and offset") {
  Net net;
  ProcessNode p = net.node(3);
  const Time phase = net.params.durations.phase(1);
  const Time round1 = net.params.durations.round(1);
  const Effects out = p.apply(input::Start{}, round1 + phase + 7);
  const auto phases = of<PhaseEntered>(out);
  REQUIRE(phases.size() == 1);
  CHECK(phases[0].round == 2);
  CHECK(phases[0].phase == Phase::Propose);
  // Round 2 phases are longer than round 1 phases, so this is still PROPOSE.
  CHECK(phases[0].phase_offset == phase + 7);
}

TEST_CASE("stale phase timers are ignored, the pull timer repeats") {
  Net net;
  ProcessNode p = net.node(2);
  const Effects start = p.apply(input::Start{}, 0);
  const auto token = of<ScheduleTimer>(start)[1].token;
  CHECK(p.apply(input::TimerFired{TimerKind::PhaseEnd, token + 5}, 100).empty());

  const Effects pulled = p.apply(input::TimerFired{TimerKind::Pull, 0}, net.params.pull_interval);
  CHECK(of<PullRequest>(pulled).size() == 1);
  CHECK(of<ScheduleTimer>(pulled).at(0).kind == TimerKind::Pull);

  const Effects next = p.apply(input::TimerFired{TimerKind::PhaseEnd, token}, net.params.durations.phase(1));
  const auto phases = of<PhaseEntered>(next);
  REQUIRE(phases.size() == 1);
  CHECK(phases[0].phase == Phase::Preendorse);
}

TEST_CASE("a valid longer chain is adopted; an invalid one is not") {
  Net net;
  ProcessNode p = net.node(4);
  p.apply(input::Start{}, 0);
  const Chain longer = honest_chain(net.params.committee, net.params.genesis, {1, 1});
  const auto cert = head_qc(longer, net.params.committee);

  Chain forged_parent = honest_chain(net.params.committee, net.params.genesis, {1});
  Block bad = next_block(forged_parent, net.params.committee, 1);
  bad.header.eqc->votes.resize(1);
  const Chain forged = forged_parent.appended(bad);
  CHECK(of<ChainUpdated>(p.apply(input::NewChain{ProcessId{1}, forged, *head_qc(forged, net.params.committee)}, 10))
            .empty());
  CHECK(p.level() == 1);

  const Effects out = p.apply(input::NewChain{ProcessId{1}, longer, *cert}, 10);
  const auto chains = of<ChainUpdated>(out);
  REQUIRE(chains.size() == 1);
  CHECK(chains[0].cause == ChainCause::Adopt);
  CHECK(p.level() == 3);
  CHECK(p.chain() == longer);
}

TEST_CASE("pull answers carry the head certificate") {
  Net net;
  ProcessNode p = net.node(2);
  p.apply(input::Start{}, 0);
  const Chain longer = honest_chain(net.params.committee, net.params.genesis, {1});
  p.apply(input::NewChain{ProcessId{1}, longer, *head_qc(longer, net.params.committee)}, 5);
  const auto answers = of<SendChain>(p.apply(input::PullRequestFrom{ProcessId{3}}, 6));
  REQUIRE(answers.size() == 1);
  CHECK(answers[0].to == ProcessId{3});
  CHECK(answers[0].chain == longer);
  REQUIRE(answers[0].poc);
  CHECK(std::get<QC>(*answers[0].poc) == *head_qc(longer, net.params.committee));
}

TEST_CASE("a next-level proposal received early is used once the level is reached") {
  Net net;
  ProcessNode p = net.node(3);
  p.apply(input::Start{}, 0);
  const Chain next = honest_chain(net.params.committee, net.params.genesis, {1});
  const auto cert = head_qc(next, net.params.committee);

  // Proposal for level 2, round 1, arriving while p is still at level 1.
  const Block b = next_block(next, net.params.committee, 1);
  Message prop = propose_of(b);
  seal(prop);
  const Effects early = p.apply(input::NewMessage{prop}, 20);
  CHECK(of<PullRequest>(early).size() == 1);
  CHECK(p.instance().messages.empty());

  // Adopted once level 2 has started on p's clock: level 1 took round 1.
  p.apply(input::NewChain{ProcessId{1}, next, *cert}, net.params.durations.round(1) + 10);
  REQUIRE(p.level() == 2);
  REQUIRE(p.instance().messages.size() == 1);
  CHECK(p.instance().messages[0] == prop);
}
