#include "tenderbake/byzantine.hpp"

#include <algorithm>

#include "tenderbake/crypto.hpp"

namespace tenderbake {

namespace {

constexpr std::size_t kHistory = 48;
constexpr int kStalePerPhase = 4;

bool network_effect(const Effect& e) {
  return std::holds_alternative<Broadcast>(e) || std::holds_alternative<SendTo>(e) ||
         std::holds_alternative<PullRequest>(e) || std::holds_alternative<ScheduleTimer>(e) ||
         std::holds_alternative<SendChain>(e);
}

Message vote(ProcessId self, MessageKind kind, Level level, Round round, const Digest& pred, const Digest& value) {
  Message m;
  m.kind = kind;
  m.sender = self;
  m.level = level;
  m.round = round;
  m.pred_hash = pred;
  m.payload = VotePayload{value};
  seal(m);
  return m;
}

}  // namespace

ByzantineProcess::ByzantineProcess(ProcessId id, Strategy strategy, const ProtocolParams& params,
                                   std::shared_ptr<CommitteeCache> committees, std::uint64_t seed)
    : shadow_(id, params, std::move(committees)), strategy_(strategy), params_(&params), rng_(seed) {}

Effects ByzantineProcess::apply(const InputEvent& event, Time local_time) {
  if (strategy_ == Strategy::Silent) return {};

  if (const auto* nm = std::get_if<input::NewMessage>(&event)) remember(nm->msg);
  Effects inner = shadow_.apply(event, local_time);
  Effects out;

  for (auto& e : inner) {
    if (const auto* b = std::get_if<Broadcast>(&e)) {
      if (b->msg.kind == MessageKind::Propose &&
          (strategy_ == Strategy::Equivocator || strategy_ == Strategy::DoubleVoter)) {
        equivocate(b->msg, out);
        continue;
      }
      remember(b->msg);
    }
    if (std::holds_alternative<PhaseEntered>(e)) {
      if (strategy_ == Strategy::StaleSpammer) spam_stale(out);
      if (strategy_ == Strategy::FutureLiar) lie_about_future(out);
    }
    if (const auto* sc = std::get_if<SendChain>(&e); sc && strategy_ == Strategy::FutureLiar) {
      out.emplace_back(garbage_chain(sc->to));
      continue;
    }
    if (network_effect(e)) out.push_back(std::move(e));
  }

  if (strategy_ == Strategy::DoubleVoter) {
    if (const auto* nm = std::get_if<input::NewMessage>(&event); nm && nm->msg.kind == MessageKind::Propose) {
      double_vote(nm->msg, out);
    }
  }
  return out;
}

void ByzantineProcess::remember(const Message& msg) {
  history_.push_back(msg);
  if (history_.size() > kHistory) history_.pop_front();
}

void ByzantineProcess::equivocate(const Message& proposal, Effects& out) {
  Message other = proposal;
  ProposePayload p = proposal.propose();
  p.value = Value{shadow_.id(), proposal.level, proposal.round, fake_nonce_++};
  p.endorsable_round = 0;
  p.pqc.reset();
  other.payload = std::move(p);
  seal(other);

  std::vector<ProcessId> everyone = params_->committee.universe;
  std::sort(everyone.begin(), everyone.end());
  const std::size_t half = everyone.size() / 2;
  for (std::size_t i = 0; i < everyone.size(); ++i) {
    out.emplace_back(SendTo{everyone[i], i < half ? proposal : other});
  }
}

void ByzantineProcess::double_vote(const Message& proposal, Effects& out) {
  if (proposal.level != shadow_.level()) return;
  const Digest value = hash_of(proposal.propose().value);
  if (!double_voted_.insert({proposal.round, value}).second) return;
  for (MessageKind kind : {MessageKind::Preendorse, MessageKind::Endorse}) {
    out.emplace_back(
        Broadcast{vote(shadow_.id(), kind, proposal.level, proposal.round, proposal.pred_hash, value)});
  }
}

void ByzantineProcess::spam_stale(Effects& out) {
  if (history_.empty()) return;
  for (int i = 0; i < kStalePerPhase; ++i) {
    const auto idx = static_cast<std::size_t>(rng_() % history_.size());
    out.emplace_back(Broadcast{history_[idx]});
  }
}

void ByzantineProcess::lie_about_future(Effects& out) {
  Digest pred;
  Digest value;
  for (auto& b : pred.bytes) b = static_cast<std::uint8_t>(rng_());
  for (auto& b : value.bytes) b = static_cast<std::uint8_t>(rng_());
  const Level level = shadow_.level() + 1 + static_cast<Level>(rng_() % 3);
  out.emplace_back(Broadcast{vote(shadow_.id(), MessageKind::Preendorse, level, 1, pred, value)});
}

SendChain ByzantineProcess::garbage_chain(ProcessId to) {
  Chain chain = shadow_.chain();
  auto own_qc = [&](const Block& b) {
    QC qc;
    qc.kind = QcKind::Endorsement;
    qc.level = b.header.level;
    qc.round = b.header.round;
    qc.pred_hash = b.header.pred_hash;
    qc.value_hash = hash_of(b.contents);
    qc.add_vote(sign(shadow_.id(), vote_digest(qc.subject())));
    return qc;
  };
  for (int i = 0; i < 3; ++i) {
    const Level level = chain.length();
    Block b;
    b.header.level = level;
    b.header.round = 1;
    b.header.proposer = shadow_.id();
    b.header.pred_hash = chain.head_hash();
    if (level >= 2) b.header.eqc = own_qc(chain.head());
    b.contents = Value{shadow_.id(), level, 1, fake_nonce_++};
    chain = chain.appended(std::move(b));
  }
  return SendChain{to, chain, ProposalOrCertificate{own_qc(chain.head())}};
}

}  // namespace tenderbake
