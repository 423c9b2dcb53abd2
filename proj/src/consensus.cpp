#include "tenderbake/consensus.hpp"

#include <algorithm>

#include "tenderbake/crypto.hpp"
#include "tenderbake/errors.hpp"

namespace tenderbake {

namespace {

bool header_matches(const Message& msg, const InstanceState& state, const LevelView& view) {
  return msg.level == view.level && msg.pred_hash == view.head_hash &&
         (msg.round == state.round || msg.round == state.round + 1);
}

bool valid_propose(const Message& msg, const LevelView& view) {
  const auto& committee = *view.committee;
  const auto& p = msg.propose();
  if (msg.round < 1 || msg.sender != proposer_in(committee, msg.round)) return false;
  if (!is_legitimate_value(p.value, view.level, msg.round, committee)) return false;

  if (view.level == 1) {
    if (p.eqc) return false;
  } else {
    if (!p.eqc || view.prev_committee == nullptr) return false;
    const Block& head = view.chain->head();
    VoteSubject expected{QcKind::Endorsement, view.level - 1, head.header.round, head.header.pred_hash,
                         hash_of(head.contents)};
    if (!check_qc(*p.eqc, expected, *view.prev_committee, view.f)) return false;
  }

  if (p.endorsable_round == 0) {
    // Fresh value: created by this proposer at this round.
    return !p.pqc && p.value.round == msg.round;
  }
  if (!p.pqc || p.endorsable_round < 0 || p.endorsable_round >= msg.round) return false;
  VoteSubject expected{QcKind::Preendorsement, view.level, p.endorsable_round, view.head_hash,
                       hash_of(p.value)};
  return check_qc(*p.pqc, expected, committee, view.f);
}

bool valid_vote(const InstanceState& state, const Message& msg, const LevelView& view) {
  if (!is_member(*view.committee, msg.sender)) return false;
  const Message* prop = proposal(state, view, msg.round);
  return prop != nullptr && msg.vote().value_hash == hash_of(prop->propose().value);
}

bool valid_certificate_message(const Message& msg, const LevelView& view) {
  const auto& c = msg.certificate();
  const QC& qc = c.pqc;
  if (qc.kind != QcKind::Preendorsement || qc.round < 1) return false;
  if (!is_legitimate_value(c.value, view.level, qc.round, *view.committee)) return false;
  VoteSubject expected{QcKind::Preendorsement, view.level, qc.round, view.head_hash, hash_of(c.value)};
  return check_qc(qc, expected, *view.committee, view.f);
}

bool is_duplicate(const InstanceState& state, const Message& msg) {
  return std::any_of(state.messages.begin(), state.messages.end(), [&](const Message& m) {
    return m.kind == msg.kind && m.sender == msg.sender && m.round == msg.round;
  });
}

Message make_message(MessageKind kind, const LevelView& view, Round round, Payload payload) {
  Message m;
  m.kind = kind;
  m.sender = view.self;
  m.level = view.level;
  m.round = round;
  m.pred_hash = view.head_hash;
  m.payload = std::move(payload);
  seal(m);
  return m;
}

std::size_t count_votes(const InstanceState& state, const LevelView& view, MessageKind kind) {
  return static_cast<std::size_t>(std::count_if(state.messages.begin(), state.messages.end(), [&](const Message& m) {
    return m.kind == kind && m.round == state.round && m.pred_hash == view.head_hash;
  }));
}

}  // namespace

void init_instance(InstanceState& state) { state = InstanceState{}; }

const Message* proposal(const InstanceState& state, const LevelView& view, Round round) {
  for (const auto& m : state.messages) {
    if (m.kind == MessageKind::Propose && m.round == round && m.pred_hash == view.head_hash) return &m;
  }
  return nullptr;
}

bool is_valid_message(const InstanceState& state, const Message& msg, const LevelView& view) {
  if (msg.sig.signer != msg.sender) return false;
  switch (msg.kind) {
    case MessageKind::Propose:
      return valid_propose(msg, view);
    case MessageKind::Preendorse:
    case MessageKind::Endorse:
      return valid_vote(state, msg, view);
    case MessageKind::Preendorsements:
      return valid_certificate_message(msg, view);
  }
  return false;
}

void update_endorsable(InstanceState& state, const Message& msg, const LevelView& view) {
  if (count_votes(state, view, MessageKind::Preendorse) >= static_cast<std::size_t>(view.quorum())) {
    const Message* prop = proposal(state, view, state.round);
    state.endorsable_value = prop->propose().value;
    state.endorsable_round = state.round;
    state.preendorsement_qc = collect_votes(state, view, MessageKind::Preendorse);
    return;
  }
  const QC* pqc = nullptr;
  const Value* value = nullptr;
  if (msg.kind == MessageKind::Propose && msg.propose().pqc) {
    pqc = &*msg.propose().pqc;
    value = &msg.propose().value;
  } else if (msg.kind == MessageKind::Preendorsements) {
    pqc = &msg.certificate().pqc;
    value = &msg.certificate().value;
  }
  if (pqc != nullptr && pqc->round > state.endorsable_round) {
    state.endorsable_value = *value;
    state.endorsable_round = pqc->round;
    state.preendorsement_qc = *pqc;
  }
}

IntakeResult handle_message(InstanceState& state, const Message& msg, const LevelView& view) {
  IntakeResult result;
  if (header_matches(msg, state, view)) {
    if (!is_valid_message(state, msg, view)) {
      result.intake = Intake::Invalid;
    } else if (msg.kind == MessageKind::Preendorsements) {
      update_endorsable(state, msg, view);
      result.intake = Intake::Consumed;
    } else if (is_duplicate(state, msg)) {
      result.intake = Intake::Duplicate;
    } else {
      state.messages.push_back(msg);
      update_endorsable(state, msg, view);
      result.intake = Intake::Buffered;
    }
  }
  result.suggests_behind =
      (msg.level == view.level && msg.pred_hash != view.head_hash) || msg.level > view.level;
  return result;
}

void filter_messages(InstanceState& state) {
  std::erase_if(state.messages, [&](const Message& m) { return m.round != state.round; });
}

void drop_stale_hash(InstanceState& state, const LevelView& view) {
  std::erase_if(state.messages, [&](const Message& m) { return m.pred_hash != view.head_hash; });
}

QC collect_votes(const InstanceState& state, const LevelView& view, MessageKind kind) {
  QC qc;
  qc.kind = vote_kind(kind);
  qc.level = view.level;
  qc.round = state.round;
  qc.pred_hash = view.head_hash;
  if (const Message* prop = proposal(state, view, state.round)) qc.value_hash = hash_of(prop->propose().value);
  for (const auto& m : state.messages) {
    if (m.kind == kind && m.round == state.round && m.pred_hash == view.head_hash) qc.add_vote(m.sig);
  }
  return qc;
}

Effects propose_phase(InstanceState& state, const LevelView& view, std::uint64_t& next_nonce) {
  Effects out;
  if (proposer_in(*view.committee, state.round) != view.self) return out;
  ProposePayload payload;
  payload.eqc = *view.head_certificate;
  if (state.endorsable_value) {
    payload.value = *state.endorsable_value;
    payload.endorsable_round = state.endorsable_round;
    payload.pqc = state.preendorsement_qc;
  } else {
    payload.value = Value{view.self, view.level, state.round, next_nonce++};
  }
  out.emplace_back(Broadcast{make_message(MessageKind::Propose, view, state.round, std::move(payload))});
  return out;
}

Effects preendorse_phase(InstanceState& state, const LevelView& view) {
  Effects out;
  const Message* prop = proposal(state, view, state.round);
  if (prop != nullptr) {
    const auto& p = prop->propose();
    const bool acceptable = state.locked_round == 0 || state.locked_value == p.value ||
                            (state.locked_round < p.endorsable_round && p.endorsable_round < state.round);
    if (acceptable) {
      out.emplace_back(
          Broadcast{make_message(MessageKind::Preendorse, view, state.round, VotePayload{hash_of(p.value)})});
      return out;
    }
  }
  if (state.locked_value && state.preendorsement_qc && state.endorsable_value) {
    out.emplace_back(Broadcast{make_message(MessageKind::Preendorsements, view, state.round,
                                            QcPayload{*state.preendorsement_qc, *state.endorsable_value})});
  }
  return out;
}

Effects endorse_phase(InstanceState& state, const LevelView& view) {
  Effects out;
  if (count_votes(state, view, MessageKind::Preendorse) < static_cast<std::size_t>(view.quorum())) return out;
  const Value u = proposal(state, view, state.round)->propose().value;
  state.locked_value = u;
  state.locked_round = state.round;
  const Digest value_hash = hash_of(u);
  out.emplace_back(LockUpdated{view.level, state.round, value_hash});
  out.emplace_back(Broadcast{make_message(MessageKind::Endorse, view, state.round, VotePayload{value_hash})});
  QC pqc = collect_votes(state, view, MessageKind::Preendorse);
  out.emplace_back(
      Broadcast{make_message(MessageKind::Preendorsements, view, state.round, QcPayload{std::move(pqc), u})});
  return out;
}

Effects observer_phase(InstanceState& /*state*/, const LevelView& /*view*/) { return {}; }

Effects run_phase(InstanceState& state, const LevelView& view, bool baker, std::uint64_t& next_nonce) {
  if (!baker) return observer_phase(state, view);
  switch (state.phase) {
    case Phase::Propose:
      return propose_phase(state, view, next_nonce);
    case Phase::Preendorse:
      return preendorse_phase(state, view);
    case Phase::Endorse:
      return endorse_phase(state, view);
  }
  return {};
}

std::optional<std::pair<Block, QC>> get_decision(const InstanceState& state, const LevelView& view) {
  if (count_votes(state, view, MessageKind::Endorse) < static_cast<std::size_t>(view.quorum())) return std::nullopt;
  const Message* prop = proposal(state, view, state.round);
  if (prop == nullptr) return std::nullopt;
  return std::make_pair(block_of(*prop), collect_votes(state, view, MessageKind::Endorse));
}

bool better_head(const InstanceState& state, const Chain& own, const Chain& incoming,
                 const ProposalOrCertificate& poc) {
  const Round incoming_round = incoming.head().header.round;
  const Round own_round = own.head().header.round;
  if (const auto* msg = std::get_if<Message>(&poc)) {
    if (msg->kind != MessageKind::Propose) return false;
    const Round er = msg->propose().endorsable_round;
    return state.endorsable_round < er || (state.endorsable_round == er && incoming_round < own_round);
  }
  return state.endorsable_round == 0 && incoming_round < own_round;
}

std::optional<QC> get_certificate(const ProposalOrCertificate& poc) {
  if (const auto* qc = std::get_if<QC>(&poc)) return *qc;
  const Message& msg = std::get<Message>(poc);
  if (msg.kind != MessageKind::Propose) throw MalformedPoc("get_certificate: not a proposal");
  const auto& p = msg.propose();
  if (!p.eqc && msg.level >= 2) throw MalformedPoc("get_certificate: proposal above level 1 without certificate");
  return p.eqc;
}

}  // namespace tenderbake
