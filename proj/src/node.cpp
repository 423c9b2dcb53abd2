#include "tenderbake/node.hpp"

#include "tenderbake/crypto.hpp"
#include "tenderbake/errors.hpp"

namespace tenderbake {

const char* to_string(TimerKind kind) {
  switch (kind) {
    case TimerKind::PhaseEnd:
      return "PhaseEnd";
    case TimerKind::Retry:
      return "Retry";
    case TimerKind::Pull:
      return "Pull";
  }
  return "Unknown";
}

const char* to_string(ChainCause cause) {
  switch (cause) {
    case ChainCause::Start:
      return "start";
    case ChainCause::Decide:
      return "decide";
    case ChainCause::Adopt:
      return "adopt";
    case ChainCause::HeadSwap:
      return "headswap";
  }
  return "unknown";
}

ProcessNode::ProcessNode(ProcessId id, const ProtocolParams& params, std::shared_ptr<CommitteeCache> committees)
    : id_(id), params_(&params), committees_(std::move(committees)) {
  if (!committees_) committees_ = std::make_shared<CommitteeCache>(params.committee);
  chain_ = Chain::from_genesis(params.genesis);
  level_start_ = params.genesis.t0;
}

bool ProcessNode::is_baker() const {
  return is_member(committees_->at_level(chain_, level()), id_);
}

LevelView ProcessNode::view() const {
  LevelView v;
  v.self = id_;
  v.level = level();
  v.head_hash = chain_.head_hash();
  v.chain = &chain_;
  v.committee = &committees_->at_level(chain_, v.level);
  v.prev_committee = v.level >= 2 ? &committees_->at_level(chain_, v.level - 1) : nullptr;
  v.head_certificate = &head_certificate_;
  v.f = params_->committee.f;
  return v;
}

Effects ProcessNode::apply(const InputEvent& event, Time local_time) {
  Effects out;
  if (!started_ && !std::holds_alternative<input::Start>(event)) return out;
  std::visit(
      [&](const auto& e) {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, input::Start>) {
          if (!started_) start(out, local_time);
        } else if constexpr (std::is_same_v<E, input::TimerFired>) {
          on_timer(e, out, local_time);
        } else if constexpr (std::is_same_v<E, input::NewMessage>) {
          on_message(e.msg, out);
        } else if constexpr (std::is_same_v<E, input::NewChain>) {
          on_chain(e, out, local_time);
        } else {
          answer_pull(e.peer, out);
        }
      },
      event);
  const std::size_t held = instance_.messages.size() + (stash_ ? 1 : 0);
  if (held != reported_buffer_) {
    reported_buffer_ = held;
    out.emplace_back(BufferSize{reported_buffer_});
  }
  return out;
}

void ProcessNode::start(Effects& out, Time now) {
  started_ = true;
  out.emplace_back(ScheduleTimer{TimerKind::Pull, params_->pull_interval, 0});
  update_state(chain_, std::nullopt);
  out.emplace_back(ChainUpdated{ChainCause::Start, chain_, head_certificate_, 0});
  enter_instance(out, now);
}

void ProcessNode::update_state(Chain chain, std::optional<QC> certificate) {
  chain_ = std::move(chain);
  head_certificate_ = std::move(certificate);
  level_start_ = level_start(chain_, params_->durations, params_->genesis.t0);
}

void ProcessNode::schedule_phase_timer(Effects& out, TimerKind kind, Time delay) {
  ++phase_token_;
  out.emplace_back(ScheduleTimer{kind, delay, phase_token_});
}

void ProcessNode::enter_instance(Effects& out, Time now) {
  const DurationFn& d = params_->durations;
  in_phase_ = false;
  if (now < level_start_) {
    schedule_phase_timer(out, TimerKind::Retry, level_start_ - now);
    return;
  }
  const SyncResult s = synchronize_from(level_start_, now, d);
  if (instance_.round > s.round) {
    // Ahead of the clock: wait for the next round boundary and try again.
    schedule_phase_timer(out, TimerKind::Retry, d.round(s.round) - s.offset);
    return;
  }
  if (s.round > instance_.round) {
    instance_.round = s.round;
    filter_messages(instance_);
  }
  replay_stash();
  const PhasePosition pos = next_phase(s.round, s.offset, d);
  instance_.phase = pos.phase;
  enter_phase(out, pos.offset);
}

void ProcessNode::enter_phase(Effects& out, Time phase_offset) {
  in_phase_ = true;
  schedule_phase_timer(out, TimerKind::PhaseEnd, params_->durations.phase(instance_.round) - phase_offset);
  const bool baker = is_baker();
  out.emplace_back(PhaseEntered{level(), instance_.round, instance_.phase, phase_offset, baker});
  const LevelView v = view();
  Effects acts = run_phase(instance_, v, baker, next_nonce_);
  for (auto& a : acts) out.push_back(std::move(a));
}

void ProcessNode::on_timer(const input::TimerFired& t, Effects& out, Time now) {
  if (t.kind == TimerKind::Pull) {
    out.emplace_back(PullRequest{});
    out.emplace_back(ScheduleTimer{TimerKind::Pull, params_->pull_interval, 0});
    return;
  }
  if (t.token != phase_token_) return;
  if (t.kind == TimerKind::Retry) {
    enter_instance(out, now);
    return;
  }
  if (instance_.phase != Phase::Endorse) {
    instance_.phase = static_cast<Phase>(static_cast<int>(instance_.phase) + 1);
    enter_phase(out, 0);
    return;
  }
  end_of_endorse(out, now);
}

void ProcessNode::end_of_endorse(Effects& out, Time now) {
  const LevelView v = view();
  if (auto d = get_decision(instance_, v)) {
    auto& [block, qc] = *d;
    const Round round = instance_.round;
    Chain next = append_decided(chain_, block);
    out.emplace_back(Decided{level(), round, block, qc});
    update_state(std::move(next), qc);
    out.emplace_back(ChainUpdated{ChainCause::Decide, chain_, head_certificate_, 0});
    init_instance(instance_);
  } else {
    ++instance_.round;
    filter_messages(instance_);
  }
  enter_instance(out, now);
}

void ProcessNode::request_pull(Effects& out) {
  const std::pair<Level, Round> key{level(), instance_.round};
  if (key == last_triggered_pull_) return;
  last_triggered_pull_ = key;
  out.emplace_back(PullRequest{});
}

void ProcessNode::on_message(const Message& msg, Effects& out) {
  const IntakeResult r = handle_message(instance_, msg, view());
  if (msg.level == level() + 1) stash_future(msg);
  if (r.suggests_behind) request_pull(out);
}

void ProcessNode::stash_future(const Message& msg) {
  if (msg.kind != MessageKind::Propose) return;
  if (stash_ && stash_->level == msg.level && stash_->round <= msg.round) return;
  try {
    if (msg.sender != proposer_in(committees_->at_level(chain_, msg.level), msg.round)) return;
  } catch (const InsufficientChain&) {
    return;
  }
  stash_ = msg;
}

void ProcessNode::replay_stash() {
  if (!stash_ || stash_->level > level()) return;
  const Message msg = std::move(*stash_);
  stash_.reset();
  if (msg.level == level()) handle_message(instance_, msg, view());
}

void ProcessNode::on_chain(const input::NewChain& c, Effects& out, Time now) {
  if (!c.poc || c.chain.empty()) return;
  const Chain& incoming = c.chain;
  if (incoming.length() < level()) return;
  if (incoming.length() == level()) {
    if (incoming.head_hash() == chain_.head_hash()) return;
    if (!better_head(instance_, chain_, incoming, *c.poc)) return;
  }
  std::optional<QC> cert;
  try {
    cert = get_certificate(*c.poc);
    const Level trusted = std::min(chain_.common_prefix(incoming), incoming.length());
    if (!validate_chain(incoming, cert, params_->genesis, *committees_, trusted).ok) return;
  } catch (const MalformedPoc&) {
    return;
  } catch (const InsufficientChain&) {
    return;
  }
  // The proposal's own level must match the chain it extends.
  if (const auto* m = std::get_if<Message>(&*c.poc)) {
    if (m->level != incoming.length() || m->pred_hash != incoming.head_hash()) return;
  }

  if (incoming.length() > level()) {
    update_state(incoming, std::move(cert));
    out.emplace_back(ChainUpdated{ChainCause::Adopt, chain_, head_certificate_, 0});
    init_instance(instance_);
    if (const auto* m = std::get_if<Message>(&*c.poc); m && m->kind == MessageKind::Propose) stash_ = *m;
    enter_instance(out, now);
    return;
  }
  const Round old_round = chain_.head().header.round;
  update_state(incoming, std::move(cert));
  drop_stale_hash(instance_, view());
  out.emplace_back(ChainUpdated{ChainCause::HeadSwap, chain_, head_certificate_, old_round});
  if (const auto* m = std::get_if<Message>(&*c.poc)) handle_message(instance_, *m, view());
}

void ProcessNode::answer_pull(ProcessId peer, Effects& out) const {
  const Message* best = nullptr;
  for (const auto& m : instance_.messages) {
    if (m.kind == MessageKind::Propose && m.pred_hash == chain_.head_hash() && (!best || m.round > best->round)) {
      best = &m;
    }
  }
  SendChain sc{peer, chain_, std::nullopt};
  if (best) {
    sc.poc = ProposalOrCertificate{*best};
  } else if (head_certificate_) {
    sc.poc = ProposalOrCertificate{*head_certificate_};
  }
  out.emplace_back(std::move(sc));
}

}  // namespace tenderbake
