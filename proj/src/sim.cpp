#include "tenderbake/sim.hpp"

#include <algorithm>
#include <queue>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "tenderbake/byzantine.hpp"
#include "tenderbake/crypto.hpp"
#include "tenderbake/errors.hpp"

namespace tenderbake {

namespace {

// Uniform integer in [0, n) by rejection; the standard distributions are not
// specified bit-for-bit across library implementations.
std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

Time uniform(std::mt19937_64& rng, Time lo, Time hi) {
  return lo + static_cast<Time>(below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

struct SignatureHash {
  std::size_t operator()(const Signature& s) const noexcept { return DigestHash{}(s.payload) * 31 + s.signer.value; }
};

enum class EventKind : std::uint8_t { Start, Deliver, DeliverChain, Timer, PullArrive };

struct Event {
  Time t = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::Start;
  std::size_t to = 0;      // actor index
  std::uint64_t ref = 0;   // message / transfer id, or the timer token
  TimerKind timer = TimerKind::PhaseEnd;
  ProcessId from;

  bool operator>(const Event& o) const { return t != o.t ? t > o.t : seq > o.seq; }
};

struct Actor {
  const ProcessSpec* spec = nullptr;
  std::unique_ptr<ProcessNode> node;
  std::unique_ptr<ByzantineProcess> byz;
  ClockOffsets clock;
  bool reached_target = false;

  ProcessId id() const { return spec->id; }
  bool started() const { return node ? node->started() : true; }
};

struct Transfer {
  Chain chain;
  std::optional<ProposalOrCertificate> poc;
  ProcessId from;
};

class Simulation {
 public:
  explicit Simulation(const SimConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
    trace_.config = cfg;
    auto committees = std::make_shared<CommitteeCache>(cfg_.protocol.committee);
    const auto clocks = sample_clock_offsets(cfg_);
    std::vector<const ProcessSpec*> specs;
    for (const auto& p : cfg_.processes) specs.push_back(&p);
    std::sort(specs.begin(), specs.end(), [](auto* a, auto* b) { return a->id < b->id; });
    for (std::size_t i = 0; i < specs.size(); ++i) {
      Actor a;
      a.spec = specs[i];
      a.clock = clocks[i];
      if (a.spec->correct()) {
        a.node = std::make_unique<ProcessNode>(a.spec->id, cfg_.protocol, committees);
        ++correct_left_;
      } else {
        a.byz = std::make_unique<ByzantineProcess>(a.spec->id, *a.spec->byzantine, cfg_.protocol, committees,
                                                   cfg_.seed * 0x9e3779b97f4a7c15ULL + a.spec->id.value);
      }
      index_[a.spec->id] = i;
      actors_.push_back(std::move(a));
    }
  }

  Trace run() {
    for (std::size_t i = 0; i < actors_.size(); ++i) {
      Event e;
      e.t = actors_[i].spec->start;
      e.kind = EventKind::Start;
      e.to = i;
      push(e);
    }
    trace_.stop_reason = "quiescent";
    while (!queue_.empty()) {
      Event e = queue_.top();
      if (e.t > cfg_.horizon) {
        trace_.stop_reason = "horizon";
        now_ = cfg_.horizon;
        break;
      }
      queue_.pop();
      now_ = e.t;
      dispatch(e);
      if (correct_left_ == 0) {
        trace_.stop_reason = "target";
        break;
      }
    }
    trace_.end_time = now_;
    return std::move(trace_);
  }

 private:
  void push(Event e) {
    e.seq = seq_++;
    queue_.push(e);
  }

  Time local_clock(const Actor& a) const { return now_ + (now_ < cfg_.gst ? a.clock.before_gst : a.clock.after_gst); }

  template <typename B>
  void record(B body) {
    trace_.records.push_back(Record{now_, RecordBody{std::move(body)}});
  }

  void dispatch(const Event& e) {
    Actor& a = actors_[e.to];
    switch (e.kind) {
      case EventKind::Start:
        apply(e.to, input::Start{});
        break;
      case EventKind::Timer:
        apply(e.to, input::TimerFired{e.timer, e.ref});
        break;
      case EventKind::Deliver:
        if (!a.started()) {
          record(rec::Drop{e.ref, a.id(), DropReason::NotStarted});
          break;
        }
        record(rec::Deliver{e.ref, a.id()});
        apply(e.to, input::NewMessage{messages_[e.ref]});
        break;
      case EventKind::DeliverChain: {
        if (!a.started()) {
          record(rec::ChainDrop{e.ref, a.id(), DropReason::NotStarted});
          break;
        }
        record(rec::ChainDeliver{e.ref, a.id()});
        const Transfer& x = transfers_[e.ref];
        apply(e.to, input::NewChain{x.from, x.chain, x.poc});
        break;
      }
      case EventKind::PullArrive:
        apply(e.to, input::PullRequestFrom{e.from});
        break;
    }
  }

  void apply(std::size_t i, const InputEvent& in) {
    Actor& a = actors_[i];
    const Time local = local_clock(a);
    Effects effects = a.node ? a.node->apply(in, local) : a.byz->apply(in, local);
    for (auto& eff : effects) handle(i, eff);
    if (a.node && !a.reached_target && a.node->level() > cfg_.target_level) {
      a.reached_target = true;
      --correct_left_;
    }
  }

  // Delivery schedule for a transmission from `from` to `to` sent now.
  std::optional<Time> plan(std::size_t from, std::size_t to, DropReason& reason) {
    if (now_ >= cfg_.gst) return now_ + uniform(rng_, 1, cfg_.delta);
    if (actors_[from].spec->isolated_until_gst || actors_[to].spec->isolated_until_gst) {
      reason = DropReason::Isolated;
      return std::nullopt;
    }
    if (below(rng_, kPpm) < cfg_.loss_ppm) {
      reason = DropReason::Loss;
      return std::nullopt;
    }
    return now_ + uniform(rng_, 1, 10 * cfg_.delta);
  }

  void send(std::size_t from, const std::optional<ProcessId>& to, const Message& msg) {
    const Actor& a = actors_[from];
    if (!a.node) check_message(a.id(), msg);
    registry_.insert(msg.sig);
    const std::uint64_t id = messages_.size();
    messages_.push_back(msg);
    record(rec::Send{a.id(), id, to, msg});
    auto transmit = [&](std::size_t j) {
      DropReason reason = DropReason::Loss;
      if (auto at = plan(from, j, reason)) {
        Event e;
        e.t = *at;
        e.kind = EventKind::Deliver;
        e.to = j;
        e.ref = id;
        push(e);
      } else {
        record(rec::Drop{id, actors_[j].id(), reason});
      }
    };
    if (to) {
      transmit(index_of(*to));
    } else {
      for (std::size_t j = 0; j < actors_.size(); ++j) transmit(j);
    }
  }

  std::size_t index_of(ProcessId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw HarnessBug("send to unknown process " + to_string(id));
    return it->second;
  }

  void handle(std::size_t i, Effect& eff) {
    const Actor& a = actors_[i];
    const bool correct = a.node != nullptr;
    std::visit(
        [&](auto& e) {
          using E = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<E, Broadcast>) {
            send(i, std::nullopt, e.msg);
          } else if constexpr (std::is_same_v<E, SendTo>) {
            send(i, e.to, e.msg);
          } else if constexpr (std::is_same_v<E, PullRequest>) {
            record(rec::Pull{a.id()});
            for (std::size_t j = 0; j < actors_.size(); ++j) {
              if (j == i) continue;
              DropReason reason = DropReason::Loss;
              if (auto at = plan(i, j, reason)) {
                Event ev;
                ev.t = *at;
                ev.kind = EventKind::PullArrive;
                ev.to = j;
                ev.from = a.id();
                push(ev);
              }
            }
          } else if constexpr (std::is_same_v<E, ScheduleTimer>) {
            Event ev;
            ev.t = now_ + e.delay;
            ev.kind = EventKind::Timer;
            ev.to = i;
            ev.ref = e.token;
            ev.timer = e.kind;
            push(ev);
          } else if constexpr (std::is_same_v<E, SendChain>) {
            send_chain(i, e);
          } else if constexpr (std::is_same_v<E, Decided>) {
            if (correct) record(rec::Decide{a.id(), e.level, e.round, hash_of(e.block), e.certificate});
          } else if constexpr (std::is_same_v<E, ChainUpdated>) {
            if (correct) record(rec::ChainUpdate{a.id(), e.cause, e.chain, e.certificate, e.old_head_round});
          } else if constexpr (std::is_same_v<E, PhaseEntered>) {
            if (correct) record(rec::PhaseStart{a.id(), e.level, e.round, e.phase, e.phase_offset, e.baker});
          } else if constexpr (std::is_same_v<E, LockUpdated>) {
            if (correct) record(rec::Lock{a.id(), e.level, e.locked_round, e.value_hash});
          } else if constexpr (std::is_same_v<E, BufferSize>) {
            if (correct) record(rec::BufferSize{a.id(), e.size});
          }
        },
        eff);
  }

  void send_chain(std::size_t from, SendChain& sc) {
    const Actor& a = actors_[from];
    if (!a.node) {
      for (const auto& link : sc.chain.links()) {
        check_qc_votes(a.id(), link->block.header.eqc);
        check_qc_votes(a.id(), link->block.header.pqc);
      }
      if (sc.poc) {
        if (const auto* m = std::get_if<Message>(&*sc.poc)) {
          check_message(a.id(), *m);
        } else {
          check_qc_votes(a.id(), std::get<QC>(*sc.poc));
        }
      }
    }
    const std::uint64_t id = transfers_.size();
    transfers_.push_back(Transfer{sc.chain, sc.poc, a.id()});
    record(rec::ChainSend{a.id(), id, sc.to, sc.chain, sc.poc});
    const std::size_t j = index_of(sc.to);
    DropReason reason = DropReason::Loss;
    if (auto at = plan(from, j, reason)) {
      Event e;
      e.t = *at;
      e.kind = EventKind::DeliverChain;
      e.to = j;
      e.ref = id;
      push(e);
    } else {
      record(rec::ChainDrop{id, sc.to, reason});
    }
  }

  // Emission discipline for adversaries: a process signs only as itself and
  // may relay only signatures that were emitted before, on unchanged content.
  void check_message(ProcessId self, const Message& m) {
    if (m.sig.signer != m.sender) throw HarnessBug(to_string(self) + " emitted a message whose signer is not its sender");
    if (!signature_valid(m)) throw HarnessBug(to_string(self) + " emitted a signature not covering its message");
    if (m.sender != self && !registry_.contains(m.sig)) {
      throw HarnessBug(to_string(self) + " forged a signature of " + to_string(m.sender));
    }
    if (const auto* p = std::get_if<ProposePayload>(&m.payload)) {
      check_qc_votes(self, p->eqc);
      check_qc_votes(self, p->pqc);
    } else if (const auto* c = std::get_if<QcPayload>(&m.payload)) {
      check_qc_votes(self, c->pqc);
    }
  }

  void check_qc_votes(ProcessId self, const std::optional<QC>& qc) {
    if (qc) check_qc_votes(self, *qc);
  }

  void check_qc_votes(ProcessId self, const QC& qc) {
    for (const auto& v : qc.votes) {
      if (v.signer != self && !registry_.contains(v)) {
        throw HarnessBug(to_string(self) + " forged a certificate vote of " + to_string(v.signer));
      }
    }
  }

  const SimConfig& cfg_;
  std::mt19937_64 rng_;
  Trace trace_;
  std::vector<Actor> actors_;
  std::unordered_map<ProcessId, std::size_t> index_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
  Time now_ = 0;
  std::size_t correct_left_ = 0;
  std::vector<Message> messages_;
  std::vector<Transfer> transfers_;
  std::unordered_set<Signature, SignatureHash> registry_;
};

}  // namespace

std::vector<ClockOffsets> sample_clock_offsets(const SimConfig& cfg) {
  std::vector<ProcessId> ids;
  for (const auto& p : cfg.processes) ids.push_back(p.id);
  std::sort(ids.begin(), ids.end());
  std::mt19937_64 rng(cfg.seed ^ 0x5bd1e995c0ffee11ULL);
  std::vector<ClockOffsets> out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    ClockOffsets c;
    c.before_gst = uniform(rng, -cfg.delta_err, cfg.delta_err);
    c.after_gst = uniform(rng, -cfg.rho, cfg.rho);
    out.push_back(c);
  }
  return out;
}

Trace run_sim(const SimConfig& cfg) {
  cfg.validate();
  Simulation sim(cfg);
  return sim.run();
}

}  // namespace tenderbake
