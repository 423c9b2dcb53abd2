#include "tenderbake/verifier.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "tenderbake/consensus.hpp"
#include "tenderbake/crypto.hpp"
#include "tenderbake/errors.hpp"

namespace tenderbake {

namespace {

std::unordered_set<ProcessId> correct_set(const Trace& trace) {
  std::unordered_set<ProcessId> out;
  for (ProcessId p : trace.config.correct_ids()) out.insert(p);
  return out;
}

Verdict pass(const char* name, std::string detail = {}) { return {name, Outcome::Pass, std::nullopt, std::move(detail)}; }

Verdict fail(const char* name, std::size_t index, std::string detail) {
  return {name, Outcome::Fail, index, std::move(detail)};
}

Verdict inconclusive(const char* name, std::string detail) {
  return {name, Outcome::Inconclusive, std::nullopt, std::move(detail)};
}

std::string where(const Record& r) { return "t=" + std::to_string(r.t); }

}  // namespace

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Pass:
      return "pass";
    case Outcome::Fail:
      return "FAIL";
    case Outcome::Inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

Verdict check_agreement(const Trace& trace) {
  constexpr const char* kName = "agreement";
  const auto correct = correct_set(trace);
  // Longest committed sequence seen so far; every committed sequence must be
  // prefix-related to it, which makes all of them pairwise prefix-related.
  Chain longest;
  Level longest_committed = 0;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto* c = std::get_if<rec::ChainUpdate>(&trace.records[i].body);
    if (!c || !correct.contains(c->p) || c->chain.empty()) continue;
    const Level committed = c->chain.length() - 1;
    const Level common = std::min(committed, longest_committed);
    if (common > 0 && c->chain.common_prefix(longest) < common) {
      return fail(kName, i,
                  to_string(c->p) + " committed a block at level " + std::to_string(c->chain.common_prefix(longest)) +
                      " conflicting with another correct process (" + where(trace.records[i]) + ")");
    }
    if (committed > longest_committed) {
      longest = c->chain;
      longest_committed = committed;
    }
  }
  return pass(kName);
}

Verdict check_validity(const Trace& trace) {
  constexpr const char* kName = "validity";
  const auto correct = correct_set(trace);
  const ProtocolParams& params = trace.config.protocol;
  CommitteeCache committees(params.committee);
  std::unordered_set<Digest, DigestHash> validated;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto* c = std::get_if<rec::ChainUpdate>(&trace.records[i].body);
    if (!c || !correct.contains(c->p)) continue;
    Level trusted = 0;
    for (Level l = c->chain.length(); l > 0; --l) {
      if (validated.contains(c->chain.hash_at(l - 1))) {
        trusted = l;
        break;
      }
    }
    ChainVerdict v;
    try {
      v = validate_chain(c->chain, c->cert, params.genesis, committees, trusted);
    } catch (const InsufficientChain& e) {
      v = ChainVerdict{false, c->chain.length() - 1, e.what()};
    }
    if (!v.ok) {
      return fail(kName, i,
                  to_string(c->p) + " holds an invalid chain at level " + std::to_string(v.failed_level) + ": " +
                      v.reason + " (" + where(trace.records[i]) + ")");
    }
    for (const auto& link : c->chain.links()) validated.insert(link->hash);
  }
  return pass(kName);
}

Verdict check_vote_once(const Trace& trace) {
  constexpr const char* kName = "vote_once";
  const auto correct = correct_set(trace);
  std::set<std::tuple<std::uint32_t, MessageKind, Level, Round>> seen;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto* s = std::get_if<rec::Send>(&trace.records[i].body);
    if (!s || !correct.contains(s->p)) continue;
    const MessageKind k = s->msg.kind;
    if (k != MessageKind::Preendorse && k != MessageKind::Endorse) continue;
    if (!seen.insert({s->p.value, k, s->msg.level, s->msg.round}).second) {
      return fail(kName, i,
                  to_string(s->p) + " sent a second " + to_string(k) + " at level " + std::to_string(s->msg.level) +
                      " round " + std::to_string(s->msg.round));
    }
  }
  return pass(kName);
}

namespace {

using QcKey = std::tuple<QcKind, Level, Round>;
using SubjectKey = std::tuple<QcKind, Level, Round, Digest, Digest>;

class QcCollector {
 public:
  explicit QcCollector(int f) : quorum_(static_cast<std::size_t>(2 * f + 1)) {}

  // Returns a description of the conflict, if any.
  std::optional<std::string> consider(const QC& qc) {
    const SubjectKey subject{qc.kind, qc.level, qc.round, qc.pred_hash, qc.value_hash};
    if (formed_.contains(subject)) return std::nullopt;
    if (qc.votes.size() < quorum_ || qc.distinct_signers() != qc.votes.size()) return std::nullopt;
    const Digest payload = vote_digest(qc.subject());
    for (const auto& v : qc.votes) {
      if (v.payload != payload) return std::nullopt;
    }
    return established(subject);
  }

  // Votes sent in messages; a quorum of distinct signers forms a certificate.
  std::optional<std::string> consider_vote(const Message& m) {
    const SubjectKey subject{vote_kind(m.kind), m.level, m.round, m.pred_hash, m.vote().value_hash};
    if (formed_.contains(subject)) return std::nullopt;
    auto& signers = votes_[subject];
    signers.insert(m.sig.signer);
    if (signers.size() < quorum_) return std::nullopt;
    return established(subject);
  }

 private:
  std::optional<std::string> established(const SubjectKey& subject) {
    formed_.insert(subject);
    const auto& [kind, level, round, pred, value] = subject;
    const QcKey key{kind, level, round};
    auto [it, inserted] = first_.emplace(key, std::make_pair(pred, value));
    if (inserted || it->second == std::make_pair(pred, value)) return std::nullopt;
    return std::string(to_string(kind)) + " certificates for two values at level " + std::to_string(level) +
           " round " + std::to_string(round) + ": " + it->second.second.hex() + " and " + value.hex();
  }

  std::size_t quorum_;
  std::set<SubjectKey> formed_;
  std::map<SubjectKey, std::set<ProcessId>> votes_;
  std::map<QcKey, std::pair<Digest, Digest>> first_;
};

}  // namespace

Verdict check_qc_uniqueness(const Trace& trace) {
  constexpr const char* kName = "qc_uniqueness";
  QcCollector qcs(trace.config.protocol.committee.f);
  std::unordered_set<Digest, DigestHash> seen_blocks;
  std::optional<std::string> conflict;

  auto take = [&](const std::optional<QC>& qc) {
    if (qc && !conflict) conflict = qcs.consider(*qc);
  };
  auto take_message = [&](const Message& m) {
    switch (m.kind) {
      case MessageKind::Propose:
        take(m.propose().eqc);
        take(m.propose().pqc);
        break;
      case MessageKind::Preendorse:
      case MessageKind::Endorse:
        if (!conflict) conflict = qcs.consider_vote(m);
        break;
      case MessageKind::Preendorsements:
        take(m.certificate().pqc);
        break;
    }
  };
  auto take_chain = [&](const Chain& chain) {
    for (const auto& link : chain.links()) {
      if (!seen_blocks.insert(link->hash).second) continue;
      take(link->block.header.eqc);
      take(link->block.header.pqc);
    }
  };

  for (std::size_t i = 0; i < trace.records.size() && !conflict; ++i) {
    std::visit(
        [&](const auto& b) {
          using B = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<B, rec::Send>) {
            take_message(b.msg);
          } else if constexpr (std::is_same_v<B, rec::Decide>) {
            take(b.qc);
          } else if constexpr (std::is_same_v<B, rec::ChainUpdate>) {
            take_chain(b.chain);
            take(b.cert);
          } else if constexpr (std::is_same_v<B, rec::ChainSend>) {
            take_chain(b.chain);
            if (b.poc) {
              if (const auto* m = std::get_if<Message>(&*b.poc)) {
                take_message(*m);
              } else {
                take(std::get<QC>(*b.poc));
              }
            }
          }
        },
        trace.records[i].body);
    if (conflict) return fail(kName, i, *conflict);
  }
  return pass(kName);
}

std::size_t buffer_high_water(const Trace& trace) {
  const auto correct = correct_set(trace);
  std::size_t high = 0;
  for (const auto& r : trace.records) {
    if (const auto* b = std::get_if<rec::BufferSize>(&r.body); b && correct.contains(b->p)) {
      high = std::max<std::size_t>(high, b->size);
    }
  }
  return high;
}

Verdict check_buffer_bound(const Trace& trace) {
  constexpr const char* kName = "buffer_bound";
  const auto correct = correct_set(trace);
  const std::size_t bound = buffer_bound(trace.config.protocol.committee.n);
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto* b = std::get_if<rec::BufferSize>(&trace.records[i].body);
    if (b && correct.contains(b->p) && b->size > bound) {
      return fail(kName, i,
                  to_string(b->p) + " buffered " + std::to_string(b->size) + " messages, bound " +
                      std::to_string(bound));
    }
  }
  return pass(kName, "high-water " + std::to_string(buffer_high_water(trace)) + " <= " + std::to_string(bound));
}

Verdict check_decision_rounds(const Trace& trace, Round max_round) {
  constexpr const char* kName = "termination";
  const auto correct = correct_set(trace);
  const Level target = trace.config.target_level;
  // (process, level) -> record index of the Decide, and whether it was a baker.
  std::map<std::pair<std::uint32_t, Level>, std::size_t> decided;
  std::set<std::pair<std::uint32_t, Level>> bakers;
  std::map<std::uint32_t, Level> final_length;

  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const Record& r = trace.records[i];
    if (const auto* d = std::get_if<rec::Decide>(&r.body); d && correct.contains(d->p)) {
      if (d->level <= target && d->round > max_round) {
        return fail(kName, i,
                    to_string(d->p) + " decided level " + std::to_string(d->level) + " at round " +
                        std::to_string(d->round) + " > " + std::to_string(max_round));
      }
      decided[{d->p.value, d->level}] = i;
    } else if (const auto* s = std::get_if<rec::PhaseStart>(&r.body); s && s->baker && correct.contains(s->p)) {
      bakers.insert({s->p.value, s->level});
    } else if (const auto* c = std::get_if<rec::ChainUpdate>(&r.body); c && correct.contains(c->p)) {
      final_length[c->p.value] = c->chain.length();
      if (c->cause == ChainCause::Adopt) {
        for (Level l = 1; l < std::min(c->chain.length(), target + 1); ++l) {
          // A block obtained by adoption counts as that level's output, but it
          // must itself carry a round within the bound.
          if (bakers.contains({c->p.value, l}) && !decided.contains({c->p.value, l}) &&
              c->chain.at(l).header.round > max_round) {
            return fail(kName, i,
                        to_string(c->p) + " left level " + std::to_string(l) + " by adopting a block of round " +
                            std::to_string(c->chain.at(l).header.round) + " > " + std::to_string(max_round));
          }
        }
      }
    }
  }
  for (ProcessId p : trace.config.correct_ids()) {
    const Level len = final_length.contains(p.value) ? final_length[p.value] : 0;
    if (len <= target) {
      return inconclusive(kName, to_string(p) + " did not reach level " + std::to_string(target) + " in the run");
    }
  }
  return pass(kName, "all correct bakers decided by round " + std::to_string(max_round));
}

Verdict check_termination(const Trace& trace, Round sync_round) {
  return check_decision_rounds(trace, sync_round + trace.config.protocol.committee.f + 1);
}

namespace {

// Upper estimate of the recovery time that does not need the trace: the
// bound evaluated at the earliest possible level start t0.
Time recovery_grace(const SimConfig& cfg) {
  const DurationFn& d = cfg.protocol.durations;
  const Time pull = 2 * cfg.delta;
  const Time I = cfg.protocol.pull_interval;
  const Time span = std::max<Time>(0, cfg.gst - cfg.protocol.genesis.t0);
  const Round r = delta_inv(d, span + I + pull);
  const Round rp = delta_inv(d, span);
  return std::max({cfg.delta_err, I + pull + d.round(r), d.round(rp) + d.round(rp + 1)});
}

}  // namespace

Verdict check_progress(const Trace& trace) {
  constexpr const char* kName = "progress";
  const SimConfig& cfg = trace.config;
  const auto correct_ids = cfg.correct_ids();
  const auto correct = correct_set(trace);

  std::map<std::uint32_t, Level> final_length;
  for (const auto& r : trace.records) {
    if (const auto* c = std::get_if<rec::ChainUpdate>(&r.body); c && correct.contains(c->p)) {
      final_length[c->p.value] = c->chain.length();
    }
  }
  bool all_reached = true;
  for (ProcessId p : correct_ids) all_reached = all_reached && final_length[p.value] > cfg.target_level;
  if (all_reached) return pass(kName, "every correct process reached level " + std::to_string(cfg.target_level));

  // Checkpoint window: the slowest post-recovery level (f+2 rounds at the
  // grace-period round) plus a pull exchange, doubled.
  const DurationFn& d = cfg.protocol.durations;
  const Time grace = 2 * recovery_grace(cfg);
  const Time from = cfg.gst + grace;
  const Round slow_round = delta_inv(d, std::max<Time>(0, from - cfg.protocol.genesis.t0)) + 1;
  const Time window =
      2 * (d.rounds_total(slow_round + cfg.protocol.committee.f + 2) + cfg.protocol.pull_interval + 2 * cfg.delta);

  for (ProcessId p : correct_ids) {
    Time last = from;
    Level level = 0;
    auto check_gap = [&](Time until) -> std::optional<std::size_t> {
      if (until - last <= window) return std::nullopt;
      const Time deadline = last + window;
      for (std::size_t i = 0; i < trace.records.size(); ++i) {
        if (trace.records[i].t > deadline) return i;
      }
      return trace.records.empty() ? 0 : trace.records.size() - 1;
    };
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
      const auto* c = std::get_if<rec::ChainUpdate>(&trace.records[i].body);
      if (!c || c->p != p) continue;
      const Level now = c->chain.length();
      if (now > level) {
        if (trace.records[i].t > from) {
          if (auto at = check_gap(trace.records[i].t)) {
            return fail(kName, *at,
                        to_string(p) + " made no progress for more than " + std::to_string(window) + "us after " +
                            std::to_string(last));
          }
          last = trace.records[i].t;
        }
        level = now;
      }
    }
    if (level > cfg.target_level) continue;
    if (auto at = check_gap(trace.end_time)) {
      return fail(kName, *at,
                  to_string(p) + " made no progress for more than " + std::to_string(window) + "us after " +
                      std::to_string(last));
    }
  }
  return inconclusive(kName, "run ended (" + trace.stop_reason + ") before every correct process reached level " +
                                 std::to_string(cfg.target_level));
}

RecoveryReport recovery_bound(const Trace& trace) {
  const SimConfig& cfg = trace.config;
  const DurationFn& d = cfg.protocol.durations;
  const auto correct_ids = cfg.correct_ids();
  const auto correct = correct_set(trace);
  RecoveryReport rep;

  std::map<std::uint32_t, Chain> at_gst;
  for (const auto& r : trace.records) {
    if (r.t > cfg.gst) break;
    if (const auto* c = std::get_if<rec::ChainUpdate>(&r.body); c && correct.contains(c->p)) at_gst[c->p.value] = c->chain;
  }
  rep.level_tau = 0;
  for (const auto& [p, c] : at_gst) rep.level_tau = std::max(rep.level_tau, c.length() - 1);
  rep.level_start = cfg.protocol.genesis.t0;
  bool first = true;
  for (const auto& [p, c] : at_gst) {
    if (c.length() - 1 != rep.level_tau) continue;
    const Time s = level_start(c, d, cfg.protocol.genesis.t0);
    rep.level_start = first ? s : std::min(rep.level_start, s);
    first = false;
  }

  rep.pull_delay = 2 * cfg.delta;
  const Time I = cfg.protocol.pull_interval;
  rep.r = delta_inv(d, std::max<Time>(0, cfg.gst + I + rep.pull_delay - rep.level_start));
  rep.r_prime = delta_inv(d, std::max<Time>(0, cfg.gst - rep.level_start));
  rep.bound = std::max({cfg.delta_err, I + rep.pull_delay + d.round(rep.r), d.round(rep.r_prime) + d.round(rep.r_prime + 1)});

  // First instant >= GST at which every correct process starts the same
  // round of the same level.
  const std::size_t n_correct = correct_ids.size();
  std::size_t i = 0;
  const auto& recs = trace.records;
  while (i < recs.size() && !rep.tau_rt) {
    const Time t = recs[i].t;
    std::map<std::pair<Level, Round>, std::set<std::uint32_t>> starts;
    for (; i < recs.size() && recs[i].t == t; ++i) {
      const auto* s = std::get_if<rec::PhaseStart>(&recs[i].body);
      if (t < cfg.gst || !s || !correct.contains(s->p)) continue;
      if (s->phase == Phase::Propose && s->offset == 0) starts[{s->level, s->round}].insert(s->p.value);
    }
    for (const auto& [key, who] : starts) {
      if (who.size() == n_correct) rep.tau_rt = t;
    }
  }
  if (rep.tau_rt) rep.measured = *rep.tau_rt - cfg.gst;
  return rep;
}

Verdict check_recovery(const Trace& trace) {
  constexpr const char* kName = "recovery";
  const RecoveryReport rep = recovery_bound(trace);
  const std::string summary = "bound " + std::to_string(rep.bound) + "us (level_tau " + std::to_string(rep.level_tau) +
                              ", r " + std::to_string(rep.r) + ", r' " + std::to_string(rep.r_prime) + ")";
  if (!rep.measured) return inconclusive(kName, "no synchronized round start after GST; " + summary);
  const std::string detail = "measured " + std::to_string(*rep.measured) + "us, " + summary;
  if (rep.pass()) return pass(kName, detail);
  std::size_t index = 0;
  while (index < trace.records.size() && trace.records[index].t < *rep.tau_rt) ++index;
  return fail(kName, index, detail);
}

const std::vector<std::string>& property_names() {
  static const std::vector<std::string> names = {"agreement",    "validity",    "vote_once", "qc_uniqueness",
                                                 "buffer_bound", "termination", "progress",  "recovery"};
  return names;
}

const std::vector<std::string>& safety_property_names() {
  static const std::vector<std::string> names = {"agreement", "validity", "vote_once", "qc_uniqueness",
                                                 "buffer_bound"};
  return names;
}

Verdict run_property(const std::string& name, const Trace& trace) {
  if (name == "agreement") return check_agreement(trace);
  if (name == "validity") return check_validity(trace);
  if (name == "vote_once") return check_vote_once(trace);
  if (name == "qc_uniqueness") return check_qc_uniqueness(trace);
  if (name == "buffer_bound") return check_buffer_bound(trace);
  if (name == "termination") return check_termination(trace, 1);
  if (name == "progress") return check_progress(trace);
  if (name == "recovery") return check_recovery(trace);
  throw ConfigError("unknown property '" + name + "'");
}

}  // namespace tenderbake
