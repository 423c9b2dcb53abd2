#pragma once

// Hand-corrupted traces: a clean fault-free run with one record inserted that
// breaks exactly one safety property. `index` is where the record went, which
// is what the oracle has to report.

#include "support.hpp"
#include "tenderbake/sim.hpp"

namespace tbtest {

struct Corrupted {
  Trace trace;
  std::size_t index = 0;
};

inline Trace clean_trace(std::uint64_t seed = 5) {
  SimConfig cfg = sim_config(1, seed);
  cfg.target_level = 4;
  return run_sim(cfg);
}

inline const rec::ChainUpdate& last_chain_update(const Trace& t) {
  for (auto it = t.records.rbegin(); it != t.records.rend(); ++it) {
    if (const auto* c = std::get_if<rec::ChainUpdate>(&it->body); c && c->chain.length() >= 3) return *c;
  }
  throw std::logic_error("trace has no chain of length 3");
}

// A correct process reports a chain that forks at level 1 from what the
// others committed. The fork itself is a valid chain.
inline Corrupted corrupt_agreement(const Trace& t) {
  const auto& c = t.config.protocol.committee;
  const rec::ChainUpdate& last = last_chain_update(t);
  const Chain fork = honest_chain(c, t.config.protocol.genesis, {1, 1}, 12345);
  rec::ChainUpdate u{last.p, ChainCause::Adopt, fork, head_qc(fork, c), 1};
  const std::size_t at = t.records.size();
  return {with_record(t, at, Record{t.end_time, u}), at};
}

// The latest chain again, but its head certificate is one vote short.
inline Corrupted corrupt_validity(const Trace& t) {
  const auto& c = t.config.protocol.committee;
  rec::ChainUpdate u = last_chain_update(t);
  u.cause = ChainCause::Adopt;
  u.cert = head_qc(u.chain, c);
  u.cert->votes.resize(static_cast<std::size_t>(2 * c.f));
  const std::size_t at = t.records.size();
  return {with_record(t, at, Record{t.end_time, u}), at};
}

// Right after a correct preendorsement, the same process preendorses a
// different value in the same round.
inline Corrupted corrupt_vote_once(const Trace& t) {
  const std::size_t i = find_record<rec::Send>(t, [](const rec::Send& s) { return s.msg.kind == MessageKind::Preendorse; });
  rec::Send s = std::get<rec::Send>(t.records.at(i).body);
  s.id += 1'000'000'000;
  Digest other = s.msg.vote().value_hash;
  other.bytes[0] ^= 0xff;
  s.msg.payload = VotePayload{other};
  seal(s.msg);
  return {with_record(t, i + 1, Record{t.records[i].t, s}), i + 1};
}

// After a decision, someone broadcasts a well-formed preendorsement
// certificate for another value at the decided level and round.
inline Corrupted corrupt_qc_uniqueness(const Trace& t) {
  const auto& c = t.config.protocol.committee;
  const std::size_t i = find_record<rec::Decide>(t, [](const rec::Decide&) { return true; });
  const rec::Decide& d = std::get<rec::Decide>(t.records.at(i).body);
  const Value other{proposer_in(ids(1, static_cast<std::uint32_t>(c.n)), d.round), d.level, d.round, 999};
  const VoteSubject s{QcKind::Preendorsement, d.level, d.round, d.qc.pred_hash, hash_of(other)};
  Message m;
  m.kind = MessageKind::Preendorsements;
  m.sender = d.p;
  m.level = d.level;
  m.round = d.round;
  m.pred_hash = d.qc.pred_hash;
  m.payload = QcPayload{make_qc(s, ids(1, static_cast<std::uint32_t>(c.quorum()))), other};
  seal(m);
  rec::Send send{d.p, 2'000'000'000, std::nullopt, m};
  return {with_record(t, i + 1, Record{t.records[i].t, send}), i + 1};
}

// A correct process reports one message over the buffer bound.
inline Corrupted corrupt_buffer_bound(const Trace& t) {
  const std::size_t at = t.records.size() / 2;
  const auto n = static_cast<std::uint64_t>(t.config.protocol.committee.n);
  rec::BufferSize b{t.config.correct_ids().front(), 4 * n + 3};
  return {with_record(t, at, Record{t.records[at].t, b}), at};
}

}  // namespace tbtest
