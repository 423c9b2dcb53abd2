#pragma once

// Builders shared by the unit tests and the acceptance binary. Everything
// here is constructed from first principles (signatures over vote digests,
// hand-assembled headers) rather than through the protocol code under test.

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "tenderbake/chain.hpp"
#include "tenderbake/config.hpp"
#include "tenderbake/crypto.hpp"
#include "tenderbake/node.hpp"
#include "tenderbake/trace.hpp"

namespace tbtest {

using namespace tenderbake;

inline std::vector<ProcessId> ids(std::uint32_t first, std::uint32_t last) {
  std::vector<ProcessId> out;
  for (std::uint32_t i = first; i <= last; ++i) out.push_back(ProcessId{i});
  return out;
}

inline CommitteeConfig committee_cfg(int f, int universe = 0, Rotation rotation = Rotation::Fixed, int k = 2) {
  CommitteeConfig c;
  c.f = f;
  c.n = 3 * f + 1;
  c.k = k;
  c.universe = ids(1, static_cast<std::uint32_t>(universe > 0 ? universe : c.n));
  c.seed = "test-committee";
  c.rotation = rotation;
  return c;
}

inline Genesis genesis_for(const CommitteeConfig& c, Time t0 = 0) { return Genesis{t0, "test-genesis", c.k}; }

inline QC make_qc(const VoteSubject& s, const std::vector<ProcessId>& signers) {
  QC qc{s.kind, s.level, s.round, s.pred_hash, s.value_hash, {}};
  for (ProcessId p : signers) qc.add_vote(sign(p, vote_digest(s)));
  return qc;
}

inline std::vector<ProcessId> first_n(const std::vector<ProcessId>& v, std::size_t n) {
  return {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(std::min(n, v.size()))};
}

// Endorsement certificate for the head of `chain`, signed by the first 2f+1
// members of the head level's committee.
inline std::optional<QC> head_qc(const Chain& chain, const CommitteeConfig& c) {
  if (chain.length() <= 1) return std::nullopt;
  const Level l = chain.length() - 1;
  const Block& head = chain.head();
  const VoteSubject s{QcKind::Endorsement, l, head.header.round, head.header.pred_hash, hash_of(head.contents)};
  return make_qc(s, first_n(committee_at_level(chain, l, c), static_cast<std::size_t>(c.quorum())));
}

// A valid block for the next level, proposed fresh at `round`.
inline Block next_block(const Chain& chain, const CommitteeConfig& c, Round round, std::uint64_t nonce = 0) {
  const Level l = chain.length();
  const auto members = committee_at_level(chain, l, c);
  Block b;
  b.header.level = l;
  b.header.round = round;
  b.header.proposer = proposer_in(members, round);
  b.header.pred_hash = chain.head_hash();
  b.header.eqc = l >= 2 ? head_qc(chain, c) : std::nullopt;
  b.contents = Value{b.header.proposer, l, round, nonce};
  return b;
}

// Genesis plus one block per entry of `rounds`.
inline Chain honest_chain(const CommitteeConfig& c, const Genesis& g, const std::vector<Round>& rounds,
                          std::uint64_t nonce = 0) {
  Chain chain = Chain::from_genesis(g);
  for (Round r : rounds) chain = chain.appended(next_block(chain, c, r, nonce));
  return chain;
}

inline ProtocolParams protocol_params(int f, int universe = 0, Rotation rotation = Rotation::Fixed) {
  ProtocolParams p;
  p.committee = committee_cfg(f, universe, rotation);
  p.genesis = genesis_for(p.committee);
  return p;
}

inline SimConfig sim_config(int f, std::uint64_t seed, int universe = 0, Rotation rotation = Rotation::Shuffle) {
  SimConfig cfg;
  cfg.seed = seed;
  cfg.protocol = protocol_params(f, universe, rotation);
  for (ProcessId p : cfg.protocol.committee.universe) cfg.processes.push_back(ProcessSpec{p, std::nullopt, 0, false});
  return cfg;
}

// Fresh copy of `trace` with `record` inserted before position `at`.
inline Trace with_record(const Trace& trace, std::size_t at, Record record) {
  Trace out = trace;
  out.records.insert(out.records.begin() + static_cast<std::ptrdiff_t>(at), std::move(record));
  return out;
}

template <typename T>
std::size_t find_record(const Trace& trace, const std::function<bool(const T&)>& pred, std::size_t from = 0) {
  for (std::size_t i = from; i < trace.records.size(); ++i) {
    if (const auto* b = std::get_if<T>(&trace.records[i].body); b && pred(*b)) return i;
  }
  return trace.records.size();
}

}  // namespace tbtest
