#include "tenderbake/crypto.hpp"

#include <openssl/sha.h>

#include <algorithm>

#include "tenderbake/errors.hpp"

namespace tenderbake {

Digest digest_of(std::span<const std::uint8_t> bytes) {
  std::uint8_t full[SHA256_DIGEST_LENGTH];
  SHA256(bytes.data(), bytes.size(), full);
  Digest d;
  std::copy_n(full, Digest::kSize, d.bytes.begin());
  return d;
}

Digest hash_of(const Value& v) {
  Encoder e;
  e.put(v);
  return digest_of(e.data());
}

Digest hash_of(const Block& b) {
  Encoder e;
  e.put(b);
  return digest_of(e.data());
}

Digest vote_digest(const VoteSubject& s) {
  Encoder e;
  e.u8(0xa0);  // domain separation from whole-message digests
  e.u8(static_cast<std::uint8_t>(s.kind));
  e.i64(s.level);
  e.i64(s.round);
  e.digest(s.pred_hash);
  e.digest(s.value_hash);
  return digest_of(e.data());
}

QcKind vote_kind(MessageKind kind) {
  return kind == MessageKind::Endorse ? QcKind::Endorsement : QcKind::Preendorsement;
}

Digest message_digest(const Message& m) {
  if (m.kind == MessageKind::Preendorse || m.kind == MessageKind::Endorse) {
    return vote_digest({vote_kind(m.kind), m.level, m.round, m.pred_hash, m.vote().value_hash});
  }
  Encoder e;
  e.put_unsigned(m);
  return digest_of(e.data());
}

Signature sign(ProcessId self, const Digest& payload) { return Signature{self, payload}; }

void seal(Message& m) { m.sig = sign(m.sender, message_digest(m)); }

bool signature_valid(const Message& m) {
  return m.sig.signer == m.sender && m.sig.payload == message_digest(m);
}

Block block_of(const Message& propose) {
  if (propose.kind != MessageKind::Propose) throw Error("block_of: not a Propose message");
  const auto& p = propose.propose();
  Block b;
  b.header.level = propose.level;
  b.header.round = propose.round;
  b.header.proposer = propose.sender;
  b.header.pred_hash = propose.pred_hash;
  b.header.eqc = p.eqc;
  b.header.endorsable_round = p.endorsable_round;
  b.header.pqc = p.pqc;
  b.contents = p.value;
  return b;
}

Message propose_of(const Block& block) {
  Message m;
  m.kind = MessageKind::Propose;
  m.sender = block.header.proposer;
  m.level = block.header.level;
  m.round = block.header.round;
  m.pred_hash = block.header.pred_hash;
  m.payload = ProposePayload{block.header.eqc, block.contents, block.header.endorsable_round, block.header.pqc};
  seal(m);
  return m;
}

}  // namespace tenderbake
