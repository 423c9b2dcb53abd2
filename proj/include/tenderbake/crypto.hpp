#pragma once

#include <span>

#include "tenderbake/encoding.hpp"
#include "tenderbake/types.hpp"

namespace tenderbake {

// Truncated SHA-256. Within a run distinct inputs are assumed to map to
// distinct digests.
Digest digest_of(std::span<const std::uint8_t> bytes);

Digest hash_of(const Value& v);
Digest hash_of(const Block& b);

// The digest every vote in a certificate signs.
Digest vote_digest(const VoteSubject& subject);
// The digest a message signature covers. For Preendorse and Endorse this is
// the vote digest, so the message signature doubles as the certificate vote.
Digest message_digest(const Message& m);

QcKind vote_kind(MessageKind kind);

// Signatures are structural: authenticity is enforced by the simulator, which
// only lets a process emit signatures carrying its own id.
Signature sign(ProcessId self, const Digest& payload);
void seal(Message& m);
bool signature_valid(const Message& m);

// Conversions between a proposal and the block it denotes.
Block block_of(const Message& propose);
Message propose_of(const Block& block);

}  // namespace tenderbake
