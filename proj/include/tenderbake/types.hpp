#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tenderbake {

// All protocol and simulator times are integer microseconds.
using Time = std::int64_t;
using Level = std::int64_t;
using Round = std::int64_t;

struct ProcessId {
  std::uint32_t value = 0;

  friend auto operator<=>(ProcessId, ProcessId) = default;
};

inline constexpr ProcessId kNoProcess{0xffffffffu};

struct Digest {
  static constexpr std::size_t kSize = 16;
  std::array<std::uint8_t, kSize> bytes{};

  friend auto operator<=>(const Digest&, const Digest&) = default;

  std::string hex() const;
  static Digest from_hex(const std::string& text);
  bool is_zero() const;
};

struct DigestHash {
  std::size_t operator()(const Digest& d) const noexcept {
    std::size_t h = 0;
    for (std::size_t i = 0; i < sizeof(std::size_t); ++i) h = (h << 8) | d.bytes[i];
    return h;
  }
};

struct Signature {
  ProcessId signer;
  Digest payload;

  friend auto operator<=>(const Signature&, const Signature&) = default;
};

// Block contents. In simulation a value is identified by who created it, for
// which level, at which round, and a per-creator nonce.
struct Value {
  ProcessId creator;
  Level level = 0;
  Round round = 0;
  std::uint64_t nonce = 0;

  friend auto operator<=>(const Value&, const Value&) = default;
};

// What one consensus instance decides: contents plus predecessor hash.
struct OutputValue {
  Value u;
  Digest h;

  friend bool operator==(const OutputValue&, const OutputValue&) = default;
};

enum class QcKind : std::uint8_t { Preendorsement = 0, Endorsement = 1 };

// The fields every vote inside a certificate attests.
struct VoteSubject {
  QcKind kind = QcKind::Preendorsement;
  Level level = 0;
  Round round = 0;
  Digest pred_hash;
  Digest value_hash;

  friend bool operator==(const VoteSubject&, const VoteSubject&) = default;
};

struct QuorumCertificate {
  QcKind kind = QcKind::Preendorsement;
  Level level = 0;
  Round round = 0;
  Digest pred_hash;
  Digest value_hash;
  // Sorted by signer id.
  std::vector<Signature> votes;

  VoteSubject subject() const { return {kind, level, round, pred_hash, value_hash}; }
  // Inserts keeping the signer order; returns false if the signer is present.
  bool add_vote(const Signature& sig);
  std::size_t distinct_signers() const;

  friend bool operator==(const QuorumCertificate&, const QuorumCertificate&) = default;
};

using QC = QuorumCertificate;

struct BlockHeader {
  Level level = 0;
  Round round = 0;
  // Proposer of record: the sender of the Propose message this block came from.
  ProcessId proposer = kNoProcess;
  Digest pred_hash;
  std::optional<QC> eqc;
  Round endorsable_round = 0;
  std::optional<QC> pqc;

  friend bool operator==(const BlockHeader&, const BlockHeader&) = default;
};

struct Block {
  BlockHeader header;
  Value contents;

  friend bool operator==(const Block&, const Block&) = default;
};

enum class MessageKind : std::uint8_t {
  Propose = 0,
  Preendorse = 1,
  Endorse = 2,
  Preendorsements = 3,
};

struct ProposePayload {
  std::optional<QC> eqc;
  Value value;
  Round endorsable_round = 0;
  std::optional<QC> pqc;

  friend bool operator==(const ProposePayload&, const ProposePayload&) = default;
};

struct VotePayload {
  Digest value_hash;

  friend bool operator==(const VotePayload&, const VotePayload&) = default;
};

// The certificate travels with the value it certifies so that receivers can
// adopt it as their endorsable value.
struct QcPayload {
  QC pqc;
  Value value;

  friend bool operator==(const QcPayload&, const QcPayload&) = default;
};

using Payload = std::variant<ProposePayload, VotePayload, QcPayload>;

struct Message {
  MessageKind kind = MessageKind::Propose;
  ProcessId sender;
  Level level = 0;
  Round round = 0;
  Digest pred_hash;
  Payload payload;
  Signature sig;

  const ProposePayload& propose() const { return std::get<ProposePayload>(payload); }
  const VotePayload& vote() const { return std::get<VotePayload>(payload); }
  const QcPayload& certificate() const { return std::get<QcPayload>(payload); }

  friend bool operator==(const Message&, const Message&) = default;
};

struct Genesis {
  Time t0 = 0;
  std::string seed;
  int k = 1;
};

// Either a proposal (a Propose message) or a bare endorsement certificate.
using ProposalOrCertificate = std::variant<Message, QC>;

const char* to_string(MessageKind kind);
const char* to_string(QcKind kind);
std::string to_string(ProcessId id);

}  // namespace tenderbake

template <>
struct std::hash<tenderbake::ProcessId> {
  std::size_t operator()(tenderbake::ProcessId p) const noexcept { return p.value; }
};
