#include "tenderbake/types.hpp"

#include <algorithm>

#include "tenderbake/encoding.hpp"
#include "tenderbake/errors.hpp"

namespace tenderbake {

std::string Digest::hex() const { return to_hex(bytes); }

Digest Digest::from_hex(const std::string& text) {
  Bytes raw = tenderbake::from_hex(text);
  if (raw.size() != kSize) throw DecodeError("digest must be " + std::to_string(kSize) + " bytes");
  Digest d;
  std::copy(raw.begin(), raw.end(), d.bytes.begin());
  return d;
}

bool Digest::is_zero() const {
  return std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; });
}

bool QuorumCertificate::add_vote(const Signature& sig) {
  auto it = std::lower_bound(votes.begin(), votes.end(), sig,
                             [](const Signature& a, const Signature& b) { return a.signer < b.signer; });
  if (it != votes.end() && it->signer == sig.signer) return false;
  votes.insert(it, sig);
  return true;
}

std::size_t QuorumCertificate::distinct_signers() const {
  std::vector<ProcessId> ids;
  ids.reserve(votes.size());
  for (const auto& v : votes) ids.push_back(v.signer);
  std::sort(ids.begin(), ids.end());
  return static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
}

const char* to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::Propose:
      return "Propose";
    case MessageKind::Preendorse:
      return "Preendorse";
    case MessageKind::Endorse:
      return "Endorse";
    case MessageKind::Preendorsements:
      return "Preendorsements";
  }
  return "Unknown";
}

const char* to_string(QcKind kind) {
  return kind == QcKind::Preendorsement ? "Preendorsement" : "Endorsement";
}

std::string to_string(ProcessId id) {
  if (id == kNoProcess) return "none";
  return "p" + std::to_string(id.value);
}

}  // namespace tenderbake
