#include "tenderbake/encoding.hpp"

#include <algorithm>

#include "tenderbake/errors.hpp"

namespace tenderbake {

namespace {

constexpr std::uint8_t kAbsent = 0;
constexpr std::uint8_t kPresent = 1;

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

void Encoder::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void Encoder::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void Encoder::bytes(std::span<const std::uint8_t> b) {
  u32(static_cast<std::uint32_t>(b.size()));
  out_.insert(out_.end(), b.begin(), b.end());
}

void Encoder::put(const Value& v) {
  put(v.creator);
  i64(v.level);
  i64(v.round);
  u64(v.nonce);
}

void Encoder::put(const OutputValue& v) {
  put(v.u);
  digest(v.h);
}

void Encoder::put(const Signature& s) {
  put(s.signer);
  digest(s.payload);
}

void Encoder::put(const QC& qc) {
  u8(static_cast<std::uint8_t>(qc.kind));
  i64(qc.level);
  i64(qc.round);
  digest(qc.pred_hash);
  digest(qc.value_hash);
  // Votes are canonicalised by signer regardless of insertion order.
  std::vector<Signature> votes = qc.votes;
  std::stable_sort(votes.begin(), votes.end(), [](const Signature& a, const Signature& b) {
    return a.signer < b.signer;
  });
  u32(static_cast<std::uint32_t>(votes.size()));
  for (const auto& v : votes) put(v);
}

void Encoder::put(const std::optional<QC>& qc) {
  if (!qc) {
    u8(kAbsent);
    return;
  }
  u8(kPresent);
  put(*qc);
}

void Encoder::put(const BlockHeader& h) {
  i64(h.level);
  i64(h.round);
  put(h.proposer);
  digest(h.pred_hash);
  put(h.eqc);
  i64(h.endorsable_round);
  put(h.pqc);
}

void Encoder::put(const Block& b) {
  put(b.header);
  put(b.contents);
}

void Encoder::put_unsigned(const Message& m) {
  u8(static_cast<std::uint8_t>(m.kind));
  put(m.sender);
  i64(m.level);
  i64(m.round);
  digest(m.pred_hash);
  switch (m.kind) {
    case MessageKind::Propose: {
      const auto& p = m.propose();
      put(p.eqc);
      put(p.value);
      i64(p.endorsable_round);
      put(p.pqc);
      break;
    }
    case MessageKind::Preendorse:
    case MessageKind::Endorse:
      digest(m.vote().value_hash);
      break;
    case MessageKind::Preendorsements:
      put(m.certificate().pqc);
      put(m.certificate().value);
      break;
  }
}

void Encoder::put(const Message& m) {
  put_unsigned(m);
  put(m.sig);
}

void Decoder::need(std::size_t n) const {
  if (in_.size() - pos_ < n) throw DecodeError("truncated input");
}

std::uint8_t Decoder::u8() {
  need(1);
  return in_[pos_++];
}

std::uint32_t Decoder::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_++];
  return v;
}

std::uint64_t Decoder::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | in_[pos_++];
  return v;
}

Digest Decoder::digest() {
  need(Digest::kSize);
  Digest d;
  std::copy_n(in_.begin() + static_cast<std::ptrdiff_t>(pos_), Digest::kSize, d.bytes.begin());
  pos_ += Digest::kSize;
  return d;
}

Value Decoder::value() {
  Value v;
  v.creator = process_id();
  v.level = i64();
  v.round = i64();
  v.nonce = u64();
  return v;
}

Signature Decoder::signature() {
  Signature s;
  s.signer = process_id();
  s.payload = digest();
  return s;
}

QC Decoder::qc() {
  QC qc;
  std::uint8_t kind = u8();
  if (kind > 1) throw DecodeError("bad certificate kind");
  qc.kind = static_cast<QcKind>(kind);
  qc.level = i64();
  qc.round = i64();
  qc.pred_hash = digest();
  qc.value_hash = digest();
  std::uint32_t count = u32();
  // Each vote needs 20 bytes; reject absurd counts before allocating.
  need(static_cast<std::size_t>(count) * 20);
  qc.votes.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) qc.votes.push_back(signature());
  return qc;
}

std::optional<QC> Decoder::optional_qc() {
  std::uint8_t tag = u8();
  if (tag == kAbsent) return std::nullopt;
  if (tag != kPresent) throw DecodeError("bad optional tag");
  return qc();
}

BlockHeader Decoder::header() {
  BlockHeader h;
  h.level = i64();
  h.round = i64();
  h.proposer = process_id();
  h.pred_hash = digest();
  h.eqc = optional_qc();
  h.endorsable_round = i64();
  h.pqc = optional_qc();
  return h;
}

Block Decoder::block() {
  Block b;
  b.header = header();
  b.contents = value();
  return b;
}

Message Decoder::message() {
  Message m;
  std::uint8_t kind = u8();
  if (kind > 3) throw DecodeError("bad message kind");
  m.kind = static_cast<MessageKind>(kind);
  m.sender = process_id();
  m.level = i64();
  m.round = i64();
  m.pred_hash = digest();
  switch (m.kind) {
    case MessageKind::Propose: {
      ProposePayload p;
      p.eqc = optional_qc();
      p.value = value();
      p.endorsable_round = i64();
      p.pqc = optional_qc();
      m.payload = std::move(p);
      break;
    }
    case MessageKind::Preendorse:
    case MessageKind::Endorse:
      m.payload = VotePayload{digest()};
      break;
    case MessageKind::Preendorsements: {
      QcPayload p;
      p.pqc = qc();
      p.value = value();
      m.payload = std::move(p);
      break;
    }
  }
  m.sig = signature();
  return m;
}

void Decoder::expect_done() const {
  if (!done()) throw DecodeError("trailing bytes after encoded object");
}

Bytes encode(const Value& v) {
  Encoder e;
  e.put(v);
  return e.take();
}

Bytes encode(const QC& qc) {
  Encoder e;
  e.put(qc);
  return e.take();
}

Bytes encode(const Block& b) {
  Encoder e;
  e.put(b);
  return e.take();
}

Bytes encode(const Message& m) {
  Encoder e;
  e.put(m);
  return e.take();
}

Value decode_value(std::span<const std::uint8_t> in) {
  Decoder d(in);
  Value v = d.value();
  d.expect_done();
  return v;
}

QC decode_qc(std::span<const std::uint8_t> in) {
  Decoder d(in);
  QC qc = d.qc();
  d.expect_done();
  return qc;
}

Block decode_block(std::span<const std::uint8_t> in) {
  Decoder d(in);
  Block b = d.block();
  d.expect_done();
  return b;
}

Message decode_message(std::span<const std::uint8_t> in) {
  Decoder d(in);
  Message m = d.message();
  d.expect_done();
  return m;
}

std::string to_hex(std::span<const std::uint8_t> in) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(in.size() * 2);
  for (std::uint8_t b : in) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

Bytes from_hex(const std::string& text) {
  if (text.size() % 2 != 0) throw DecodeError("odd-length hex string");
  Bytes out;
  out.reserve(text.size() / 2);
  for (std::size_t i = 0; i < text.size(); i += 2) {
    int hi = hex_nibble(text[i]);
    int lo = hex_nibble(text[i + 1]);
    if (hi < 0 || lo < 0) throw DecodeError("invalid hex digit");
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

}  // namespace tenderbake
