#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tenderbake/types.hpp"

namespace tenderbake {

using Bytes = std::vector<std::uint8_t>;

// Canonical encoding: fixed-width big-endian integers, one tag byte per
// optional field, length-prefixed sequences, certificate votes sorted by
// signer. The same bytes are used for hashing and for trace files.
class Encoder {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void digest(const Digest& d) { out_.insert(out_.end(), d.bytes.begin(), d.bytes.end()); }
  void bytes(std::span<const std::uint8_t> b);

  void put(ProcessId p) { u32(p.value); }
  void put(const Value& v);
  void put(const OutputValue& v);
  void put(const Signature& s);
  void put(const QC& qc);
  void put(const std::optional<QC>& qc);
  void put(const BlockHeader& h);
  void put(const Block& b);
  // Every field except the signature.
  void put_unsigned(const Message& m);
  void put(const Message& m);

  const Bytes& data() const { return out_; }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class Decoder {
 public:
  explicit Decoder(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  Digest digest();

  ProcessId process_id() { return ProcessId{u32()}; }
  Value value();
  Signature signature();
  QC qc();
  std::optional<QC> optional_qc();
  BlockHeader header();
  Block block();
  Message message();

  bool done() const { return pos_ == in_.size(); }
  // Throws DecodeError unless all input was consumed.
  void expect_done() const;

 private:
  void need(std::size_t n) const;

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

Bytes encode(const Value& v);
Bytes encode(const QC& qc);
Bytes encode(const Block& b);
Bytes encode(const Message& m);

Value decode_value(std::span<const std::uint8_t> in);
QC decode_qc(std::span<const std::uint8_t> in);
Block decode_block(std::span<const std::uint8_t> in);
Message decode_message(std::span<const std::uint8_t> in);

std::string to_hex(std::span<const std::uint8_t> in);
Bytes from_hex(const std::string& text);

}  // namespace tenderbake
