#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tenderbake/config.hpp"
#include "tenderbake/effects.hpp"

namespace tenderbake {

inline constexpr const char* kTraceSchema = "tenderbake-trace/1";

enum class DropReason : std::uint8_t { Loss = 0, Isolated = 1, NotStarted = 2 };

const char* to_string(DropReason r);

namespace rec {

// A message leaving process p. `to` is empty for a broadcast.
struct Send {
  ProcessId p;
  std::uint64_t id = 0;
  std::optional<ProcessId> to;
  Message msg;
  friend bool operator==(const Send&, const Send&) = default;
};

struct Deliver {
  std::uint64_t id = 0;
  ProcessId to;
  friend bool operator==(const Deliver&, const Deliver&) = default;
};

struct Drop {
  std::uint64_t id = 0;
  ProcessId to;
  DropReason reason = DropReason::Loss;
  friend bool operator==(const Drop&, const Drop&) = default;
};

struct Decide {
  ProcessId p;
  Level level = 0;
  Round round = 0;
  Digest block;
  QC qc;
  friend bool operator==(const Decide&, const Decide&) = default;
};

struct ChainUpdate {
  ProcessId p;
  ChainCause cause = ChainCause::Start;
  Chain chain;
  std::optional<QC> cert;
  Round old_round = 0;
  friend bool operator==(const ChainUpdate&, const ChainUpdate&) = default;
};

struct PhaseStart {
  ProcessId p;
  Level level = 0;
  Round round = 0;
  Phase phase = Phase::Propose;
  Time offset = 0;
  bool baker = false;
  friend bool operator==(const PhaseStart&, const PhaseStart&) = default;
};

struct Lock {
  ProcessId p;
  Level level = 0;
  Round round = 0;
  Digest value;
  friend bool operator==(const Lock&, const Lock&) = default;
};

struct BufferSize {
  ProcessId p;
  std::uint64_t size = 0;
  friend bool operator==(const BufferSize&, const BufferSize&) = default;
};

struct Pull {
  ProcessId p;
  friend bool operator==(const Pull&, const Pull&) = default;
};

// A pull answer from p to `to`.
struct ChainSend {
  ProcessId p;
  std::uint64_t id = 0;
  ProcessId to;
  Chain chain;
  std::optional<ProposalOrCertificate> poc;
  friend bool operator==(const ChainSend&, const ChainSend&) = default;
};

struct ChainDeliver {
  std::uint64_t id = 0;
  ProcessId to;
  friend bool operator==(const ChainDeliver&, const ChainDeliver&) = default;
};

struct ChainDrop {
  std::uint64_t id = 0;
  ProcessId to;
  DropReason reason = DropReason::Loss;
  friend bool operator==(const ChainDrop&, const ChainDrop&) = default;
};

}  // namespace rec

using RecordBody = std::variant<rec::Send, rec::Deliver, rec::Drop, rec::Decide, rec::ChainUpdate, rec::PhaseStart,
                                rec::Lock, rec::BufferSize, rec::Pull, rec::ChainSend, rec::ChainDeliver,
                                rec::ChainDrop>;

struct Record {
  Time t = 0;  // virtual time
  RecordBody body;
  friend bool operator==(const Record&, const Record&) = default;
};

struct Trace {
  SimConfig config;
  std::vector<Record> records;
  // Why the run stopped: "target", "horizon" or "quiescent".
  std::string stop_reason;
  Time end_time = 0;
};

bool operator==(const Trace& a, const Trace& b);

// JSON lines: line 1 is the header (schema id, config), then one line per
// record; blocks are emitted once as "block" lines before first use.
void write_trace(std::ostream& out, const Trace& trace);
std::string trace_to_string(const Trace& trace);
// Throws DecodeError on malformed input.
Trace read_trace(std::istream& in);
Trace trace_from_string(const std::string& text);

void write_trace_file(const std::string& path, const Trace& trace);
Trace read_trace_file(const std::string& path);

}  // namespace tenderbake
