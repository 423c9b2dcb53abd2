#include "tenderbake/trace.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json_io.hpp"
#include "tenderbake/crypto.hpp"
#include "tenderbake/errors.hpp"

namespace tenderbake {

using json_io::field;
using json_io::json;

const char* to_string(DropReason r) {
  switch (r) {
    case DropReason::Loss:
      return "loss";
    case DropReason::Isolated:
      return "isolated";
    case DropReason::NotStarted:
      return "not_started";
  }
  return "unknown";
}

bool operator==(const Trace& a, const Trace& b) {
  return a.records == b.records && a.stop_reason == b.stop_reason && a.end_time == b.end_time &&
         json_io::config_to_json(a.config) == json_io::config_to_json(b.config);
}

namespace {

DropReason drop_reason_from(const std::string& s) {
  for (auto r : {DropReason::Loss, DropReason::Isolated, DropReason::NotStarted}) {
    if (s == to_string(r)) return r;
  }
  throw DecodeError("unknown drop reason " + s);
}

ChainCause cause_from(const std::string& s) {
  for (auto c : {ChainCause::Start, ChainCause::Decide, ChainCause::Adopt, ChainCause::HeadSwap}) {
    if (s == to_string(c)) return c;
  }
  throw DecodeError("unknown chain cause " + s);
}

Phase phase_from(const std::string& s) {
  for (auto p : {Phase::Propose, Phase::Preendorse, Phase::Endorse}) {
    if (s == to_string(p)) return p;
  }
  throw DecodeError("unknown phase " + s);
}

std::string hex(const Message& m) { return to_hex(encode(m)); }
std::string hex(const QC& qc) { return to_hex(encode(qc)); }

json optional_qc(const std::optional<QC>& qc) { return qc ? json(hex(*qc)) : json(nullptr); }

json poc_json(const std::optional<ProposalOrCertificate>& poc) {
  if (!poc) return nullptr;
  if (const auto* m = std::get_if<Message>(&*poc)) return {{"msg", hex(*m)}};
  return {{"qc", hex(std::get<QC>(*poc))}};
}

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void header(const Trace& t) {
    json h = {{"schema", kTraceSchema},
              {"config", json_io::config_to_json(t.config)},
              {"stop", t.stop_reason},
              {"end", t.end_time}};
    line(h);
  }

  void record(std::size_t i, const Record& r) {
    json j = std::visit([&](const auto& b) { return body(b); }, r.body);
    j["i"] = i;
    j["t"] = r.t;
    line(j);
  }

 private:
  void line(const json& j) { out_ << j.dump() << '\n'; }

  json chain(const Chain& c) {
    json hashes = json::array();
    for (const auto& link : c.links()) {
      const std::string h = link->hash.hex();
      if (emitted_.insert(link->hash).second) {
        line({{"k", "block"}, {"hash", h}, {"hex", to_hex(encode(link->block))}});
      }
      hashes.push_back(h);
    }
    return hashes;
  }

  json body(const rec::Send& s) {
    return {{"k", "send"},
            {"p", s.p.value},
            {"id", s.id},
            {"to", s.to ? json(s.to->value) : json(nullptr)},
            {"kind", to_string(s.msg.kind)},
            {"level", s.msg.level},
            {"round", s.msg.round},
            {"msg", hex(s.msg)}};
  }
  json body(const rec::Deliver& d) { return {{"k", "deliver"}, {"id", d.id}, {"to", d.to.value}}; }
  json body(const rec::Drop& d) {
    return {{"k", "drop"}, {"id", d.id}, {"to", d.to.value}, {"reason", to_string(d.reason)}};
  }
  json body(const rec::Decide& d) {
    return {{"k", "decide"},   {"p", d.p.value},       {"level", d.level},
            {"round", d.round}, {"block", d.block.hex()}, {"qc", hex(d.qc)}};
  }
  json body(const rec::ChainUpdate& c) {
    json ch = chain(c.chain);
    return {{"k", "chain"},
            {"p", c.p.value},
            {"cause", to_string(c.cause)},
            {"chain", ch},
            {"cert", optional_qc(c.cert)},
            {"old_round", c.old_round}};
  }
  json body(const rec::PhaseStart& s) {
    return {{"k", "phase"},         {"p", s.p.value},    {"level", s.level}, {"round", s.round},
            {"phase", to_string(s.phase)}, {"offset", s.offset}, {"baker", s.baker}};
  }
  json body(const rec::Lock& l) {
    return {{"k", "lock"}, {"p", l.p.value}, {"level", l.level}, {"round", l.round}, {"value", l.value.hex()}};
  }
  json body(const rec::BufferSize& b) { return {{"k", "buffer"}, {"p", b.p.value}, {"size", b.size}}; }
  json body(const rec::Pull& p) { return {{"k", "pull"}, {"p", p.p.value}}; }
  json body(const rec::ChainSend& c) {
    json ch = chain(c.chain);
    return {{"k", "chain_send"}, {"p", c.p.value}, {"id", c.id}, {"to", c.to.value}, {"chain", ch},
            {"poc", poc_json(c.poc)}};
  }
  json body(const rec::ChainDeliver& d) { return {{"k", "chain_deliver"}, {"id", d.id}, {"to", d.to.value}}; }
  json body(const rec::ChainDrop& d) {
    return {{"k", "chain_drop"}, {"id", d.id}, {"to", d.to.value}, {"reason", to_string(d.reason)}};
  }

  std::ostream& out_;
  std::unordered_set<Digest, DigestHash> emitted_;
};

class Reader {
 public:
  Record record(const json& j) {
    Record r;
    r.t = field<Time>(j, "t");
    const auto k = field<std::string>(j, "k");
    if (k == "send") {
      rec::Send s;
      s.p = pid(j, "p");
      s.id = field<std::uint64_t>(j, "id");
      if (!field<json>(j, "to").is_null()) s.to = pid(j, "to");
      s.msg = decode_message(from_hex(field<std::string>(j, "msg")));
      r.body = std::move(s);
    } else if (k == "deliver") {
      r.body = rec::Deliver{field<std::uint64_t>(j, "id"), pid(j, "to")};
    } else if (k == "drop") {
      r.body = rec::Drop{field<std::uint64_t>(j, "id"), pid(j, "to"),
                         drop_reason_from(field<std::string>(j, "reason"))};
    } else if (k == "decide") {
      r.body = rec::Decide{pid(j, "p"), field<Level>(j, "level"), field<Round>(j, "round"),
                           Digest::from_hex(field<std::string>(j, "block")), qc(field<std::string>(j, "qc"))};
    } else if (k == "chain") {
      rec::ChainUpdate c;
      c.p = pid(j, "p");
      c.cause = cause_from(field<std::string>(j, "cause"));
      c.chain = chain(field<json>(j, "chain"));
      const json& cert = field<json>(j, "cert");
      if (!cert.is_null()) c.cert = qc(cert.get<std::string>());
      c.old_round = field<Round>(j, "old_round");
      r.body = std::move(c);
    } else if (k == "phase") {
      r.body = rec::PhaseStart{pid(j, "p"),
                               field<Level>(j, "level"),
                               field<Round>(j, "round"),
                               phase_from(field<std::string>(j, "phase")),
                               field<Time>(j, "offset"),
                               field<bool>(j, "baker")};
    } else if (k == "lock") {
      r.body = rec::Lock{pid(j, "p"), field<Level>(j, "level"), field<Round>(j, "round"),
                         Digest::from_hex(field<std::string>(j, "value"))};
    } else if (k == "buffer") {
      r.body = rec::BufferSize{pid(j, "p"), field<std::uint64_t>(j, "size")};
    } else if (k == "pull") {
      r.body = rec::Pull{pid(j, "p")};
    } else if (k == "chain_send") {
      rec::ChainSend c;
      c.p = pid(j, "p");
      c.id = field<std::uint64_t>(j, "id");
      c.to = pid(j, "to");
      c.chain = chain(field<json>(j, "chain"));
      const json& poc = field<json>(j, "poc");
      if (!poc.is_null()) {
        if (poc.contains("msg")) {
          c.poc = ProposalOrCertificate{decode_message(from_hex(field<std::string>(poc, "msg")))};
        } else {
          c.poc = ProposalOrCertificate{qc(field<std::string>(poc, "qc"))};
        }
      }
      r.body = std::move(c);
    } else if (k == "chain_deliver") {
      r.body = rec::ChainDeliver{field<std::uint64_t>(j, "id"), pid(j, "to")};
    } else if (k == "chain_drop") {
      r.body = rec::ChainDrop{field<std::uint64_t>(j, "id"), pid(j, "to"),
                              drop_reason_from(field<std::string>(j, "reason"))};
    } else {
      throw DecodeError("unknown record kind " + k);
    }
    return r;
  }

  void block(const json& j) {
    Block b = decode_block(from_hex(field<std::string>(j, "hex")));
    BlockRef link = make_link(std::move(b));
    if (link->hash != Digest::from_hex(field<std::string>(j, "hash"))) throw DecodeError("block hash mismatch");
    blocks_[link->hash] = std::move(link);
  }

 private:
  static ProcessId pid(const json& j, const char* key) { return ProcessId{field<std::uint32_t>(j, key)}; }
  static QC qc(const std::string& h) { return decode_qc(from_hex(h)); }

  Chain chain(const json& hashes) {
    std::vector<BlockRef> links;
    for (const auto& h : hashes) {
      auto it = blocks_.find(Digest::from_hex(h.get<std::string>()));
      if (it == blocks_.end()) throw DecodeError("chain references an undefined block");
      links.push_back(it->second);
    }
    return Chain(std::move(links));
  }

  std::unordered_map<Digest, BlockRef, DigestHash> blocks_;
};

}  // namespace

void write_trace(std::ostream& out, const Trace& trace) {
  Writer w(out);
  w.header(trace);
  for (std::size_t i = 0; i < trace.records.size(); ++i) w.record(i, trace.records[i]);
}

std::string trace_to_string(const Trace& trace) {
  std::ostringstream out;
  write_trace(out, trace);
  return out.str();
}

Trace read_trace(std::istream& in) {
  Trace trace;
  std::string text;
  if (!std::getline(in, text)) throw DecodeError("empty trace");
  try {
    const json h = json::parse(text);
    if (field<std::string>(h, "schema") != kTraceSchema) throw DecodeError("unsupported trace schema");
    trace.config = json_io::config_from_json(field<json>(h, "config"));
    trace.stop_reason = field<std::string>(h, "stop");
    trace.end_time = field<Time>(h, "end");

    Reader reader;
    std::size_t line_no = 1;
    while (std::getline(in, text)) {
      ++line_no;
      if (text.empty()) continue;
      const json j = json::parse(text);
      if (field<std::string>(j, "k") == "block") {
        reader.block(j);
        continue;
      }
      if (field<std::size_t>(j, "i") != trace.records.size()) {
        throw DecodeError("record index out of sequence at line " + std::to_string(line_no));
      }
      trace.records.push_back(reader.record(j));
    }
  } catch (const json::exception& e) {
    throw DecodeError(std::string("malformed trace line: ") + e.what());
  } catch (const ConfigError& e) {
    throw DecodeError(std::string("bad trace config: ") + e.what());
  }
  return trace;
}

Trace trace_from_string(const std::string& text) {
  std::istringstream in(text);
  return read_trace(in);
}

void write_trace_file(const std::string& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_trace(out, trace);
  if (!out) throw Error("write failed: " + path);
}

Trace read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return read_trace(in);
}

}  // namespace tenderbake
