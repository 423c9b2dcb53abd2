#include "tenderbake/chain.hpp"

#include <algorithm>
#include <numeric>

#include "tenderbake/crypto.hpp"
#include "tenderbake/encoding.hpp"
#include "tenderbake/errors.hpp"

namespace tenderbake {

namespace {

// Deterministic stream of 64-bit words derived from a digest key
// (SHA-256 in counter mode).
class KeyedStream {
 public:
  explicit KeyedStream(const Digest& key) : key_(key) {}

  std::uint64_t next() {
    if (pos_ == 2) refill();
    return words_[pos_++];
  }

  // Uniform in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
      std::uint64_t x = next();
      if (x < limit) return x % bound;
    }
  }

 private:
  void refill() {
    Encoder e;
    e.digest(key_);
    e.u64(counter_++);
    Digest d = digest_of(e.data());
    words_[0] = words_[1] = 0;
    for (int i = 0; i < 8; ++i) words_[0] = (words_[0] << 8) | d.bytes[i];
    for (int i = 8; i < 16; ++i) words_[1] = (words_[1] << 8) | d.bytes[i];
    pos_ = 0;
  }

  Digest key_;
  std::uint64_t counter_ = 0;
  std::uint64_t words_[2] = {0, 0};
  int pos_ = 2;
};

}  // namespace

BlockRef make_link(Block block) {
  Digest h = hash_of(block);
  return std::make_shared<const ChainLink>(ChainLink{std::move(block), h});
}

Block genesis_block(const Genesis& genesis) {
  Encoder e;
  e.bytes(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(genesis.seed.data()),
                                        genesis.seed.size()));
  e.i64(genesis.t0);
  e.i64(genesis.k);
  Digest d = digest_of(e.data());
  std::uint64_t nonce = 0;
  for (int i = 0; i < 8; ++i) nonce = (nonce << 8) | d.bytes[i];

  Block b;
  b.header.level = 0;
  b.header.round = 0;
  b.contents = Value{kNoProcess, 0, 0, nonce};
  return b;
}

Chain::Chain(std::vector<BlockRef> links)
    : links_(std::make_shared<const std::vector<BlockRef>>(std::move(links))) {}

Chain Chain::from_genesis(const Genesis& genesis) { return Chain({make_link(genesis_block(genesis))}); }

Chain Chain::from_blocks(const std::vector<Block>& blocks) {
  std::vector<BlockRef> links;
  links.reserve(blocks.size());
  for (const auto& b : blocks) links.push_back(make_link(b));
  return Chain(std::move(links));
}

OutputValue Chain::output_value(Level level) const {
  const Block& b = at(level);
  return OutputValue{b.contents, b.header.pred_hash};
}

std::span<const BlockRef> Chain::links() const {
  if (!links_) return {};
  return {links_->data(), links_->size()};
}

Chain Chain::appended(Block block) const {
  std::vector<BlockRef> links;
  links.reserve(static_cast<std::size_t>(length()) + 1);
  if (links_) links.assign(links_->begin(), links_->end());
  links.push_back(make_link(std::move(block)));
  return Chain(std::move(links));
}

Level Chain::common_prefix(const Chain& other) const {
  Level limit = std::min(length(), other.length());
  Level i = 0;
  while (i < limit && (link(i) == other.link(i) || hash_at(i) == other.hash_at(i))) ++i;
  return i;
}

void CommitteeConfig::validate() const {
  if (f < 1) throw ConfigError("committee: f must be >= 1");
  if (n != 3 * f + 1) throw ConfigError("committee: n must equal 3f+1");
  if (k < 1) throw ConfigError("committee: k must be >= 1");
  if (static_cast<int>(universe.size()) < n) throw ConfigError("committee: |universe| must be >= n");
  std::vector<ProcessId> sorted = universe;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ConfigError("committee: universe ids must be distinct");
  }
}

std::vector<ProcessId> committee(std::span<const OutputValue> prefix, const CommitteeConfig& cfg) {
  const auto n = static_cast<std::size_t>(cfg.n);
  if (cfg.rotation == Rotation::Fixed) {
    return {cfg.universe.begin(), cfg.universe.begin() + static_cast<std::ptrdiff_t>(n)};
  }
  Encoder e;
  e.bytes(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(cfg.seed.data()), cfg.seed.size()));
  e.u32(static_cast<std::uint32_t>(prefix.size()));
  for (const auto& v : prefix) e.put(v);
  KeyedStream stream(digest_of(e.data()));

  // Partial Fisher-Yates: the first n slots of a seeded permutation.
  std::vector<ProcessId> pool = cfg.universe;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = i + static_cast<std::size_t>(stream.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n);
  return pool;
}

std::vector<ProcessId> committee_at_level(const Chain& chain, Level level, const CommitteeConfig& cfg) {
  if (chain.empty()) throw InsufficientChain("committee_at_level: empty chain");
  if (level <= cfg.k) {
    OutputValue v0 = chain.output_value(0);
    return committee(std::span<const OutputValue>(&v0, 1), cfg);
  }
  const Level last = level - cfg.k;
  if (chain.length() < last + 1) {
    throw InsufficientChain("committee_at_level: level " + std::to_string(level) + " needs " +
                            std::to_string(last + 1) + " blocks, chain has " + std::to_string(chain.length()));
  }
  std::vector<OutputValue> prefix;
  prefix.reserve(static_cast<std::size_t>(last) + 1);
  for (Level i = 0; i <= last; ++i) prefix.push_back(chain.output_value(i));
  return committee(prefix, cfg);
}

const std::vector<ProcessId>& CommitteeCache::at_level(const Chain& chain, Level level) {
  if (level <= cfg_->k) {
    if (!initial_) initial_ = committee_at_level(chain, level, *cfg_);
    return *initial_;
  }
  const Level anchor = level - cfg_->k;
  if (chain.length() < anchor + 1) {
    throw InsufficientChain("committee cache: level " + std::to_string(level) + " needs " +
                            std::to_string(anchor + 1) + " blocks");
  }
  const Digest& key = chain.hash_at(anchor);
  auto it = by_anchor_.find(key);
  if (it != by_anchor_.end()) return it->second;
  return by_anchor_.emplace(key, committee_at_level(chain, level, *cfg_)).first->second;
}

ProcessId proposer_in(const std::vector<ProcessId>& committee, Round round) {
  const auto n = static_cast<Round>(committee.size());
  return committee[static_cast<std::size_t>((round - 1) % n)];
}

ProcessId proposer(const Chain& chain, Level level, Round round, const CommitteeConfig& cfg) {
  if (round < 1) throw Error("proposer: round must be >= 1");
  return proposer_in(committee_at_level(chain, level, cfg), round);
}

bool is_member(const std::vector<ProcessId>& committee, ProcessId p) {
  return std::find(committee.begin(), committee.end(), p) != committee.end();
}

bool is_consistent_value(const OutputValue& v, const OutputValue& /*prev*/, const Block& prev_block) {
  return v.h == hash_of(prev_block);
}

bool is_legitimate_value(const Value& u, Level level, Round proposed_round,
                         const std::vector<ProcessId>& committee) {
  if (u.level != level || u.round < 1 || u.round > proposed_round) return false;
  return u.creator == proposer_in(committee, u.round);
}

bool check_qc(const QC& qc, const VoteSubject& expected, const std::vector<ProcessId>& committee, int f) {
  if (qc.subject() != expected) return false;
  if (qc.votes.size() < static_cast<std::size_t>(2 * f + 1)) return false;
  if (qc.distinct_signers() != qc.votes.size()) return false;
  const Digest payload = vote_digest(expected);
  for (const auto& v : qc.votes) {
    if (v.payload != payload) return false;
    if (!is_member(committee, v.signer)) return false;
  }
  return true;
}

ChainVerdict validate_chain(const Chain& chain, const std::optional<QC>& certificate, const Genesis& genesis,
                            CommitteeCache& committees, Level trusted_prefix) {
  auto fail = [](Level level, std::string reason) { return ChainVerdict{false, level, std::move(reason)}; };
  const CommitteeConfig& cfg = committees.config();
  if (chain.empty()) return fail(0, "empty chain");
  if (trusted_prefix < 1) {
    if (chain.at(0) != genesis_block(genesis)) return fail(0, "genesis mismatch");
    trusted_prefix = 1;
  }

  for (Level l = std::max<Level>(trusted_prefix, 1); l < chain.length(); ++l) {
    const Block& b = chain.at(l);
    const Block& prev = chain.at(l - 1);
    const BlockHeader& h = b.header;
    if (h.level != l) return fail(l, "header level mismatch");
    if (h.pred_hash != chain.hash_at(l - 1)) return fail(l, "broken hash link");
    if (h.round < 1) return fail(l, "round must be >= 1");

    const auto& members = committees.at_level(chain, l);
    if (h.proposer != proposer_in(members, h.round)) return fail(l, "illegitimate proposer");
    if (!is_legitimate_value(b.contents, l, h.round, members)) return fail(l, "illegitimate value");

    if (l == 1) {
      if (h.eqc) return fail(l, "level-1 block carries an endorsement certificate");
    } else {
      if (!h.eqc) return fail(l, "missing endorsement certificate");
      VoteSubject expected{QcKind::Endorsement, l - 1, prev.header.round, prev.header.pred_hash,
                           hash_of(prev.contents)};
      if (!check_qc(*h.eqc, expected, committees.at_level(chain, l - 1), cfg.f)) {
        return fail(l, "endorsement certificate does not certify predecessor");
      }
    }

    if (h.endorsable_round == 0) {
      if (h.pqc) return fail(l, "preendorsement certificate without endorsable round");
    } else {
      if (!h.pqc) return fail(l, "endorsable round without preendorsement certificate");
      if (h.endorsable_round < 0 || h.endorsable_round >= h.round) return fail(l, "endorsable round out of range");
      VoteSubject expected{QcKind::Preendorsement, l, h.endorsable_round, h.pred_hash, hash_of(b.contents)};
      if (!check_qc(*h.pqc, expected, members, cfg.f)) return fail(l, "bad preendorsement certificate");
    }
  }

  const Level head_level = chain.length() - 1;
  if (head_level == 0) {
    if (certificate) return fail(0, "certificate for a genesis-only chain");
    return {};
  }
  if (!certificate) return fail(head_level, "missing head certificate");
  const Block& head = chain.head();
  VoteSubject expected{QcKind::Endorsement, head_level, head.header.round, head.header.pred_hash,
                       hash_of(head.contents)};
  if (!check_qc(*certificate, expected, committees.at_level(chain, head_level), cfg.f)) {
    return fail(head_level, "head certificate does not certify head");
  }
  return {};
}

bool valid_chain(const Chain& chain, const std::optional<QC>& certificate, const Genesis& genesis,
                 const CommitteeConfig& cfg) {
  CommitteeCache cache(cfg);
  try {
    return validate_chain(chain, certificate, genesis, cache).ok;
  } catch (const InsufficientChain&) {
    return false;
  }
}

Chain append_decided(const Chain& chain, Block block) {
  if (block.header.level != chain.length()) {
    throw LevelMismatch("append_decided: block level " + std::to_string(block.header.level) +
                        " does not extend chain of length " + std::to_string(chain.length()));
  }
  if (block.header.pred_hash != chain.head_hash()) throw HashMismatch("append_decided: predecessor hash mismatch");
  return chain.appended(std::move(block));
}

}  // namespace tenderbake
