#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tenderbake/types.hpp"

namespace tenderbake {

// A block together with its (memoised) hash.
struct ChainLink {
  Block block;
  Digest hash;
};

using BlockRef = std::shared_ptr<const ChainLink>;

BlockRef make_link(Block block);

Block genesis_block(const Genesis& genesis);

// Immutable snapshot of a blockchain: blocks[0] is genesis and
// blocks[i].header.level == i. Copies share storage.
class Chain {
 public:
  Chain() = default;
  explicit Chain(std::vector<BlockRef> links);
  static Chain from_genesis(const Genesis& genesis);
  static Chain from_blocks(const std::vector<Block>& blocks);

  Level length() const { return links_ ? static_cast<Level>(links_->size()) : 0; }
  bool empty() const { return length() == 0; }
  const Block& at(Level level) const { return (*links_)[static_cast<std::size_t>(level)]->block; }
  const Digest& hash_at(Level level) const { return (*links_)[static_cast<std::size_t>(level)]->hash; }
  const BlockRef& link(Level level) const { return (*links_)[static_cast<std::size_t>(level)]; }
  const Block& head() const { return at(length() - 1); }
  const Digest& head_hash() const { return hash_at(length() - 1); }
  OutputValue output_value(Level level) const;
  std::span<const BlockRef> links() const;

  Chain appended(Block block) const;
  // Number of leading levels at which both chains hold the same block.
  Level common_prefix(const Chain& other) const;

  friend bool operator==(const Chain& a, const Chain& b) {
    return a.length() == b.length() && a.common_prefix(b) == a.length();
  }

 private:
  std::shared_ptr<const std::vector<BlockRef>> links_;
};

enum class Rotation {
  // Seeded Fisher-Yates over the universe, keyed by the decided prefix.
  Shuffle,
  // The first n universe members in universe order, at every level.
  Fixed,
};

struct CommitteeConfig {
  int n = 4;
  int f = 1;
  int k = 1;
  std::vector<ProcessId> universe;
  std::string seed;
  Rotation rotation = Rotation::Shuffle;

  int quorum() const { return 2 * f + 1; }
  // Throws ConfigError naming the violated constraint.
  void validate() const;
};

std::vector<ProcessId> committee(std::span<const OutputValue> prefix, const CommitteeConfig& cfg);

// committee([v0]) for level <= k, otherwise the committee over the output
// values of levels 0..level-k. Throws InsufficientChain.
std::vector<ProcessId> committee_at_level(const Chain& chain, Level level, const CommitteeConfig& cfg);

// Memoises committee_at_level. The committee for a level is a function of the
// block at level-k (whose hash pins the whole prefix), so that hash is the key.
class CommitteeCache {
 public:
  explicit CommitteeCache(const CommitteeConfig& cfg) : cfg_(&cfg) {}
  const std::vector<ProcessId>& at_level(const Chain& chain, Level level);
  const CommitteeConfig& config() const { return *cfg_; }

 private:
  const CommitteeConfig* cfg_;
  std::optional<std::vector<ProcessId>> initial_;
  std::unordered_map<Digest, std::vector<ProcessId>, DigestHash> by_anchor_;
};

ProcessId proposer(const Chain& chain, Level level, Round round, const CommitteeConfig& cfg);
ProcessId proposer_in(const std::vector<ProcessId>& committee, Round round);

bool is_member(const std::vector<ProcessId>& committee, ProcessId p);

// Application-content hook is the default (always consistent).
bool is_consistent_value(const OutputValue& v, const OutputValue& prev, const Block& prev_block);

// A value is legitimate at `level` if it was created for that level by the
// proposer of its creation round, no later than the round it is proposed at.
bool is_legitimate_value(const Value& u, Level level, Round proposed_round,
                         const std::vector<ProcessId>& committee);

bool check_qc(const QC& qc, const VoteSubject& expected, const std::vector<ProcessId>& committee, int f);

struct ChainVerdict {
  bool ok = true;
  Level failed_level = -1;
  std::string reason;

  explicit operator bool() const { return ok; }
};

// Full validation: genesis, hash links, per-block certificates, legitimacy,
// header invariants, and the head certificate. Levels below `trusted_prefix`
// are assumed already validated (they are shared with a known-valid chain).
ChainVerdict validate_chain(const Chain& chain, const std::optional<QC>& certificate, const Genesis& genesis,
                            CommitteeCache& committees, Level trusted_prefix = 0);

bool valid_chain(const Chain& chain, const std::optional<QC>& certificate, const Genesis& genesis,
                 const CommitteeConfig& cfg);

// Throws LevelMismatch or HashMismatch.
Chain append_decided(const Chain& chain, Block block);

}  // namespace tenderbake
