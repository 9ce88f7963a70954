#ifndef PIRDSN_LEDGER_H_
#define PIRDSN_LEDGER_H_

// In-process bulletin board: an append-only, hash-addressed log of proofs,
// one hash chain per miner (or replicated subnet), plus the fid directory
// clients use to learn indexes and database sizes.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pirdsn/aca.h"
#include "pirdsn/proofs.h"

namespace pirdsn::ledger {

using aca::Fid;
using proofs::Proof;

struct LedgerEntry {
  Digest entry_hash{};
  std::string miner_id;
  Proof payload;
  std::uint64_t height = 0;  // 1-based position within the miner's chain
};

struct Placement {
  std::string miner_id;
  std::uint64_t index = 0;
  std::uint64_t db_size = 0;
  aca::LeafLocation location;
};

struct DirectoryEntry {
  Fid fid;
  std::vector<Placement> placements;  // sorted by miner id
};

struct AppendResult {
  proofs::VerifyOutcome outcome;
  std::optional<Digest> entry_hash;
  bool duplicate = false;  // identical entry already on this chain

  bool accepted() const { return outcome.accepted; }
};

class Ledger {
 public:
  Ledger() = default;
  Ledger(const Ledger&) = delete;
  Ledger& operator=(const Ledger&) = delete;

  // Verifies `proof` against the miner's chain head and directory; stores it
  // only if accepted. Re-appending an entry already on the chain is a no-op
  // reported as a duplicate.
  AppendResult Append(std::string_view miner_id, const Proof& proof);

  std::optional<LedgerEntry> Get(const Digest& entry_hash) const;
  Digest Head(std::string_view miner_id) const;
  std::uint64_t Height(std::string_view miner_id) const;
  aca::RootVector CurrentRoots(std::string_view miner_id) const;
  std::vector<std::string> Miners() const;

  std::optional<DirectoryEntry> Lookup(const Fid& fid) const;
  std::optional<Placement> Lookup(const Fid& fid,
                                  std::string_view miner_id) const;

  // Resolver over this miner's chain for standalone verification.
  proofs::ChainResolver Resolver(std::string miner_id) const;

  std::vector<LedgerEntry> Entries() const;
  std::size_t size() const;

  // Rebuilds every miner's accumulator by replaying its proofs from genesis.
  // Throws std::logic_error if a replayed state disagrees with its proof.
  std::map<std::string, aca::Accumulator> Replay() const;

  // Length-prefixed canonical entries behind an 8-byte magic.
  void Save(const std::filesystem::path& path) const;
  // Re-verifies every entry while loading; throws on any rejection.
  static std::unique_ptr<Ledger> Load(const std::filesystem::path& path);

 private:
  struct Chain {
    Digest head{};
    std::uint64_t height = 0;
    aca::RootVector roots;
    std::map<Fid, aca::LeafLocation> live;
    std::unordered_map<Digest, aca::RootVector, DigestHash> states;
  };

  Chain& ChainFor(std::string_view miner_id);
  const Chain* FindChain(std::string_view miner_id) const;
  static std::optional<aca::RootVector> Resolve(const Chain& chain,
                                                const Digest& h);
  static Placement MakePlacement(const std::string& miner, const Chain& chain,
                                 aca::LeafLocation loc);

  mutable std::shared_mutex mu_;
  std::map<std::string, Chain, std::less<>> chains_;
  std::vector<LedgerEntry> log_;
  std::unordered_map<Digest, std::size_t, DigestHash> by_hash_;
};

}  // namespace pirdsn::ledger

#endif  // PIRDSN_LEDGER_H_
