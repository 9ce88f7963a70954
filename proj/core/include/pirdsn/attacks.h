#ifndef PIRDSN_ATTACKS_H_
#define PIRDSN_ATTACKS_H_

// Byzantine miner behaviours. The proof forgers build the malformed proofs an
// index-manipulating miner would publish; every one of them must be refused
// by public verification.

#include <optional>
#include <string_view>

#include "pirdsn/aca.h"
#include "pirdsn/proofs.h"
#include "pirdsn/rng.h"

namespace pirdsn::attacks {

enum class Strategy : std::uint8_t {
  kHonest,
  kConflictIndex,     // map a new fid onto an occupied leaf
  kWrongVacantIndex,  // vacant leaf, index field pointing elsewhere
  kDeleteWrongFid,    // remove a mapping the client did not ask for
  kFakeDelete,        // claim a deletion without performing it
  kMutateIndex,       // republish an existing fid under another index
  kCorruptPirAnswer,  // tamper with retrieval answers
  kSilentLeader,      // never propose or vote
  kEquivocate,        // propose conflicting blocks to different replicas
};

std::string_view StrategyName(Strategy s);
std::optional<Strategy> ParseStrategy(std::string_view name);
bool ForgesUploads(Strategy s);
bool ForgesDeletions(Strategy s);

using proofs::DeletionProof;
using proofs::Proof;
using proofs::UploadProof;

// Each forger reads `state` (the miner's honest pre-state) and returns the
// forged proof, or nullopt when the state offers no target for the attack.

std::optional<UploadProof> ForgeConflictIndex(const aca::Accumulator& state,
                                              const aca::Fid& fid,
                                              const Digest& head, Rng& rng);
std::optional<UploadProof> ForgeWrongVacantIndex(const aca::Accumulator& state,
                                                 const aca::Fid& fid,
                                                 const Digest& head, Rng& rng);
std::optional<DeletionProof> ForgeDeleteWrongFid(const aca::Accumulator& state,
                                                 const aca::Fid& requested,
                                                 const Digest& head, Rng& rng);
std::optional<DeletionProof> ForgeFakeDelete(const aca::Accumulator& state,
                                             const aca::Fid& requested,
                                             const Digest& head);
std::optional<Proof> ForgeMutateIndex(const aca::Accumulator& state,
                                      const Digest& head, Rng& rng);

// Dispatches on `s` for an upload (or deletion) request; nullopt for honest
// behaviour or when the attack does not apply.
std::optional<Proof> ForgeForUpload(Strategy s, const aca::Accumulator& state,
                                    const aca::Fid& fid, const Digest& head,
                                    Rng& rng);
std::optional<Proof> ForgeForDelete(Strategy s, const aca::Accumulator& state,
                                    const aca::Fid& fid, const Digest& head,
                                    Rng& rng);

}  // namespace pirdsn::attacks

#endif  // PIRDSN_ATTACKS_H_
