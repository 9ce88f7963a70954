#ifndef PIRDSN_PROOFS_H_
#define PIRDSN_PROOFS_H_

// Upload and deletion proofs: hash-chained, publicly verifiable records of
// accumulator transitions. Verification touches O(log n) digests.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "pirdsn/aca.h"
#include "pirdsn/bytes.h"

namespace pirdsn::proofs {

using aca::Fid;
using aca::RootVector;
using aca::Witness;

struct UploadProof {
  RootVector roots;  // post-state vector
  Witness witness;   // carries the tree index k
  Fid fid;
  std::uint64_t index = 0;
  Digest prev_hash{};

  std::uint32_t k() const { return witness.tree_index; }
  friend bool operator==(const UploadProof&, const UploadProof&) = default;
};

struct DeletionProof {
  RootVector roots;  // post-state vector
  Witness witness;   // pre-deletion path of the removed leaf
  Fid fid;
  std::uint64_t leaf_position = 0;
  Digest prev_hash{};

  std::uint32_t k() const { return witness.tree_index; }
  friend bool operator==(const DeletionProof&, const DeletionProof&) = default;
};

using Proof = std::variant<UploadProof, DeletionProof>;

const RootVector& RootsOf(const Proof& p);
const Digest& PrevHashOf(const Proof& p);
const Fid& FidOf(const Proof& p);
bool IsUpload(const Proof& p);

enum class Rejection : std::uint8_t {
  kFidAbsent,
  kIndexMismatch,
  kIndexConflict,
  kStateTransitionInvalid,
  kChainBroken,
  kTamperedOtherTrees,
  kDeletionNotExecuted,
};
std::string_view RejectionName(Rejection r);

struct VerifyOutcome {
  bool accepted = true;
  std::optional<Rejection> reason;

  static VerifyOutcome Accept() { return {}; }
  static VerifyOutcome Reject(Rejection r) { return {false, r}; }
  explicit operator bool() const { return accepted; }
};

// Resolves a chain digest to the root vector it certifies. The chain's
// genesis digest resolves to the initial vector (vacant).
using ChainResolver =
    std::function<std::optional<RootVector>(const Digest& prev_hash)>;

// Fixed chain anchor for a miner (or replicated subnet).
Digest GenesisDigest(std::string_view chain_id);

// Canonical encoding: u8 kind (1 upload, 2 deletion), root vector, witness,
// fid, u64 index or leaf position, prev digest.
Bytes Serialize(const Proof& p);
Proof Deserialize(std::span<const std::uint8_t> bytes);
// The value the next proof in the chain cites as its prev_hash.
Digest ProofHash(const Proof& p);

void WriteRoots(ByteWriter& w, const RootVector& v);
RootVector ReadRoots(ByteReader& r);
void WriteWitness(ByteWriter& w, const Witness& wit);
Witness ReadWitness(ByteReader& r);

// Inserts into `state` (mutating it) and emits the proof. Throws
// aca::DuplicateFid.
UploadProof MakeUploadProof(aca::Accumulator& state, const Fid& fid,
                            const Digest& chain_head);
// Deletes from `state` (mutating it) and emits the proof. Throws
// aca::FidNotFound.
DeletionProof MakeDeletionProof(aca::Accumulator& state, const Fid& fid,
                                const Digest& chain_head);

VerifyOutcome VerifyUploadProof(const UploadProof& proof,
                                const ChainResolver& chain);
VerifyOutcome VerifyDeletionProof(const DeletionProof& proof,
                                  const ChainResolver& chain);
VerifyOutcome VerifyProof(const Proof& proof, const ChainResolver& chain);

// Same checks against an explicitly supplied previous vector.
VerifyOutcome VerifyUploadTransition(const UploadProof& proof,
                                     const RootVector& previous);
VerifyOutcome VerifyDeletionTransition(const DeletionProof& proof,
                                       const RootVector& previous);

}  // namespace pirdsn::proofs

#endif  // PIRDSN_PROOFS_H_
