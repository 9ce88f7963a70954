#include "pirdsn/proofs.h"

namespace pirdsn::proofs {
namespace {

constexpr std::uint8_t kUploadTag = 1;
constexpr std::uint8_t kDeletionTag = 2;

bool OtherTreesMatch(const RootVector& now, const RootVector& before,
                     std::uint32_t k) {
  if (now.size() != before.size()) return false;
  for (std::size_t i = 0; i < now.size(); ++i) {
    if (i != k && now[i] != before[i]) return false;
  }
  return true;
}

}  // namespace

const RootVector& RootsOf(const Proof& p) {
  return std::visit([](const auto& x) -> const RootVector& { return x.roots; },
                    p);
}
const Digest& PrevHashOf(const Proof& p) {
  return std::visit([](const auto& x) -> const Digest& { return x.prev_hash; },
                    p);
}
const Fid& FidOf(const Proof& p) {
  return std::visit([](const auto& x) -> const Fid& { return x.fid; }, p);
}
bool IsUpload(const Proof& p) {
  return std::holds_alternative<UploadProof>(p);
}

std::string_view RejectionName(Rejection r) {
  switch (r) {
    case Rejection::kFidAbsent: return "FidAbsent";
    case Rejection::kIndexMismatch: return "IndexMismatch";
    case Rejection::kIndexConflict: return "IndexConflict";
    case Rejection::kStateTransitionInvalid: return "StateTransitionInvalid";
    case Rejection::kChainBroken: return "ChainBroken";
    case Rejection::kTamperedOtherTrees: return "TamperedOtherTrees";
    case Rejection::kDeletionNotExecuted: return "DeletionNotExecuted";
  }
  return "Unknown";
}

Digest GenesisDigest(std::string_view chain_id) {
  ByteWriter w;
  w.Raw(AsBytes("PIR-DSN-GENESIS"));
  w.String(chain_id);
  return Sha256Uncounted(w.bytes());
}

void WriteRoots(ByteWriter& w, const RootVector& v) {
  w.U32(static_cast<std::uint32_t>(v.size()));
  for (const auto& r : v) {
    w.U8(r ? 1 : 0);
    if (r) w.Put(*r);
  }
}

RootVector ReadRoots(ByteReader& r) {
  const std::uint32_t m = r.U32();
  if (m == 0 || m > 48) throw DecodeError("root vector length out of range");
  RootVector v(m);
  for (auto& root : v) {
    const std::uint8_t flag = r.U8();
    if (flag > 1) throw DecodeError("bad root flag");
    if (flag) root = r.GetDigest();
  }
  return v;
}

void WriteWitness(ByteWriter& w, const Witness& wit) {
  w.U32(wit.tree_index);
  w.U64(wit.leaf_position);
  w.U32(static_cast<std::uint32_t>(wit.path.size()));
  for (const auto& step : wit.path) {
    w.Put(step.sibling);
    w.U8(static_cast<std::uint8_t>(step.side));
  }
}

Witness ReadWitness(ByteReader& r) {
  Witness wit;
  wit.tree_index = r.U32();
  wit.leaf_position = r.U64();
  const std::uint32_t n = r.U32();
  if (n > 48) throw DecodeError("witness path too long");
  wit.path.resize(n);
  for (auto& step : wit.path) {
    step.sibling = r.GetDigest();
    const std::uint8_t side = r.U8();
    if (side > 1) throw DecodeError("bad side indicator");
    step.side = static_cast<aca::Side>(side);
  }
  return wit;
}

Bytes Serialize(const Proof& p) {
  ByteWriter w;
  std::visit(
      [&w](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        w.U8(std::is_same_v<T, UploadProof> ? kUploadTag : kDeletionTag);
        WriteRoots(w, x.roots);
        WriteWitness(w, x.witness);
        w.Put(x.fid.digest);
        if constexpr (std::is_same_v<T, UploadProof>) {
          w.U64(x.index);
        } else {
          w.U64(x.leaf_position);
        }
        w.Put(x.prev_hash);
      },
      p);
  return std::move(w).Take();
}

Proof Deserialize(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const std::uint8_t tag = r.U8();
  if (tag != kUploadTag && tag != kDeletionTag) {
    throw DecodeError("unknown proof kind");
  }
  RootVector roots = ReadRoots(r);
  Witness wit = ReadWitness(r);
  Fid fid{r.GetDigest()};
  const std::uint64_t number = r.U64();
  const Digest prev = r.GetDigest();
  r.ExpectDone();
  if (tag == kUploadTag) {
    return UploadProof{std::move(roots), std::move(wit), fid, number, prev};
  }
  return DeletionProof{std::move(roots), std::move(wit), fid, number, prev};
}

Digest ProofHash(const Proof& p) {
  return HashTagged(HashDomain::kProofEntry, {Serialize(p)});
}

UploadProof MakeUploadProof(aca::Accumulator& state, const Fid& fid,
                            const Digest& chain_head) {
  aca::IndexAssignment a = state.Insert(fid);
  return UploadProof{state.roots(), std::move(a.witness), fid, a.index,
                     chain_head};
}

DeletionProof MakeDeletionProof(aca::Accumulator& state, const Fid& fid,
                                const Digest& chain_head) {
  aca::Deletion d = state.Delete(fid);
  return DeletionProof{state.roots(), std::move(d.witness), fid,
                       d.leaf_position, chain_head};
}

VerifyOutcome VerifyUploadTransition(const UploadProof& proof,
                                     const RootVector& previous) {
  const auto& v = proof.roots;
  const auto& w = proof.witness;
  const std::uint32_t k = w.tree_index;

  // FID existence in the claimed post-state.
  if (!aca::VerifyMembership(v, k, w, proof.fid)) {
    return VerifyOutcome::Reject(Rejection::kFidAbsent);
  }
  // The published index is the one the witness implies.
  if (aca::ComputeIndex(v, k, w) != proof.index) {
    return VerifyOutcome::Reject(Rejection::kIndexMismatch);
  }
  // Conflict-free transition from the previous state.
  if (v.size() == previous.size()) {
    if (!OtherTreesMatch(v, previous, k)) {
      return VerifyOutcome::Reject(Rejection::kTamperedOtherTrees);
    }
    if (aca::FoldPath(aca::VacantLeafDigest(), w) !=
        aca::EffectiveRoot(previous, k)) {
      return VerifyOutcome::Reject(Rejection::kIndexConflict);
    }
    return VerifyOutcome::Accept();
  }
  if (v.size() == previous.size() + 1 && k == previous.size()) {
    // Growth: the old trees become the left siblings along the rightmost
    // path of the new tree, and their slots in the vector are vacated.
    for (std::uint32_t i = 0; i < k; ++i) {
      if (v[i]) return VerifyOutcome::Reject(Rejection::kStateTransitionInvalid);
      const auto& step = w.path[i];
      if (step.side != aca::Side::kLeft ||
          step.sibling != aca::EffectiveRoot(previous, i)) {
        return VerifyOutcome::Reject(Rejection::kStateTransitionInvalid);
      }
    }
    return VerifyOutcome::Accept();
  }
  return VerifyOutcome::Reject(Rejection::kStateTransitionInvalid);
}

VerifyOutcome VerifyDeletionTransition(const DeletionProof& proof,
                                       const RootVector& previous) {
  const auto& v = proof.roots;
  const auto& w = proof.witness;
  const std::uint32_t k = w.tree_index;

  if (v.size() != previous.size()) {
    return VerifyOutcome::Reject(Rejection::kStateTransitionInvalid);
  }
  // The fid sat at the witnessed leaf of the previous state.
  if (proof.leaf_position != w.leaf_position ||
      !aca::VerifyMembership(previous, k, w, proof.fid)) {
    return VerifyOutcome::Reject(Rejection::kFidAbsent);
  }
  if (!OtherTreesMatch(v, previous, k)) {
    return VerifyOutcome::Reject(Rejection::kTamperedOtherTrees);
  }
  if (v[k]) {
    // Tree still has occupants: the same path over a vacant leaf must give
    // the new root.
    if (aca::FoldPath(aca::VacantLeafDigest(), w) != *v[k]) {
      return VerifyOutcome::Reject(Rejection::kDeletionNotExecuted);
    }
    return VerifyOutcome::Accept();
  }
  // Tree collapsed to vacant: the fid must have been its only occupant.
  for (std::uint32_t j = 0; j < w.path.size(); ++j) {
    if (w.path[j].sibling != aca::VacantSubtreeDigest(j)) {
      return VerifyOutcome::Reject(Rejection::kStateTransitionInvalid);
    }
  }
  return VerifyOutcome::Accept();
}

VerifyOutcome VerifyUploadProof(const UploadProof& proof,
                                const ChainResolver& chain) {
  auto previous = chain(proof.prev_hash);
  if (!previous) return VerifyOutcome::Reject(Rejection::kChainBroken);
  return VerifyUploadTransition(proof, *previous);
}

VerifyOutcome VerifyDeletionProof(const DeletionProof& proof,
                                  const ChainResolver& chain) {
  auto previous = chain(proof.prev_hash);
  if (!previous) return VerifyOutcome::Reject(Rejection::kChainBroken);
  return VerifyDeletionTransition(proof, *previous);
}

VerifyOutcome VerifyProof(const Proof& proof, const ChainResolver& chain) {
  return std::visit(
      [&chain](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, UploadProof>) {
          return VerifyUploadProof(p, chain);
        } else {
          return VerifyDeletionProof(p, chain);
        }
      },
      proof);
}

}  // namespace pirdsn::proofs
