#include "pirdsn/attacks.h"

#include <array>
#include <utility>
#include <vector>

namespace pirdsn::attacks {
namespace {

using aca::Accumulator;
using aca::Fid;
using aca::LeafLocation;

constexpr std::array<std::pair<Strategy, std::string_view>, 9> kNames{{
    {Strategy::kHonest, "honest"},
    {Strategy::kConflictIndex, "conflict-index"},
    {Strategy::kWrongVacantIndex, "wrong-vacant-index"},
    {Strategy::kDeleteWrongFid, "delete-wrong-fid"},
    {Strategy::kFakeDelete, "fake-delete"},
    {Strategy::kMutateIndex, "mutate-index"},
    {Strategy::kCorruptPirAnswer, "corrupt-pir-answer"},
    {Strategy::kSilentLeader, "silent-leader"},
    {Strategy::kEquivocate, "equivocate"},
}};

std::vector<LeafLocation> LiveLocations(const Accumulator& state) {
  std::vector<LeafLocation> out;
  for (const auto& [index, fid] : state.Live()) out.push_back(*state.Locate(fid));
  return out;
}

std::vector<LeafLocation> VacantLocations(const Accumulator& state) {
  std::vector<LeafLocation> out;
  for (std::uint32_t k = 0; k < state.m(); ++k) {
    for (std::uint64_t p = 0; p < (std::uint64_t{1} << k); ++p) {
      if (!state.LeafAt({k, p})) out.push_back({k, p});
    }
  }
  return out;
}

template <typename T>
const T& Pick(const std::vector<T>& items, Rng& rng) {
  return items[rng.Uniform(items.size())];
}

UploadProof ProofFrom(const Accumulator& s, const aca::IndexAssignment& a,
                      const Digest& head) {
  return UploadProof{s.roots(), a.witness, a.fid, a.index, head};
}

}  // namespace

std::string_view StrategyName(Strategy s) {
  for (const auto& [k, v] : kNames) {
    if (k == s) return v;
  }
  return "unknown";
}

std::optional<Strategy> ParseStrategy(std::string_view name) {
  for (const auto& [k, v] : kNames) {
    if (v == name) return k;
  }
  return std::nullopt;
}

bool ForgesUploads(Strategy s) {
  return s == Strategy::kConflictIndex || s == Strategy::kWrongVacantIndex ||
         s == Strategy::kMutateIndex;
}

bool ForgesDeletions(Strategy s) {
  return s == Strategy::kDeleteWrongFid || s == Strategy::kFakeDelete ||
         s == Strategy::kMutateIndex;
}

std::optional<UploadProof> ForgeConflictIndex(const Accumulator& state,
                                              const Fid& fid,
                                              const Digest& head, Rng& rng) {
  const auto live = LiveLocations(state);
  if (live.empty() || state.Contains(fid)) return std::nullopt;
  const LeafLocation target = Pick(live, rng);
  // Claim the occupied leaf: reuse its path and recompute the root as if the
  // new fid sat there.
  UploadProof p;
  p.witness = state.WitnessFor(target);
  p.roots = state.roots();
  p.roots[target.tree] = aca::FoldPath(aca::LeafDigest(fid), p.witness);
  p.fid = fid;
  p.index = aca::ComputeIndex(p.roots, target.tree, p.witness);
  p.prev_hash = head;
  return p;
}

std::optional<UploadProof> ForgeWrongVacantIndex(const Accumulator& state,
                                                 const Fid& fid,
                                                 const Digest& head, Rng& rng) {
  if (state.Contains(fid)) return std::nullopt;
  Accumulator honest = state;
  const std::uint64_t expected_index = honest.Insert(fid).index;

  const auto next = state.NextSlot();
  std::vector<LeafLocation> others;
  for (const auto& loc : VacantLocations(state)) {
    if (!next || loc != *next) others.push_back(loc);
  }
  Accumulator forged = state;
  aca::IndexAssignment a = others.empty() ? forged.Insert(fid)
                                          : forged.InsertAt(fid, Pick(others, rng));
  UploadProof p = ProofFrom(forged, a, head);
  // Publish the index the client expects, not the one the leaf implies.
  p.index = expected_index != a.index ? expected_index : a.index + 1;
  return p;
}

std::optional<DeletionProof> ForgeDeleteWrongFid(const Accumulator& state,
                                                 const Fid& requested,
                                                 const Digest& head, Rng& rng) {
  if (!state.Contains(requested) || state.size() < 2) return std::nullopt;
  std::vector<Fid> victims;
  for (const auto& [index, fid] : state.Live()) {
    if (fid != requested) victims.push_back(fid);
  }
  const Fid victim = Pick(victims, rng);
  Accumulator after = state;
  DeletionProof p;
  p.fid = requested;
  p.prev_hash = head;
  switch (rng.Uniform(3)) {
    case 0: {
      // Remove the victim, present its path under the requested fid.
      aca::Deletion d = after.Delete(victim);
      p.witness = d.witness;
      p.leaf_position = d.leaf_position;
      break;
    }
    case 1: {
      // Remove both; the proof only describes the requested one.
      aca::Deletion d = after.Delete(requested);
      after.Delete(victim);
      p.witness = d.witness;
      p.leaf_position = d.leaf_position;
      break;
    }
    default: {
      // Remove the victim, present the requested fid's genuine path.
      p.witness = state.WitnessFor(*state.Locate(requested));
      p.leaf_position = p.witness.leaf_position;
      after.Delete(victim);
      break;
    }
  }
  p.roots = after.roots();
  return p;
}

std::optional<DeletionProof> ForgeFakeDelete(const Accumulator& state,
                                             const Fid& requested,
                                             const Digest& head) {
  auto loc = state.Locate(requested);
  if (!loc) return std::nullopt;
  DeletionProof p;
  p.roots = state.roots();  // nothing actually removed
  p.witness = state.WitnessFor(*loc);
  p.fid = requested;
  p.leaf_position = loc->position;
  p.prev_hash = head;
  return p;
}

std::optional<Proof> ForgeMutateIndex(const Accumulator& state,
                                      const Digest& head, Rng& rng) {
  const auto live = state.Live();
  if (live.empty()) return std::nullopt;
  const Fid target = Pick(live, rng).second;
  const LeafLocation from = *state.Locate(target);
  const auto vacant = VacantLocations(state);

  switch (rng.Uniform(4)) {
    case 0: {
      // Re-announce the existing mapping with a different index.
      UploadProof p;
      p.roots = state.roots();
      p.witness = state.WitnessFor(from);
      p.fid = target;
      const std::uint64_t honest = aca::IndexOfLocation(p.roots, from);
      p.index = honest + 1 + rng.Uniform(state.capacity());
      p.prev_hash = head;
      return Proof{p};
    }
    case 1:
      if (!vacant.empty()) {
        // Move the fid to another leaf in one step.
        Accumulator after = state;
        after.Delete(target);
        aca::IndexAssignment a = after.InsertAt(target, Pick(vacant, rng));
        return Proof{ProofFrom(after, a, head)};
      }
      [[fallthrough]];
    case 2:
      if (!vacant.empty()) {
        // Map the fid a second time without removing the first mapping.
        Accumulator scratch = state;
        const LeafLocation to = Pick(vacant, rng);
        UploadProof p;
        p.witness = scratch.WitnessFor(to);
        p.roots = scratch.roots();
        p.roots[to.tree] = aca::FoldPath(aca::LeafDigest(target), p.witness);
        p.fid = target;
        p.index = aca::ComputeIndex(p.roots, to.tree, p.witness);
        p.prev_hash = head;
        return Proof{p};
      }
      [[fallthrough]];
    default: {
      if (live.size() < 2) {
        UploadProof p;
        p.roots = state.roots();
        p.witness = state.WitnessFor(from);
        p.fid = target;
        p.index = aca::IndexOfLocation(p.roots, from) + 1;
        p.prev_hash = head;
        return Proof{p};
      }
      // Swap two fids' leaves and announce the target at its new index.
      Fid other = target;
      while (other == target) other = Pick(live, rng).second;
      const LeafLocation other_loc = *state.Locate(other);
      Accumulator after = state;
      after.Delete(target);
      after.Delete(other);
      after.InsertAt(other, from);
      aca::IndexAssignment a = after.InsertAt(target, other_loc);
      return Proof{ProofFrom(after, a, head)};
    }
  }
}

std::optional<Proof> ForgeForUpload(Strategy s, const Accumulator& state,
                                    const Fid& fid, const Digest& head,
                                    Rng& rng) {
  switch (s) {
    case Strategy::kConflictIndex:
      if (auto p = ForgeConflictIndex(state, fid, head, rng)) return Proof{*p};
      return std::nullopt;
    case Strategy::kWrongVacantIndex:
      if (auto p = ForgeWrongVacantIndex(state, fid, head, rng)) return Proof{*p};
      return std::nullopt;
    case Strategy::kMutateIndex:
      return ForgeMutateIndex(state, head, rng);
    default:
      return std::nullopt;
  }
}

std::optional<Proof> ForgeForDelete(Strategy s, const Accumulator& state,
                                    const Fid& fid, const Digest& head,
                                    Rng& rng) {
  switch (s) {
    case Strategy::kDeleteWrongFid:
      if (auto p = ForgeDeleteWrongFid(state, fid, head, rng)) return Proof{*p};
      return std::nullopt;
    case Strategy::kFakeDelete:
      if (auto p = ForgeFakeDelete(state, fid, head)) return Proof{*p};
      return std::nullopt;
    case Strategy::kMutateIndex:
      return ForgeMutateIndex(state, head, rng);
    default:
      return std::nullopt;
  }
}

}  // namespace pirdsn::attacks
