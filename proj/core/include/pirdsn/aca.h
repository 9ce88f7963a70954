#ifndef PIRDSN_ACA_H_
#define PIRDSN_ACA_H_

// Asynchronous cryptographic accumulator: a Merkle forest whose i-th tree has
// 2^i leaves. Occupied leaves hold file identifiers; the position of a leaf in
// the forest is the file's compact database index.

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "pirdsn/bytes.h"
#include "pirdsn/hash.h"

namespace pirdsn::aca {

// File identifier: SHA-256 of the file content.
struct Fid {
  Digest digest{};

  static Fid OfContent(std::span<const std::uint8_t> content);

  friend auto operator<=>(const Fid&, const Fid&) = default;
};

struct FidHash {
  std::size_t operator()(const Fid& f) const noexcept {
    return DigestHash{}(f.digest);
  }
};

// Which side of the running node the sibling sits on.
enum class Side : std::uint8_t { kLeft = 0, kRight = 1 };

struct PathStep {
  Digest sibling{};
  Side side = Side::kRight;
  friend bool operator==(const PathStep&, const PathStep&) = default;
};

// Merkle path from a leaf of tree `tree_index` up to its root. path[j] is the
// sibling at height j.
struct Witness {
  std::uint32_t tree_index = 0;
  std::uint64_t leaf_position = 0;
  std::vector<PathStep> path;
  friend bool operator==(const Witness&, const Witness&) = default;
};

// nullopt is the vacancy marker for a tree with no occupied leaf.
using Root = std::optional<Digest>;
using RootVector = std::vector<Root>;

struct LeafLocation {
  std::uint32_t tree = 0;
  std::uint64_t position = 0;
  friend auto operator<=>(const LeafLocation&, const LeafLocation&) = default;
};

class DuplicateFid : public std::runtime_error {
 public:
  DuplicateFid() : std::runtime_error("fid already present in accumulator") {}
};
class FidNotFound : public std::runtime_error {
 public:
  FidNotFound() : std::runtime_error("fid not present in accumulator") {}
};

// --- Digest helpers -------------------------------------------------------

Digest LeafDigest(const Fid& fid);
// Digest of a vacant leaf: SHA-256("ACA-VACANT").
const Digest& VacantLeafDigest();
// Root of an all-vacant subtree with 2^level leaves.
const Digest& VacantSubtreeDigest(std::uint32_t level);
Digest NodeDigest(const Digest& left, const Digest& right);
// Root digest for tree k, mapping the vacancy marker to the all-vacant digest.
Digest EffectiveRoot(const RootVector& v, std::uint32_t k);

// Folds `leaf` up the witness path: |path| node hashes.
Digest FoldPath(const Digest& leaf, const Witness& w);

// |path| == tree_index, leaf_position < 2^tree_index, and the position bits
// agree with the sides recorded on the path.
bool WitnessWellFormed(const Witness& w);

// --- Index arithmetic -----------------------------------------------------

// 1 + sum over occupied trees above k of 2^i + sum over left siblings of 2^j.
// Throws std::domain_error if k >= |v| or |path| > k.
std::uint64_t ComputeIndex(const RootVector& v, std::uint32_t k,
                           const Witness& w);
std::uint64_t IndexOfLocation(const RootVector& v, LeafLocation loc);
// Inverse of ComputeIndex. Throws std::out_of_range when index is outside
// [1, 2^m - 1] or falls past every occupied tree.
LeafLocation IndexToLeaf(const RootVector& v, std::uint64_t index);
std::uint64_t CapacityFor(std::size_t m);

bool VerifyMembership(const RootVector& v, std::uint32_t k, const Witness& w,
                      const Fid& fid);

// --- State ------------------------------------------------------------------

struct IndexAssignment {
  std::uint64_t index = 0;
  Fid fid;
  std::uint32_t tree_index = 0;
  Witness witness;
  bool grew = false;  // full-accumulator merge into a new top tree
};

struct Deletion {
  std::uint32_t tree_index = 0;
  std::uint64_t leaf_position = 0;
  Witness witness;  // path of the deleted leaf; unchanged by the deletion
  bool tree_emptied = false;
};

class Accumulator {
 public:
  // v = (vacant), capacity 1.
  static Accumulator Gen();

  // Places `fid` in the first vacant leaf scanning trees from the largest
  // down, or merges everything into a new top tree if no leaf is vacant.
  IndexAssignment Insert(const Fid& fid);
  // Clears the leaf holding `fid`; the tree collapses to vacant if it was the
  // last occupant.
  Deletion Delete(const Fid& fid);

  // Placement at an explicit vacant leaf, bypassing the scan order. Used to
  // replay published proofs and by fault-injection tooling.
  IndexAssignment InsertAt(const Fid& fid, LeafLocation loc);
  // Unconditional merge of all trees into a new top tree with `fid` in its
  // rightmost leaf.
  IndexAssignment InsertGrow(const Fid& fid);

  // Where Insert would place the next fid; nullopt means it would grow.
  std::optional<LeafLocation> NextSlot() const;
  std::optional<LeafLocation> Locate(const Fid& fid) const;
  std::optional<Fid> LeafAt(LeafLocation loc) const;
  bool Contains(const Fid& fid) const { return where_.contains(fid); }
  Witness WitnessFor(LeafLocation loc) const;
  std::uint64_t IndexOf(const Fid& fid) const;

  const RootVector& roots() const { return roots_; }
  std::uint32_t m() const { return static_cast<std::uint32_t>(trees_.size()); }
  std::uint64_t capacity() const { return CapacityFor(trees_.size()); }
  std::uint64_t size() const { return where_.size(); }
  std::uint64_t occupied_in_tree(std::uint32_t k) const;

  // Live fids with their current indexes, ascending by index.
  std::vector<std::pair<std::uint64_t, Fid>> Live() const;

  // u32 m, then per tree: u64 occupied count, and per leaf a flag byte plus
  // the fid digest when occupied. Roots are recomputed on load.
  Bytes Serialize() const;
  static Accumulator Deserialize(std::span<const std::uint8_t> bytes);
  Digest StateDigest() const;

  // Recomputes every root from its leaves and checks the bookkeeping.
  // Throws std::logic_error on any violation.
  void CheckInvariants() const;

  friend bool operator==(const Accumulator& a, const Accumulator& b) {
    return a.Serialize() == b.Serialize();
  }

 private:
  struct Tree {
    std::uint32_t level = 0;
    // Heap layout, 1-based: node 1 is the root, leaves at [2^level, 2^(level+1)).
    std::vector<Digest> nodes;
    std::vector<std::optional<Fid>> leaves;
    std::set<std::uint64_t> vacant;

    static Tree Empty(std::uint32_t level);
    static Tree FromLeaves(std::uint32_t level,
                           std::vector<std::optional<Fid>> leaves);
    std::uint64_t width() const { return std::uint64_t{1} << level; }
    std::uint64_t occupied() const { return width() - vacant.size(); }
    void SetLeaf(std::uint64_t pos, std::optional<Fid> value);
    const Digest& root() const { return nodes[1]; }
  };

  void RefreshRoot(std::uint32_t k);
  IndexAssignment Assignment(const Fid& fid, LeafLocation loc, bool grew) const;

  std::vector<Tree> trees_;
  RootVector roots_;
  std::unordered_map<Fid, LeafLocation, FidHash> where_;
};

}  // namespace pirdsn::aca

#endif  // PIRDSN_ACA_H_
