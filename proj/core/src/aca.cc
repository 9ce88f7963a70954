#include "pirdsn/aca.h"

#include <algorithm>
#include <array>
#include <string>

namespace pirdsn::aca {
namespace {

constexpr std::uint32_t kMaxLevel = 48;

const std::array<Digest, kMaxLevel + 1>& VacantTable() {
  static const std::array<Digest, kMaxLevel + 1> table = [] {
    std::array<Digest, kMaxLevel + 1> t{};
    t[0] = Sha256Uncounted(AsBytes("ACA-VACANT"));
    for (std::uint32_t i = 1; i <= kMaxLevel; ++i) {
      t[i] = HashTaggedUncounted(HashDomain::kMerkleNode, {t[i - 1], t[i - 1]});
    }
    return t;
  }();
  return table;
}

Side SiblingSide(std::uint64_t position, std::uint32_t height) {
  return ((position >> height) & 1) ? Side::kLeft : Side::kRight;
}

}  // namespace

Fid Fid::OfContent(std::span<const std::uint8_t> content) {
  return Fid{Sha256(content)};
}

Digest LeafDigest(const Fid& fid) {
  return HashTagged(HashDomain::kMerkleLeaf, {fid.digest});
}

const Digest& VacantLeafDigest() { return VacantTable()[0]; }

const Digest& VacantSubtreeDigest(std::uint32_t level) {
  if (level > kMaxLevel) throw std::out_of_range("tree level too large");
  return VacantTable()[level];
}

Digest NodeDigest(const Digest& left, const Digest& right) {
  return HashTagged(HashDomain::kMerkleNode, {left, right});
}

Digest EffectiveRoot(const RootVector& v, std::uint32_t k) {
  if (k >= v.size()) throw std::domain_error("tree index out of range");
  return v[k] ? *v[k] : VacantSubtreeDigest(k);
}

Digest FoldPath(const Digest& leaf, const Witness& w) {
  Digest acc = leaf;
  for (const auto& step : w.path) {
    acc = step.side == Side::kLeft ? NodeDigest(step.sibling, acc)
                                   : NodeDigest(acc, step.sibling);
  }
  return acc;
}

bool WitnessWellFormed(const Witness& w) {
  if (w.tree_index > kMaxLevel) return false;
  if (w.path.size() != w.tree_index) return false;
  if (w.leaf_position >= (std::uint64_t{1} << w.tree_index)) return false;
  for (std::uint32_t j = 0; j < w.path.size(); ++j) {
    if (w.path[j].side != SiblingSide(w.leaf_position, j)) return false;
  }
  return true;
}

std::uint64_t CapacityFor(std::size_t m) {
  return (std::uint64_t{1} << m) - 1;
}

std::uint64_t ComputeIndex(const RootVector& v, std::uint32_t k,
                           const Witness& w) {
  if (k >= v.size()) {
    throw std::domain_error("tree index " + std::to_string(k) +
                            " outside vector of length " +
                            std::to_string(v.size()));
  }
  if (w.path.size() > k) throw std::domain_error("witness longer than tree height");
  std::uint64_t index = 1;
  for (std::size_t i = k + 1; i < v.size(); ++i) {
    if (v[i]) index += std::uint64_t{1} << i;
  }
  for (std::size_t j = 0; j < w.path.size(); ++j) {
    if (w.path[j].side == Side::kLeft) index += std::uint64_t{1} << j;
  }
  return index;
}

std::uint64_t IndexOfLocation(const RootVector& v, LeafLocation loc) {
  if (loc.tree >= v.size()) throw std::domain_error("tree index out of range");
  std::uint64_t index = 1 + loc.position;
  for (std::size_t i = loc.tree + 1; i < v.size(); ++i) {
    if (v[i]) index += std::uint64_t{1} << i;
  }
  return index;
}

LeafLocation IndexToLeaf(const RootVector& v, std::uint64_t index) {
  if (index < 1 || index > CapacityFor(v.size())) {
    throw std::out_of_range("index " + std::to_string(index) +
                            " outside [1, capacity]");
  }
  std::uint64_t remaining = index;
  for (std::size_t i = v.size(); i-- > 0;) {
    if (!v[i]) continue;
    const std::uint64_t width = std::uint64_t{1} << i;
    if (remaining <= width) {
      return {static_cast<std::uint32_t>(i), remaining - 1};
    }
    remaining -= width;
  }
  throw std::out_of_range("index " + std::to_string(index) +
                          " lies beyond every occupied tree");
}

bool VerifyMembership(const RootVector& v, std::uint32_t k, const Witness& w,
                      const Fid& fid) {
  if (k >= v.size() || !v[k]) return false;
  if (w.tree_index != k || !WitnessWellFormed(w)) return false;
  return FoldPath(LeafDigest(fid), w) == *v[k];
}

// --- Tree ------------------------------------------------------------------

Accumulator::Tree Accumulator::Tree::Empty(std::uint32_t level) {
  Tree t;
  t.level = level;
  const std::uint64_t width = std::uint64_t{1} << level;
  t.nodes.resize(2 * width);
  for (std::uint64_t node = 2 * width - 1; node >= 1; --node) {
    // Height of `node` above the leaves.
    std::uint32_t height = 0;
    for (std::uint64_t n = node; n < width; n <<= 1) ++height;
    t.nodes[node] = VacantSubtreeDigest(height);
  }
  t.leaves.assign(width, std::nullopt);
  for (std::uint64_t i = 0; i < width; ++i) t.vacant.insert(t.vacant.end(), i);
  return t;
}

Accumulator::Tree Accumulator::Tree::FromLeaves(
    std::uint32_t level, std::vector<std::optional<Fid>> leaves) {
  Tree t;
  t.level = level;
  const std::uint64_t width = std::uint64_t{1} << level;
  if (leaves.size() != width) throw std::logic_error("leaf count mismatch");
  t.nodes.resize(2 * width);
  for (std::uint64_t i = 0; i < width; ++i) {
    if (leaves[i]) {
      t.nodes[width + i] = LeafDigest(*leaves[i]);
    } else {
      t.nodes[width + i] = VacantLeafDigest();
      t.vacant.insert(t.vacant.end(), i);
    }
  }
  for (std::uint64_t node = width - 1; node >= 1; --node) {
    t.nodes[node] = NodeDigest(t.nodes[2 * node], t.nodes[2 * node + 1]);
  }
  t.leaves = std::move(leaves);
  return t;
}

void Accumulator::Tree::SetLeaf(std::uint64_t pos, std::optional<Fid> value) {
  const std::uint64_t w = width();
  std::uint64_t node = w + pos;
  nodes[node] = value ? LeafDigest(*value) : VacantLeafDigest();
  if (value) {
    vacant.erase(pos);
  } else {
    vacant.insert(pos);
  }
  leaves[pos] = std::move(value);
  for (node >>= 1; node >= 1; node >>= 1) {
    nodes[node] = NodeDigest(nodes[2 * node], nodes[2 * node + 1]);
  }
}

// --- Accumulator -------------------------------------------------------------

Accumulator Accumulator::Gen() {
  Accumulator acc;
  acc.trees_.push_back(Tree::Empty(0));
  acc.roots_.push_back(std::nullopt);
  return acc;
}

void Accumulator::RefreshRoot(std::uint32_t k) {
  const Tree& t = trees_[k];
  roots_[k] = t.occupied() == 0 ? Root{} : Root{t.root()};
}

IndexAssignment Accumulator::Assignment(const Fid& fid, LeafLocation loc,
                                        bool grew) const {
  IndexAssignment a;
  a.fid = fid;
  a.tree_index = loc.tree;
  a.witness = WitnessFor(loc);
  a.index = ComputeIndex(roots_, loc.tree, a.witness);
  a.grew = grew;
  return a;
}

std::optional<LeafLocation> Accumulator::NextSlot() const {
  for (std::size_t i = trees_.size(); i-- > 0;) {
    if (!trees_[i].vacant.empty()) {
      return LeafLocation{static_cast<std::uint32_t>(i),
                          *trees_[i].vacant.begin()};
    }
  }
  return std::nullopt;
}

IndexAssignment Accumulator::Insert(const Fid& fid) {
  if (Contains(fid)) throw DuplicateFid();
  if (auto slot = NextSlot()) return InsertAt(fid, *slot);
  return InsertGrow(fid);
}

IndexAssignment Accumulator::InsertAt(const Fid& fid, LeafLocation loc) {
  if (Contains(fid)) throw DuplicateFid();
  if (loc.tree >= trees_.size() || loc.position >= trees_[loc.tree].width()) {
    throw std::out_of_range("leaf location outside the forest");
  }
  Tree& t = trees_[loc.tree];
  if (t.leaves[loc.position]) throw std::logic_error("target leaf is occupied");
  t.SetLeaf(loc.position, fid);
  RefreshRoot(loc.tree);
  where_[fid] = loc;
  return Assignment(fid, loc, false);
}

IndexAssignment Accumulator::InsertGrow(const Fid& fid) {
  if (Contains(fid)) throw DuplicateFid();
  const std::uint32_t m = this->m();
  if (m >= kMaxLevel) throw std::length_error("accumulator at maximum height");
  std::vector<std::optional<Fid>> merged;
  merged.reserve(std::size_t{1} << m);
  for (std::size_t i = m; i-- > 0;) {
    for (auto& leaf : trees_[i].leaves) merged.push_back(leaf);
  }
  merged.push_back(fid);

  for (std::uint32_t i = 0; i < m; ++i) {
    trees_[i] = Tree::Empty(i);
    roots_[i] = std::nullopt;
  }
  trees_.push_back(Tree::FromLeaves(m, std::move(merged)));
  roots_.push_back(std::nullopt);
  RefreshRoot(m);

  where_.clear();
  const Tree& top = trees_[m];
  for (std::uint64_t p = 0; p < top.width(); ++p) {
    if (top.leaves[p]) where_[*top.leaves[p]] = LeafLocation{m, p};
  }
  return Assignment(fid, LeafLocation{m, top.width() - 1}, true);
}

Deletion Accumulator::Delete(const Fid& fid) {
  auto it = where_.find(fid);
  if (it == where_.end()) throw FidNotFound();
  const LeafLocation loc = it->second;
  Deletion d;
  d.tree_index = loc.tree;
  d.leaf_position = loc.position;
  d.witness = WitnessFor(loc);
  trees_[loc.tree].SetLeaf(loc.position, std::nullopt);
  RefreshRoot(loc.tree);
  d.tree_emptied = !roots_[loc.tree].has_value();
  where_.erase(it);
  return d;
}

std::optional<LeafLocation> Accumulator::Locate(const Fid& fid) const {
  auto it = where_.find(fid);
  if (it == where_.end()) return std::nullopt;
  return it->second;
}

std::optional<Fid> Accumulator::LeafAt(LeafLocation loc) const {
  if (loc.tree >= trees_.size() || loc.position >= trees_[loc.tree].width()) {
    throw std::out_of_range("leaf location outside the forest");
  }
  return trees_[loc.tree].leaves[loc.position];
}

Witness Accumulator::WitnessFor(LeafLocation loc) const {
  if (loc.tree >= trees_.size() || loc.position >= trees_[loc.tree].width()) {
    throw std::out_of_range("leaf location outside the forest");
  }
  const Tree& t = trees_[loc.tree];
  Witness w;
  w.tree_index = loc.tree;
  w.leaf_position = loc.position;
  w.path.reserve(loc.tree);
  std::uint64_t node = t.width() + loc.position;
  for (std::uint32_t h = 0; h < loc.tree; ++h, node >>= 1) {
    w.path.push_back(PathStep{t.nodes[node ^ 1], SiblingSide(loc.position, h)});
  }
  return w;
}

std::uint64_t Accumulator::IndexOf(const Fid& fid) const {
  auto loc = Locate(fid);
  if (!loc) throw FidNotFound();
  return IndexOfLocation(roots_, *loc);
}

std::uint64_t Accumulator::occupied_in_tree(std::uint32_t k) const {
  return trees_.at(k).occupied();
}

std::vector<std::pair<std::uint64_t, Fid>> Accumulator::Live() const {
  std::vector<std::pair<std::uint64_t, Fid>> out;
  out.reserve(where_.size());
  for (const auto& [fid, loc] : where_) {
    out.emplace_back(IndexOfLocation(roots_, loc), fid);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Bytes Accumulator::Serialize() const {
  ByteWriter w;
  w.U32(m());
  for (const Tree& t : trees_) {
    w.U64(t.occupied());
    for (const auto& leaf : t.leaves) {
      w.U8(leaf ? 1 : 0);
      if (leaf) w.Put(leaf->digest);
    }
  }
  return std::move(w).Take();
}

Accumulator Accumulator::Deserialize(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const std::uint32_t m = r.U32();
  if (m == 0 || m > 32) throw DecodeError("accumulator height out of range");
  Accumulator acc;
  for (std::uint32_t i = 0; i < m; ++i) {
    const std::uint64_t declared = r.U64();
    const std::uint64_t width = std::uint64_t{1} << i;
    std::vector<std::optional<Fid>> leaves(width);
    std::uint64_t occupied = 0;
    for (std::uint64_t p = 0; p < width; ++p) {
      const std::uint8_t flag = r.U8();
      if (flag > 1) throw DecodeError("bad leaf flag");
      if (flag == 1) {
        leaves[p] = Fid{r.GetDigest()};
        ++occupied;
      }
    }
    if (occupied != declared) throw DecodeError("occupied count mismatch");
    acc.trees_.push_back(Tree::FromLeaves(i, std::move(leaves)));
    acc.roots_.push_back(std::nullopt);
    acc.RefreshRoot(i);
    for (std::uint64_t p = 0; p < width; ++p) {
      const auto& leaf = acc.trees_[i].leaves[p];
      if (leaf && !acc.where_.emplace(*leaf, LeafLocation{i, p}).second) {
        throw DecodeError("fid appears in more than one leaf");
      }
    }
  }
  r.ExpectDone();
  return acc;
}

Digest Accumulator::StateDigest() const {
  return HashTagged(HashDomain::kStateDigest, {Serialize()});
}

void Accumulator::CheckInvariants() const {
  if (trees_.empty() || roots_.size() != trees_.size()) {
    throw std::logic_error("root vector and forest disagree in length");
  }
  std::uint64_t occupied_total = 0;
  for (std::uint32_t k = 0; k < trees_.size(); ++k) {
    const Tree& t = trees_[k];
    if (t.level != k || t.leaves.size() != t.width()) {
      throw std::logic_error("tree " + std::to_string(k) + " has wrong shape");
    }
    Tree rebuilt = Tree::FromLeaves(k, t.leaves);
    if (rebuilt.nodes != t.nodes || rebuilt.vacant != t.vacant) {
      throw std::logic_error("tree " + std::to_string(k) +
                             " digests out of date");
    }
    const bool empty = t.occupied() == 0;
    if (empty != !roots_[k].has_value()) {
      throw std::logic_error("vacancy marker mismatch at tree " +
                             std::to_string(k));
    }
    if (!empty && *roots_[k] != rebuilt.root()) {
      throw std::logic_error("root mismatch at tree " + std::to_string(k));
    }
    for (std::uint64_t p = 0; p < t.width(); ++p) {
      if (!t.leaves[p]) continue;
      ++occupied_total;
      auto it = where_.find(*t.leaves[p]);
      if (it == where_.end() || it->second != LeafLocation{k, p}) {
        throw std::logic_error("fid location index out of date");
      }
    }
  }
  if (occupied_total != where_.size()) {
    throw std::logic_error("fid appears in more than one leaf");
  }
}

}  // namespace pirdsn::aca
