#include "pirdsn/aca.h"

#include <gtest/gtest.h>

#include "oracles.h"
#include "pirdsn/rng.h"

namespace pirdsn::aca {
namespace {

using testing::FlatAca;
using testing::LabelFid;

Accumulator WorkedExample() {
  Accumulator acc = Accumulator::Gen();
  for (int i = 1; i <= 6; ++i) acc.Insert(LabelFid(i));
  return acc;
}

TEST(AccumulatorTest, GenIsSingleVacantTree) {
  const Accumulator acc = Accumulator::Gen();
  EXPECT_EQ(acc.m(), 1u);
  EXPECT_FALSE(acc.roots()[0].has_value());
  EXPECT_EQ(acc.capacity(), 1u);
  EXPECT_EQ(acc.size(), 0u);
}

TEST(AccumulatorTest, FirstInsertTakesIndexOne) {
  Accumulator acc = Accumulator::Gen();
  const auto a = acc.Insert(LabelFid(1));
  EXPECT_EQ(a.index, 1u);
  EXPECT_EQ(a.tree_index, 0u);
  EXPECT_TRUE(a.witness.path.empty());
}

TEST(AccumulatorTest, SecondInsertGrows) {
  Accumulator acc = Accumulator::Gen();
  acc.Insert(LabelFid(1));
  const auto a = acc.Insert(LabelFid(2));
  EXPECT_TRUE(a.grew);
  ASSERT_EQ(acc.m(), 2u);
  EXPECT_FALSE(acc.roots()[0].has_value());
  EXPECT_TRUE(acc.roots()[1].has_value());
  EXPECT_EQ(a.index, 2u);
  EXPECT_EQ(a.witness.leaf_position, 1u);
}

TEST(AccumulatorTest, WorkedExampleIndexSix) {
  Accumulator acc = Accumulator::Gen();
  for (int i = 1; i <= 5; ++i) acc.Insert(LabelFid(i));
  EXPECT_EQ(acc.occupied_in_tree(2), 4u);
  EXPECT_EQ(acc.occupied_in_tree(1), 1u);
  const auto a = acc.Insert(LabelFid(6));
  EXPECT_EQ(a.tree_index, 1u);
  EXPECT_EQ(a.witness.leaf_position, 1u);
  ASSERT_EQ(a.witness.path.size(), 1u);
  EXPECT_EQ(a.witness.path[0].side, Side::kLeft);
  EXPECT_EQ(ComputeIndex(acc.roots(), 1, a.witness), 6u);
  EXPECT_EQ(a.index, 6u);
}

TEST(AccumulatorTest, IndexToLeafInvertsWorkedExample) {
  const Accumulator acc = WorkedExample();
  EXPECT_EQ(acc.capacity(), 7u);
  const LeafLocation loc = IndexToLeaf(acc.roots(), 6);
  EXPECT_EQ(loc.tree, 1u);
  EXPECT_EQ(loc.position, 1u);
  const LeafLocation first = IndexToLeaf(acc.roots(), 1);
  EXPECT_EQ(first.tree, 2u);
  EXPECT_EQ(first.position, 0u);
  EXPECT_THROW(IndexToLeaf(acc.roots(), 0), std::out_of_range);
  EXPECT_THROW(IndexToLeaf(acc.roots(), 8), std::out_of_range);
}

TEST(AccumulatorTest, ComputeIndexDomain) {
  const Accumulator acc = WorkedExample();
  Witness w;
  w.tree_index = 5;
  EXPECT_THROW(ComputeIndex(acc.roots(), 5, w), std::domain_error);
  Witness empty;
  EXPECT_EQ(ComputeIndex(RootVector{Digest{}}, 0, empty), 1u);
}

TEST(AccumulatorTest, DeleteCaseOneRecomputesRoot) {
  Accumulator acc = WorkedExample();
  const Root before = acc.roots()[1];
  const auto d = acc.Delete(LabelFid(5));
  EXPECT_FALSE(d.tree_emptied);
  EXPECT_EQ(d.tree_index, 1u);
  ASSERT_TRUE(acc.roots()[1].has_value());
  EXPECT_NE(acc.roots()[1], before);
  EXPECT_FALSE(acc.LeafAt({1, 0}).has_value());
  // The path of the deleted leaf still folds to the old root.
  EXPECT_EQ(FoldPath(LeafDigest(LabelFid(5)), d.witness), *before);
  EXPECT_EQ(acc.IndexOf(LabelFid(6)), 6u);
}

TEST(AccumulatorTest, DeleteCaseTwoVacatesTree) {
  Accumulator acc = Accumulator::Gen();
  acc.Insert(LabelFid(1));
  const auto d = acc.Delete(LabelFid(1));
  EXPECT_TRUE(d.tree_emptied);
  EXPECT_FALSE(acc.roots()[0].has_value());
}

TEST(AccumulatorTest, ReinsertReusesFreedLeaf) {
  Accumulator acc = WorkedExample();
  const std::uint64_t freed = acc.IndexOf(LabelFid(3));
  acc.Delete(LabelFid(3));
  EXPECT_EQ(acc.Insert(LabelFid(99)).index, freed);
}

TEST(AccumulatorTest, DuplicateAndAbsent) {
  Accumulator acc = WorkedExample();
  EXPECT_THROW(acc.Insert(LabelFid(2)), DuplicateFid);
  EXPECT_THROW(acc.Delete(LabelFid(42)), FidNotFound);
}

TEST(AccumulatorTest, MembershipIsPositionBound) {
  Rng rng(11);
  Accumulator acc = Accumulator::Gen();
  for (int i = 0; i < 100; ++i) acc.Insert(LabelFid(i));
  for (int i = 0; i < 30; ++i) acc.Delete(LabelFid(i * 3));
  const auto live = acc.Live();
  for (const auto& [index, fid] : live) {
    const LeafLocation loc = *acc.Locate(fid);
    const Witness w = acc.WitnessFor(loc);
    ASSERT_TRUE(VerifyMembership(acc.roots(), loc.tree, w, fid));
    ASSERT_EQ(w.path.size(), loc.tree);
    const Fid other = live[rng.Uniform(live.size())].second;
    if (other != fid) EXPECT_FALSE(VerifyMembership(acc.roots(), loc.tree, w, other));
    if (!w.path.empty()) {
      Witness flipped = w;
      flipped.path[rng.Uniform(w.path.size())].sibling[0] ^= 1;
      EXPECT_FALSE(VerifyMembership(acc.roots(), loc.tree, flipped, fid));
    }
  }
}

TEST(AccumulatorTest, MatchesFlatOracle) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    Accumulator acc = Accumulator::Gen();
    FlatAca oracle;
    std::vector<int> live;
    for (int op = 0; op < 2000; ++op) {
      if (live.empty() || rng.Bernoulli(0.6)) {
        const int label = op;
        ASSERT_EQ(acc.Insert(LabelFid(label)).index, oracle.Insert(label));
        live.push_back(label);
      } else {
        const auto pos = rng.Uniform(live.size());
        acc.Delete(LabelFid(live[pos]));
        oracle.Delete(live[pos]);
        live.erase(live.begin() + static_cast<std::ptrdiff_t>(pos));
      }
      if (op % 97 == 0) {
        acc.CheckInvariants();
        for (int label : live) {
          ASSERT_EQ(acc.IndexOf(LabelFid(label)), *oracle.Index(label));
        }
      }
    }
    for (const auto& [index, fid] : acc.Live()) {
      EXPECT_EQ(IndexToLeaf(acc.roots(), index), *acc.Locate(fid));
    }
  }
}

TEST(AccumulatorTest, SerializationAndDeterminism) {
  Accumulator a = WorkedExample(), b = WorkedExample();
  a.Delete(LabelFid(2));
  b.Delete(LabelFid(2));
  EXPECT_EQ(a.Serialize(), b.Serialize());
  EXPECT_EQ(a.StateDigest(), b.StateDigest());
  const Accumulator back = Accumulator::Deserialize(a.Serialize());
  EXPECT_EQ(back, a);
  EXPECT_EQ(back.roots(), a.roots());
  Bytes bad = a.Serialize();
  bad.pop_back();
  EXPECT_ANY_THROW(Accumulator::Deserialize(bad));
}

TEST(AccumulatorTest, CapacityFor) {
  EXPECT_EQ(CapacityFor(1), 1u);
  EXPECT_EQ(CapacityFor(3), 7u);
}

}  // namespace
}  // namespace pirdsn::aca
