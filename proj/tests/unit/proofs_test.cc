#include "pirdsn/proofs.h"

#include <gtest/gtest.h>

#include "oracles.h"
#include "pirdsn/rng.h"

namespace pirdsn::proofs {
namespace {

using testing::LabelFid;

struct Chain {
  aca::Accumulator state = aca::Accumulator::Gen();
  Digest head = GenesisDigest("t");
  std::map<Digest, aca::RootVector> states{{GenesisDigest("t"), {std::nullopt}}};

  Proof Upload(int label) { return Record(MakeUploadProof(state, LabelFid(label), head)); }
  Proof Delete(int label) { return Record(MakeDeletionProof(state, LabelFid(label), head)); }
  Proof Record(Proof p) {
    head = ProofHash(p);
    states[head] = RootsOf(p);
    return p;
  }
  ChainResolver Resolver() const {
    return [this](const Digest& h) -> std::optional<aca::RootVector> {
      auto it = states.find(h);
      if (it == states.end()) return std::nullopt;
      return it->second;
    };
  }
};

TEST(ProofsTest, HonestChainVerifiesAndLinks) {
  Chain c;
  Rng rng(1);
  std::vector<int> live;
  Digest expected_prev = c.head;
  for (int i = 0; i < 100; ++i) {
    Proof p;
    if (live.empty() || rng.Bernoulli(0.65)) {
      p = c.Upload(i);
      live.push_back(i);
    } else {
      const auto pos = rng.Uniform(live.size());
      p = c.Delete(live[pos]);
      live.erase(live.begin() + static_cast<std::ptrdiff_t>(pos));
    }
    EXPECT_EQ(PrevHashOf(p), expected_prev);
    EXPECT_EQ(ProofHash(p), c.head);
    expected_prev = c.head;
    ASSERT_TRUE(VerifyProof(p, c.Resolver())) << i;
  }
}

TEST(ProofsTest, WorkedExampleUploadCarriesIndexSix) {
  Chain c;
  for (int i = 1; i <= 5; ++i) c.Upload(i);
  const auto p = std::get<UploadProof>(c.Upload(6));
  EXPECT_EQ(p.index, 6u);
  EXPECT_EQ(p.k(), 1u);
  EXPECT_TRUE(VerifyProof(p, c.Resolver()));
}

TEST(ProofsTest, CaseOneDeletionOfFidFive) {
  Chain c;
  for (int i = 1; i <= 6; ++i) c.Upload(i);
  const auto p = std::get<DeletionProof>(c.Delete(5));
  EXPECT_EQ(p.k(), 1u);
  EXPECT_TRUE(p.roots[1].has_value());
  EXPECT_TRUE(VerifyProof(p, c.Resolver()));
}

TEST(ProofsTest, UnknownPredecessorBreaksChain) {
  Chain c;
  Proof p = c.Upload(1);
  std::get<UploadProof>(p).prev_hash[0] ^= 1;
  EXPECT_EQ(VerifyProof(p, c.Resolver()).reason, Rejection::kChainBroken);
}

TEST(ProofsTest, TamperedFieldsAreRejected) {
  Chain c;
  for (int i = 1; i <= 9; ++i) c.Upload(i);
  const aca::RootVector before = c.state.roots();
  const auto honest = MakeUploadProof(c.state, LabelFid(50), c.head);

  auto wrong_index = honest;
  wrong_index.index += 1;
  EXPECT_EQ(VerifyUploadTransition(wrong_index, before).reason, Rejection::kIndexMismatch);

  auto wrong_fid = honest;
  wrong_fid.fid = LabelFid(51);
  EXPECT_EQ(VerifyUploadTransition(wrong_fid, before).reason, Rejection::kFidAbsent);

  auto other_tree = honest;
  for (std::uint32_t i = 0; i < other_tree.roots.size(); ++i) {
    if (i != honest.k()) other_tree.roots[i] = Digest{1};
  }
  EXPECT_FALSE(VerifyUploadTransition(other_tree, before));

  auto flipped = honest;
  if (!flipped.witness.path.empty()) {
    flipped.witness.path[0].sibling[3] ^= 0x10;
    EXPECT_FALSE(VerifyUploadTransition(flipped, before));
  }
}

TEST(ProofsTest, GrowthTransitionChecksOldRoots) {
  Chain c;
  for (int i = 1; i <= 3; ++i) c.Upload(i);  // full: capacity 3
  const aca::RootVector before = c.state.roots();
  auto p = MakeUploadProof(c.state, LabelFid(4), c.head);
  EXPECT_EQ(p.roots.size(), before.size() + 1);
  EXPECT_TRUE(VerifyUploadTransition(p, before));
  auto bad = p;
  bad.roots[0] = Digest{7};
  EXPECT_FALSE(VerifyUploadTransition(bad, before));
}

TEST(ProofsTest, SerializationRoundTrip) {
  Chain c;
  for (int i = 1; i <= 6; ++i) c.Upload(i);
  const Proof up = c.Upload(7);
  const Proof del = c.Delete(3);
  EXPECT_EQ(Deserialize(Serialize(up)), up);
  EXPECT_EQ(Deserialize(Serialize(del)), del);
  Bytes bytes = Serialize(del);
  bytes.push_back(0);
  EXPECT_THROW(Deserialize(bytes), DecodeError);
  EXPECT_NE(ProofHash(up), ProofHash(del));
}

TEST(ProofsTest, VerificationCostIsLogarithmic) {
  Chain c;
  for (int i = 0; i < 1000; ++i) c.Upload(i);
  const aca::RootVector before = c.state.roots();
  const auto p = MakeUploadProof(c.state, LabelFid(5000), c.head);
  ScopedHashCount count;
  ASSERT_TRUE(VerifyUploadTransition(p, before));
  EXPECT_LE(count.Elapsed(), 8u * 10 + 16);
}

}  // namespace
}  // namespace pirdsn::proofs
