#include "pirdsn/store.h"

#include <gtest/gtest.h>

#include <filesystem>

#include "oracles.h"

namespace pirdsn::store {
namespace {

Bytes Content(int i) {
  Bytes b(5 + i % 20);
  for (std::size_t j = 0; j < b.size(); ++j) b[j] = static_cast<std::uint8_t>(i * 31 + j);
  return b;
}

// Applies honest proofs the way a miner does after ledger acceptance.
struct Driver {
  MinerState state{"m", 32};
  aca::Accumulator shadow = aca::Accumulator::Gen();
  void Upload(int i) {
    const Bytes c = Content(i);
    state.ApplyUpload(
        proofs::MakeUploadProof(shadow, aca::Fid::OfContent(c), state.chain_head()), c);
  }
  void Delete(int i) {
    state.ApplyDelete(proofs::MakeDeletionProof(
        shadow, aca::Fid::OfContent(Content(i)), state.chain_head()));
  }
};

TEST(FileStoreTest, ChecksContentHash) {
  FileStore fs;
  const Bytes c = Content(1);
  EXPECT_THROW(fs.Put(aca::Fid::OfContent(Content(2)), c), std::invalid_argument);
  fs.Put(aca::Fid::OfContent(c), c);
  EXPECT_EQ(*fs.Get(aca::Fid::OfContent(c)), c);
  fs.Erase(aca::Fid::OfContent(c));
  EXPECT_EQ(fs.Get(aca::Fid::OfContent(c)), nullptr);
}

TEST(MinerStateTest, SnapshotMatchesAccumulator) {
  Driver d;
  for (int i = 0; i < 13; ++i) d.Upload(i);
  d.Delete(4);
  d.Delete(9);
  d.state.CheckCoherence();
  const auto db = d.state.Snapshot();
  EXPECT_EQ(db->size(), d.shadow.capacity());
  for (int i = 0; i < 13; ++i) {
    const aca::Fid fid = aca::Fid::OfContent(Content(i));
    if (i == 4 || i == 9) continue;
    const auto rec = db->Record(d.shadow.IndexOf(fid));
    EXPECT_EQ(Bytes(rec.begin(), rec.end()), testing::PadRecord(Content(i), 32));
  }
  EXPECT_EQ(d.state.applied(), 15u);
}

TEST(MinerStateTest, PreviousSnapshotRetainedAcrossGrowth) {
  Driver d;
  for (int i = 0; i < 3; ++i) d.Upload(i);
  const auto before = d.state.Snapshot();
  EXPECT_EQ(before->size(), 3u);
  d.Upload(3);
  EXPECT_EQ(d.state.Snapshot()->size(), 7u);
  ASSERT_NE(d.state.SnapshotForSize(3), nullptr);
  EXPECT_EQ(*d.state.SnapshotForSize(3), *before);
  EXPECT_EQ(d.state.SnapshotForSize(15), nullptr);
}

TEST(MinerStateTest, RejectsProofThatDisagrees) {
  Driver d;
  d.Upload(0);
  aca::Accumulator other = aca::Accumulator::Gen();
  const Bytes c = Content(7);
  auto p = proofs::MakeUploadProof(other, aca::Fid::OfContent(c), d.state.chain_head());
  EXPECT_ANY_THROW(d.state.ApplyUpload(p, c));
}

TEST(MinerStateTest, CheckpointRoundTrip) {
  Driver d;
  for (int i = 0; i < 10; ++i) d.Upload(i);
  d.Delete(2);
  const MinerState back = MinerState::Restore(d.state.Checkpoint());
  EXPECT_EQ(back.StateDigest(), d.state.StateDigest());
  EXPECT_EQ(back.chain_head(), d.state.chain_head());
  Bytes corrupt = d.state.Checkpoint();
  corrupt[corrupt.size() / 2] ^= 1;
  EXPECT_ANY_THROW(MinerState::Restore(corrupt));

  const auto path = std::filesystem::temp_directory_path() / "pirdsn_ckpt_test.bin";
  d.state.SaveCheckpoint(path);
  EXPECT_EQ(MinerState::LoadCheckpoint(path).StateDigest(), d.state.StateDigest());
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace pirdsn::store
