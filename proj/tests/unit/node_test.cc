#include "pirdsn/node.h"

#include <gtest/gtest.h>

#include "oracles.h"

namespace pirdsn::node {
namespace {

using attacks::Strategy;

Bytes Content(int i) { return Bytes{static_cast<std::uint8_t>(i), 7, 7, static_cast<std::uint8_t>(i * 3)}; }

MinerConfig Config(std::string id, Strategy s) {
  MinerConfig c;
  c.id = std::move(id);
  c.strategy = s;
  c.record_len = 32;
  c.lwe.dimension = 256;
  return c;
}

TEST(SpirMinerTest, HonestUploadsReachLedgerAndStore) {
  auto ledger = std::make_shared<ledger::Ledger>();
  SpirMiner m(Config("m", Strategy::kHonest), ledger);
  for (int i = 1; i <= 6; ++i) {
    const auto out = m.HandleUpload(Content(i));
    ASSERT_TRUE(out.accepted) << out.reason;
    EXPECT_EQ(out.index, static_cast<std::uint64_t>(i));
  }
  EXPECT_EQ(ledger->Height("m"), 6u);
  m.state().CheckCoherence();
  EXPECT_TRUE(m.HandleDelete(aca::Fid::OfContent(Content(2))).accepted);
  EXPECT_FALSE(m.HandleDelete(aca::Fid::OfContent(Content(2))).accepted);
  // Re-uploading a stored file is idempotent and publishes nothing.
  const auto again = m.HandleUpload(Content(3));
  EXPECT_TRUE(again.accepted);
  EXPECT_EQ(again.index, m.state().accumulator().IndexOf(aca::Fid::OfContent(Content(3))));
  EXPECT_EQ(ledger->Height("m"), 7u);
}

TEST(SpirMinerTest, ForgedProofsAreRefusedAndNotApplied) {
  auto ledger = std::make_shared<ledger::Ledger>();
  SpirMiner m(Config("b", Strategy::kConflictIndex), ledger);
  ASSERT_TRUE(m.HandleUpload(Content(1)).accepted);  // nothing to conflict with yet
  const Digest before = m.state().StateDigest();
  const auto out = m.HandleUpload(Content(2));
  EXPECT_FALSE(out.accepted);
  EXPECT_TRUE(out.forged);
  EXPECT_EQ(out.rejection, proofs::Rejection::kIndexConflict);
  EXPECT_EQ(m.state().StateDigest(), before);
  EXPECT_EQ(m.stats().forged_rejected, 1u);
  EXPECT_EQ(ledger->Height("b"), 1u);
}

TEST(SpirMinerTest, AnswersQueriesForRetainedSizesOnly) {
  auto ledger = std::make_shared<ledger::Ledger>();
  SpirMiner m(Config("m", Strategy::kHonest), ledger);
  for (int i = 1; i <= 3; ++i) m.HandleUpload(Content(i));
  auto pub = m.Hint(3);
  ASSERT_NE(pub, nullptr);
  Rng rng(1);
  pir::SingleParams params;
  params.lwe.dimension = 256;
  auto [st, q] = pir::SQuery(2, 3, 32, params, pub, rng);
  const auto rec = pir::SDecrypt(st, m.HandleQuery(q));
  EXPECT_EQ(rec, testing::PadRecord(Content(2), 32));
  EXPECT_EQ(m.Hint(15), nullptr);
  auto [st2, q2] = pir::SQuery(1, 3, 32, params, pub, rng);
  q2.db_size = 15;
  EXPECT_THROW(m.HandleQuery(q2), std::out_of_range);
}

TEST(CorruptionTest, AlwaysDiffersFromHonest) {
  Rng rng(2);
  pir::Database db(6, 16);
  for (std::uint64_t i = 1; i <= 6; ++i) db.SetRecord(i, Bytes(16, static_cast<std::uint8_t>(i)));
  for (int how = 0; how < 5; ++how) {
    for (int trial = 0; trial < 20; ++trial) {
      auto [st, qs] = pir::MQuery(1 + rng.Uniform(6), 6, 16, 4, 1, rng);
      const auto honest = pir::MAnswer(db, qs[0]);
      const auto bad = CorruptMultiAnswer(db, qs[0], honest, static_cast<Corruption>(how), rng);
      EXPECT_NE(bad.words, honest.words) << how;
      EXPECT_EQ(bad.words.size(), honest.words.size());
    }
  }
}

TEST(CorruptionTest, TamperChangesSerializedAnswer) {
  Rng rng(3);
  pir::SingleAnswer a;
  a.db_size = 4;
  a.record_len = 8;
  a.payload.assign(64, 5);
  for (int i = 0; i < 20; ++i) {
    EXPECT_NE(pir::SerializeAnswer(TamperSingleAnswer(a, rng)), pir::SerializeAnswer(a));
  }
}

TEST(MessagesTest, EncodingsAreCanonical) {
  UploadMsg u;
  u.request_id = 3;
  u.content = Content(1);
  UploadMsg v = u;
  EXPECT_EQ(u.Encode(), v.Encode());
  v.request_id = 4;
  EXPECT_NE(u.Encode(), v.Encode());
  RefusalMsg r;
  r.reason = "stale";
  EXPECT_FALSE(r.Encode().empty());
}

}  // namespace
}  // namespace pirdsn::node
