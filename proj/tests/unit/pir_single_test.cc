#include "pirdsn/pir_single.h"

#include <gtest/gtest.h>

#include "oracles.h"
#include "pirdsn/node.h"

namespace pirdsn::pir {
namespace {

struct Fixture {
  Database db;
  std::vector<Bytes> files;
};

Fixture Filled(std::uint64_t n, std::size_t record_len, Rng& rng) {
  Fixture f{Database(n, record_len), {}};
  for (std::uint64_t i = 1; i <= n; ++i) {
    Bytes file(1 + rng.Uniform(record_len - 4));
    rng.Fill(file);
    f.db.SetRecord(i, Database::EncodeRecord(file, record_len));
    f.files.push_back(file);
  }
  return f;
}

TEST(SinglePirTest, LatticeSweep256By1K) {
  Rng rng(1);
  Fixture fx = Filled(256, 1024, rng);
  SingleParams params;
  auto pub = std::make_shared<const LwePublic>(LweSetup(fx.db, rng.NextDigest()));
  for (std::uint64_t i = 1; i <= fx.db.size(); ++i) {
    auto [st, q] = SQuery(i, fx.db.size(), 1024, params, pub, rng);
    const auto a = SAnswer(fx.db, q);
    ASSERT_EQ(a.records_touched, fx.db.size());
    ASSERT_EQ(SDecrypt(st, a), testing::PadRecord(fx.files[i - 1], 1024)) << i;
  }
}

TEST(SinglePirTest, SmallRecordsManyTrials) {
  Rng rng(2);
  SingleParams params;
  for (std::uint64_t n : {7u, 63u, 255u}) {
    Fixture fx = Filled(n, 32, rng);
    auto pub = std::make_shared<const LwePublic>(LweSetup(fx.db, rng.NextDigest()));
    for (int trial = 0; trial < 100; ++trial) {
      const std::uint64_t i = 1 + rng.Uniform(n);
      auto [st, q] = SQuery(i, n, 32, params, pub, rng);
      ASSERT_EQ(SDecrypt(st, SAnswer(fx.db, q)), testing::PadRecord(fx.files[i - 1], 32));
    }
  }
}

TEST(SinglePirTest, PlainBackendRequiresOptIn) {
  Rng rng(3);
  Fixture fx = Filled(6, 16, rng);
  SingleParams params;
  params.backend = Backend::kPlain;
  EXPECT_THROW(SQuery(1, 6, 16, params, nullptr, rng), std::logic_error);
  params.allow_plain_backend = true;
  auto [st, q] = SQuery(6, 6, 16, params, nullptr, rng);
  EXPECT_EQ(SDecrypt(st, SAnswer(fx.db, q)), testing::PadRecord(fx.files[5], 16));
}

TEST(SinglePirTest, QueryDoesNotExposeIndex) {
  Rng rng(4);
  Fixture fx = Filled(16, 16, rng);
  SingleParams params;
  auto pub = std::make_shared<const LwePublic>(LweSetup(fx.db, rng.NextDigest()));
  auto [s1, q1] = SQuery(3, 16, 16, params, pub, rng);
  auto [s2, q2] = SQuery(3, 16, 16, params, pub, rng);
  // Fresh secrets each time: two queries for the same index share nothing.
  EXPECT_NE(q1.payload, q2.payload);
  std::uint64_t equal = 0;
  for (std::size_t j = 0; j < q1.payload.size(); ++j) equal += q1.payload[j] == q2.payload[j];
  EXPECT_LT(equal, 3u);
}

TEST(SinglePirTest, ArgumentErrors) {
  Rng rng(5);
  Fixture fx = Filled(8, 16, rng);
  SingleParams params;
  auto pub = std::make_shared<const LwePublic>(LweSetup(fx.db, rng.NextDigest()));
  EXPECT_THROW(SQuery(0, 8, 16, params, pub, rng), std::out_of_range);
  EXPECT_THROW(SQuery(9, 8, 16, params, pub, rng), std::out_of_range);
  EXPECT_THROW(SQuery(1, 9, 16, params, pub, rng), std::invalid_argument);
  auto [st, q] = SQuery(1, 8, 16, params, pub, rng);
  Database other(9, 16);
  EXPECT_THROW(SAnswer(other, q), std::invalid_argument);
}

TEST(SinglePirTest, WireFormatRoundTrip) {
  Rng rng(6);
  Fixture fx = Filled(8, 16, rng);
  SingleParams params;
  auto pub = std::make_shared<const LwePublic>(LweSetup(fx.db, rng.NextDigest()));
  auto [st, q] = SQuery(5, 8, 16, params, pub, rng);
  EXPECT_EQ(DeserializeQuery(SerializeQuery(q)), q);
  const auto a = SAnswer(fx.db, q);
  const auto back = DeserializeAnswer(SerializeAnswer(a));
  EXPECT_EQ(back.payload, a.payload);
  EXPECT_EQ(SDecrypt(st, back), testing::PadRecord(fx.files[4], 16));
  Bytes junk = SerializeAnswer(a);
  junk.resize(junk.size() / 2);
  EXPECT_ANY_THROW(DeserializeAnswer(junk));
}

TEST(SinglePirTest, TamperedAnswerNeverYieldsWrongRecordSilently) {
  Rng rng(7);
  Fixture fx = Filled(63, 64, rng);
  SingleParams params;
  auto pub = std::make_shared<const LwePublic>(LweSetup(fx.db, rng.NextDigest()));
  int caught = 0, silent = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::uint64_t i = 1 + rng.Uniform(63);
    auto [st, q] = SQuery(i, 63, 64, params, pub, rng);
    const auto bad = node::TamperSingleAnswer(SAnswer(fx.db, q), rng);
    try {
      auto file = Database::DecodeRecord(SDecrypt(st, bad));
      if (!file || aca::Fid::OfContent(*file) != aca::Fid::OfContent(fx.files[i - 1])) {
        ++caught;
      } else {
        ++silent;
      }
    } catch (const std::exception&) {
      ++caught;
    }
  }
  EXPECT_EQ(caught, 50);
  EXPECT_EQ(silent, 0);
}

}  // namespace
}  // namespace pirdsn::pir
