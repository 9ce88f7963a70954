#include "pirdsn/database.h"

#include <gtest/gtest.h>

#include "oracles.h"

namespace pirdsn::pir {
namespace {

TEST(DatabaseTest, RecordEncodingMatchesLayout) {
  const Bytes file = {'h', 'e', 'l', 'l', 'o'};
  EXPECT_EQ(Database::EncodeRecord(file, 16), testing::PadRecord(file, 16));
  EXPECT_EQ(Database::DecodeRecord(testing::PadRecord(file, 16)), file);
  EXPECT_FALSE(Database::DecodeRecord(Bytes(16, 0)).has_value());
  EXPECT_EQ(Database::MaxFileSize(16), 12u);
}

TEST(DatabaseTest, EncodingErrors) {
  EXPECT_THROW(Database::EncodeRecord(Bytes(13, 1), 16), std::length_error);
  EXPECT_THROW(Database::EncodeRecord(Bytes{}, 16), std::invalid_argument);
  Bytes bad(16, 0);
  bad[3] = 200;  // length beyond the record
  EXPECT_THROW(Database::DecodeRecord(bad), DecodeError);
  Bytes padded = testing::PadRecord({'x'}, 16);
  padded[15] = 1;
  EXPECT_THROW(Database::DecodeRecord(padded), DecodeError);
}

TEST(DatabaseTest, RecordsAndWords) {
  Database db(3, 5);
  EXPECT_TRUE(db.IsVacant(2));
  const Bytes rec = {0x12, 0x34, 0x56, 0x78, 0x9a};
  db.SetRecord(2, rec);
  EXPECT_FALSE(db.IsVacant(2));
  EXPECT_EQ(Bytes(db.Record(2).begin(), db.Record(2).end()), rec);
  EXPECT_EQ(db.words_per_record(), 3u);
  EXPECT_EQ(db.Word(2, 0), 0x1234u);
  EXPECT_EQ(db.Word(2, 2), 0x9a00u);
  db.Clear(2);
  EXPECT_TRUE(db.IsVacant(2));
  EXPECT_THROW(db.Record(0), std::out_of_range);
  EXPECT_THROW(db.Record(4), std::out_of_range);
}

TEST(DatabaseTest, ContentDigestTracksContent) {
  Database a(4, 8), b(4, 8);
  EXPECT_EQ(a.ContentDigest(), b.ContentDigest());
  a.SetRecord(1, Bytes(8, 1));
  EXPECT_NE(a.ContentDigest(), b.ContentDigest());
}

}  // namespace
}  // namespace pirdsn::pir
