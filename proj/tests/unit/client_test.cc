#include "pirdsn/client.h"

#include <gtest/gtest.h>

#include "pirdsn/ledger.h"
#include "pirdsn/netsim.h"
#include "pirdsn/node.h"

namespace pirdsn::client {
namespace {

using attacks::Strategy;

class SpirWorld : public ::testing::Test {
 protected:
  void Build(std::vector<std::pair<std::string, Strategy>> miners) {
    for (auto& [id, s] : miners) {
      node::MinerConfig cfg;
      cfg.id = id;
      cfg.strategy = s;
      cfg.record_len = 48;
      cfg.lwe.dimension = 256;
      cfg.seed = miners_.size() + 1;
      miners_.push_back(std::make_unique<node::SpirMiner>(cfg, ledger_));
      names_[id] = net_.Register(*miners_.back(), id);
    }
    ClientConfig cc;
    cc.record_len = 48;
    cc.single.lwe.dimension = 256;
    client_ = std::make_unique<Client>(cc, ledger_, names_);
    net_.Register(*client_, "client");
  }

  const Report& Finish() {
    EXPECT_TRUE(net_.RunUntil([&] { return !client_->busy(); }, net_.now() + 5000));
    return *client_->last();
  }

  static Bytes File(int i) { return Bytes(10 + i, static_cast<std::uint8_t>(i)); }

  netsim::Network net_{{1, 1, 3, 0}};
  std::shared_ptr<ledger::Ledger> ledger_ = std::make_shared<ledger::Ledger>();
  std::vector<std::unique_ptr<node::SpirMiner>> miners_;
  std::map<std::string, netsim::ActorId> names_;
  std::unique_ptr<Client> client_;
};

TEST_F(SpirWorld, UploadRetrieveDelete) {
  Build({{"m0", Strategy::kHonest}});
  for (int i = 1; i <= 6; ++i) {
    client_->StartUploadSpir(File(i), {"m0"});
    const Report& r = Finish();
    ASSERT_TRUE(r.success) << r.outcome;
    EXPECT_EQ(r.index, static_cast<std::uint64_t>(i));
  }
  const aca::Fid six = aca::Fid::OfContent(File(6));
  client_->StartRetrieveSpir(six, std::nullopt);
  const Report& got = Finish();
  EXPECT_EQ(got.retrieval, RetrievalOutcome::kRecovered);
  EXPECT_EQ(got.content, File(6));
  EXPECT_EQ(got.pir_rounds, 1u);
  EXPECT_EQ(got.records_touched, std::vector<std::uint64_t>{7});

  client_->StartDeleteSpir(six, std::nullopt);
  EXPECT_TRUE(Finish().success);
  client_->StartRetrieveSpir(six, std::nullopt);
  EXPECT_EQ(Finish().retrieval, RetrievalOutcome::kAbsent);
}

TEST_F(SpirWorld, FallsBackPastForgingMiner) {
  Build({{"bad", Strategy::kWrongVacantIndex}, {"good", Strategy::kHonest}});
  client_->StartUploadSpir(File(1), {"bad", "good"});
  const Report& r = Finish();
  ASSERT_TRUE(r.success);
  EXPECT_EQ(r.miner, "good");
  ASSERT_EQ(r.rejections.size(), 1u);
  EXPECT_EQ(r.rejections[0].rfind("bad:", 0), 0u);
}

TEST_F(SpirWorld, CorruptAnswerIsAnIntegrityFailure) {
  Build({{"liar", Strategy::kCorruptPirAnswer}});
  client_->StartUploadSpir(File(2), {"liar"});
  ASSERT_TRUE(Finish().success);
  client_->StartRetrieveSpir(aca::Fid::OfContent(File(2)), std::nullopt);
  const Report& r = Finish();
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.retrieval, RetrievalOutcome::kIntegrityFailure);
}

TEST(NamesTest, OutcomeNames) {
  EXPECT_EQ(RetrievalOutcomeName(RetrievalOutcome::kRobustRecovered), "RobustRecovered");
  EXPECT_EQ(ModeName(Mode::kMpir), "mpir");
  EXPECT_EQ(OperationName(Operation::kDelete), "delete");
}

}  // namespace
}  // namespace pirdsn::client
