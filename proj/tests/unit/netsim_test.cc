#include "pirdsn/netsim.h"

#include <gtest/gtest.h>

namespace pirdsn::netsim {
namespace {

struct Ping final : Message {
  explicit Ping(int n) : n(n) {}
  int n;
  std::string_view Kind() const override { return "ping"; }
  Bytes Encode() const override { return {static_cast<std::uint8_t>(n)}; }
};

// Bounces a counter back and forth until it reaches a limit.
class Bouncer : public Actor {
 public:
  void OnMessage(ActorId from, const MessagePtr& msg) override {
    const int n = static_cast<const Ping&>(*msg).n;
    log.emplace_back(net().now(), n);
    if (n < 20) net().Send(id(), from, std::make_shared<Ping>(n + 1));
  }
  void OnTimer(std::uint64_t token) override { timers.push_back(token); }
  std::vector<std::pair<Tick, int>> log;
  std::vector<std::uint64_t> timers;
};

struct BounceRun {
  Digest digest;
  Counters counters;
  std::vector<std::pair<Tick, int>> log;
};

BounceRun Bounce(NetConfig cfg, bool byzantine) {
  Network net(cfg);
  Bouncer a, b;
  net.Register(a, "a");
  net.Register(b, "b");
  if (byzantine) net.MarkByzantine(b.id());
  net.Send(a.id(), b.id(), std::make_shared<Ping>(0));
  net.SetTimer(a.id(), 5, 42);
  net.RunUntil([] { return false; }, 10000);
  return {net.trace_digest(), net.counters(), b.log};
}

TEST(NetworkTest, DeterministicPerSeed) {
  const BounceRun x = Bounce({7, 1, 9, 0}, false);
  const BounceRun y = Bounce({7, 1, 9, 0}, false);
  const BounceRun z = Bounce({8, 1, 9, 0}, false);
  EXPECT_EQ(x.digest, y.digest);
  EXPECT_EQ(x.log, y.log);
  EXPECT_NE(x.digest, z.digest);
}

TEST(NetworkTest, DelaysWithinBounds) {
  const BounceRun r = Bounce({3, 2, 5, 0}, false);
  ASSERT_EQ(r.log.size(), 11u);  // b sees the even counters 0..20
  Tick prev = 0;
  for (const auto& [tick, n] : r.log) {
    // Two hops between consecutive arrivals at b (one for the first).
    const Tick gap = tick - prev;
    EXPECT_GE(gap, n == 0 ? 2u : 4u);
    EXPECT_LE(gap, n == 0 ? 5u : 10u);
    prev = tick;
  }
}

TEST(NetworkTest, ConservationWithDrops) {
  const BounceRun r = Bounce({5, 1, 3, 0.5}, true);
  EXPECT_TRUE(r.counters.Conserved());
  EXPECT_GT(r.counters.dropped, 0u);
  EXPECT_EQ(r.counters.in_flight, 0u);
  const BounceRun honest = Bounce({5, 1, 3, 0.5}, false);
  EXPECT_EQ(honest.counters.dropped, 0u);
  EXPECT_EQ(honest.counters.sent, 21u);
}

TEST(NetworkTest, TimersFireInOrder) {
  Network net({1, 1, 1, 0});
  Bouncer a;
  net.Register(a, "a");
  net.SetTimer(a.id(), 10, 2);
  net.SetTimer(a.id(), 3, 1);
  net.SetTimer(a.id(), 10, 3);
  while (net.Step()) {
  }
  EXPECT_EQ(a.timers, (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_EQ(net.now(), 10u);
  EXPECT_EQ(net.counters().timers_fired, 3u);
}

TEST(NetworkTest, RunUntilStopsAtPredicate) {
  Network net({1, 1, 1, 0});
  Bouncer a, b;
  net.Register(a, "a");
  net.Register(b, "b");
  net.set_keep_trace(true);
  net.Send(a.id(), b.id(), std::make_shared<Ping>(0));
  EXPECT_TRUE(net.RunUntil([&] { return a.log.size() >= 3; }, 1000));
  EXPECT_EQ(a.log.size(), 3u);
  EXPECT_FALSE(net.idle());
  EXPECT_FALSE(net.trace().empty());
}

}  // namespace
}  // namespace pirdsn::netsim
