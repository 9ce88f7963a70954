#ifndef PIRDSN_NETSIM_H_
#define PIRDSN_NETSIM_H_

// Deterministic discrete-event transport. Events are delivered in
// (tick, insertion order); delays and policy drops come from one seeded
// generator, so a run is a pure function of its inputs and seed.

#include <cstdint>
#include <functional>
#include <memory>
#include <queue>
#include <string>
#include <string_view>
#include <vector>

#include "pirdsn/bytes.h"
#include "pirdsn/hash.h"
#include "pirdsn/rng.h"

namespace pirdsn::netsim {

using ActorId = std::uint32_t;
using Tick = std::uint64_t;

class Message {
 public:
  virtual ~Message() = default;
  virtual std::string_view Kind() const = 0;
  // Canonical bytes; only their digest reaches the trace.
  virtual Bytes Encode() const = 0;
};

using MessagePtr = std::shared_ptr<const Message>;

class Network;

class Actor {
 public:
  virtual ~Actor() = default;
  virtual void OnMessage(ActorId from, const MessagePtr& msg) = 0;
  virtual void OnTimer(std::uint64_t token) { (void)token; }

  ActorId id() const { return id_; }

 protected:
  Network& net() const { return *net_; }

 private:
  friend class Network;
  ActorId id_ = 0;
  Network* net_ = nullptr;
};

struct NetConfig {
  std::uint64_t seed = 1;
  Tick min_delay = 1;
  Tick max_delay = 1;
  // Applies to messages sent from or to an actor marked Byzantine.
  double byzantine_drop_rate = 0.0;
};

struct Counters {
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t timers_fired = 0;
  std::uint64_t in_flight = 0;  // queued messages, counted independently
  // Every sent message is delivered, dropped by policy, or still queued.
  bool Conserved() const { return sent == delivered + dropped + in_flight; }
};

class Network {
 public:
  explicit Network(NetConfig config);

  // The network does not own actors; they must outlive it or be removed
  // from use before destruction.
  ActorId Register(Actor& actor, std::string name);
  void MarkByzantine(ActorId id) { byzantine_.at(id) = true; }
  std::string_view NameOf(ActorId id) const { return names_.at(id); }
  std::size_t actors() const { return actors_.size(); }

  void Send(ActorId from, ActorId to, MessagePtr msg);
  void Broadcast(ActorId from, const std::vector<ActorId>& to,
                 const MessagePtr& msg);
  void SetTimer(ActorId actor, Tick after, std::uint64_t token);

  Tick now() const { return now_; }
  bool idle() const { return queue_.empty(); }

  // Delivers the next event; false when nothing is queued.
  bool Step();
  // Runs until `done` holds, the queue drains, or the clock passes
  // `deadline`. Returns whether `done` held.
  bool RunUntil(const std::function<bool()>& done, Tick deadline);

  // Free-form trace annotation (view changes, rejections, outcomes).
  void Note(ActorId actor, std::string_view text);

  const Counters& counters() const { return counters_; }
  // Running digest over every trace line.
  const Digest& trace_digest() const { return trace_digest_; }
  void set_keep_trace(bool keep) { keep_trace_ = keep; }
  const std::vector<std::string>& trace() const { return trace_; }

 private:
  struct Event {
    Tick tick = 0;
    std::uint64_t seq = 0;
    ActorId from = 0;
    ActorId to = 0;
    MessagePtr msg;  // null for timers
    std::uint64_t token = 0;
    bool operator>(const Event& o) const {
      return tick != o.tick ? tick > o.tick : seq > o.seq;
    }
  };

  void Record(const std::string& line);

  NetConfig config_;
  Rng rng_;
  Tick now_ = 0;
  std::uint64_t seq_ = 0;
  std::vector<Actor*> actors_;
  std::vector<std::string> names_;
  std::vector<bool> byzantine_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  Counters counters_;
  Digest trace_digest_{};
  bool keep_trace_ = false;
  std::vector<std::string> trace_;
};

}  // namespace pirdsn::netsim

#endif  // PIRDSN_NETSIM_H_
