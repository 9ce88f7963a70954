#include "pirdsn/netsim.h"

#include <stdexcept>

namespace pirdsn::netsim {

Network::Network(NetConfig config) : config_(config), rng_(config.seed) {
  if (config_.min_delay > config_.max_delay) {
    throw std::invalid_argument("min_delay exceeds max_delay");
  }
}

ActorId Network::Register(Actor& actor, std::string name) {
  const auto id = static_cast<ActorId>(actors_.size());
  actor.id_ = id;
  actor.net_ = this;
  actors_.push_back(&actor);
  names_.push_back(std::move(name));
  byzantine_.push_back(false);
  return id;
}

void Network::Send(ActorId from, ActorId to, MessagePtr msg) {
  if (to >= actors_.size()) throw std::out_of_range("unknown actor");
  ++counters_.sent;
  const Tick delay = rng_.Range(config_.min_delay, config_.max_delay);
  if ((byzantine_[from] || byzantine_[to]) && config_.byzantine_drop_rate > 0 &&
      rng_.Bernoulli(config_.byzantine_drop_rate)) {
    ++counters_.dropped;
    Record(std::to_string(now_) + " drop " + names_[from] + "->" + names_[to] +
           " " + std::string(msg->Kind()));
    return;
  }
  queue_.push(Event{now_ + delay, seq_++, from, to, std::move(msg), 0});
  ++counters_.in_flight;
}

void Network::Broadcast(ActorId from, const std::vector<ActorId>& to,
                        const MessagePtr& msg) {
  for (ActorId dst : to) Send(from, dst, msg);
}

void Network::SetTimer(ActorId actor, Tick after, std::uint64_t token) {
  queue_.push(Event{now_ + after, seq_++, actor, actor, nullptr, token});
}

bool Network::Step() {
  if (queue_.empty()) return false;
  Event ev = queue_.top();
  queue_.pop();
  now_ = ev.tick;
  if (!ev.msg) {
    ++counters_.timers_fired;
    Record(std::to_string(now_) + " timer " + names_[ev.to] + " " +
           std::to_string(ev.token));
    actors_[ev.to]->OnTimer(ev.token);
    return true;
  }
  ++counters_.delivered;
  --counters_.in_flight;
  const Digest body = Sha256Uncounted(ev.msg->Encode());
  Record(std::to_string(now_) + " " + names_[ev.from] + "->" + names_[ev.to] +
         " " + std::string(ev.msg->Kind()) + " " + ShortHex(body));
  actors_[ev.to]->OnMessage(ev.from, ev.msg);
  return true;
}

bool Network::RunUntil(const std::function<bool()>& done, Tick deadline) {
  while (!done()) {
    if (queue_.empty() || queue_.top().tick > deadline) return false;
    Step();
  }
  return true;
}

void Network::Note(ActorId actor, std::string_view text) {
  Record(std::to_string(now_) + " note " + names_.at(actor) + " " +
         std::string(text));
}

void Network::Record(const std::string& line) {
  trace_digest_ = HashTaggedUncounted(HashDomain::kStateDigest,
                                      {trace_digest_, AsBytes(line)});
  if (keep_trace_) trace_.push_back(line);
}

}  // namespace pirdsn::netsim
