#include "pirdsn/sim.h"

#include <algorithm>
#include <chrono>
#include <ostream>

#include "pirdsn/ledger.h"
#include "pirdsn/node.h"
#include "pirdsn/smr.h"

namespace pirdsn::sim {
namespace {

using attacks::Strategy;
using client::Mode;
using client::Operation;
using client::RetrievalOutcome;

bool ConsensusHonest(Strategy s) {
  return s == Strategy::kHonest || s == Strategy::kCorruptPirAnswer;
}

bool StartsWith(const std::string& s, const std::string& prefix) {
  return s.compare(0, prefix.size(), prefix) == 0;
}

std::string Describe(const OpRecord& r, std::size_t i) {
  std::string s = "op " + std::to_string(i) + " " +
                  std::string(client::OperationName(r.report.op)) + "/" +
                  std::string(client::ModeName(r.report.mode)) + " " +
                  ShortHex(r.report.fid.digest) + ": " + r.report.outcome;
  for (const auto& why : r.report.rejections) s += " [" + why + "]";
  return s;
}

class Runner {
 public:
  Runner(const scenario::Scenario& sc, const RunOptions& options)
      : sc_(sc),
        seed_(options.seed.value_or(sc.seed)),
        net_({seed_, sc.min_delay, sc.max_delay, sc.byzantine_drop_rate}),
        ledger_(std::make_shared<ledger::Ledger>()) {
    net_.set_keep_trace(options.keep_trace);
    result_.scenario = sc.name;
    result_.seed = seed_;
    result_.record_len = sc.record_len;
  }

  SimResult Run() {
    Build();
    for (std::size_t i = 0; i < sc_.workload.size(); ++i) {
      if (!RunOp(i)) break;
    }
    // Let in-flight replication settle before comparing replicas.
    net_.RunUntil([] { return false; }, net_.now() + 50 * timeout_);
    Check();
    result_.trace_digest = net_.trace_digest();
    result_.counters = net_.counters();
    result_.final_tick = net_.now();
    result_.trace = net_.trace();
    return std::move(result_);
  }

 private:
  void Build() {
    timeout_ = 8 * sc_.max_delay + 8;
    if (sc_.mpir && sc_.mpir->timeout) timeout_ = sc_.mpir->timeout;
    pir::LweParams lwe;
    lwe.dimension = sc_.lwe_dimension;

    std::map<std::string, netsim::ActorId> names;
    for (std::size_t i = 0; i < sc_.spir.size(); ++i) {
      const auto& spec = sc_.spir[i];
      node::MinerConfig cfg{spec.id, spec.strategy, sc_.record_len, lwe,
                            seed_ * 7919 + i + 1};
      auto miner = std::make_unique<node::SpirMiner>(cfg, ledger_);
      names[spec.id] = net_.Register(*miner, spec.id);
      if (spec.strategy != Strategy::kHonest) net_.MarkByzantine(miner->id());
      strategy_of_[spec.id] = spec.strategy;
      spir_.push_back(std::move(miner));
    }

    std::vector<netsim::ActorId> subnet;
    if (sc_.mpir) {
      const auto& sub = *sc_.mpir;
      const auto base = static_cast<netsim::ActorId>(net_.actors());
      for (std::uint32_t i = 0; i < sub.n; ++i) subnet.push_back(base + i);
      ByteWriter w;
      w.U64(seed_);
      auto auth = std::make_shared<smr::Authenticator>(
          Sha256Uncounted(w.bytes()), sub.n);
      for (std::uint32_t i = 0; i < sub.n; ++i) {
        smr::ReplicaConfig cfg;
        cfg.index = i;
        cfg.n = sub.n;
        cfg.f = sub.f;
        cfg.peers = subnet;
        cfg.timeout = timeout_;
        cfg.new_view_wait = sc_.max_delay + 1;
        cfg.max_batch = sub.max_batch;
        cfg.strategy = sub.strategies[i];
        cfg.seed = seed_;
        cfg.record_len = sc_.record_len;
        auto rep = std::make_unique<node::MpirMiner>(cfg, auth, ledger_);
        const auto id = net_.Register(*rep, "r" + std::to_string(i));
        if (id != subnet[i]) throw std::logic_error("replica id mismatch");
        if (cfg.strategy != Strategy::kHonest) net_.MarkByzantine(id);
        replicas_.push_back(std::move(rep));
      }
    }

    client::ClientConfig cc;
    cc.record_len = sc_.record_len;
    cc.single.lwe = lwe;
    if (sc_.plain_backend) {
      cc.single.backend = pir::Backend::kPlain;
      cc.single.allow_plain_backend = true;
    }
    cc.subnet = subnet;
    if (sc_.mpir) cc.threshold = sc_.mpir->threshold;
    const std::uint64_t f = sc_.mpir ? sc_.mpir->f : 1;
    cc.op_timeout = std::max<netsim::Tick>(4 * sc_.max_delay + 4,
                                           (3 * (f + 1) + 2) * timeout_);
    cc.pir_timeout = 2 * timeout_ + 4 * sc_.max_delay + 4;
    cc.seed = seed_ * 104729 + 17;
    client_ = std::make_unique<client::Client>(cc, ledger_, names);
    net_.Register(*client_, "client");
  }

  bool IsHonestMiner(const std::string& name) const {
    auto it = strategy_of_.find(name);
    return it != strategy_of_.end() && it->second == Strategy::kHonest;
  }

  std::set<std::uint32_t> CorruptReplicaIds() const {
    std::set<std::uint32_t> ids;
    for (const auto& r : replicas_) {
      if (r->config().strategy == Strategy::kCorruptPirAnswer) {
        ids.insert(r->config().index + 1);
      }
    }
    return ids;
  }

  std::uint64_t HonestView(bool max) const {
    std::optional<std::uint64_t> v;
    for (const auto& r : replicas_) {
      if (!ConsensusHonest(r->config().strategy)) continue;
      v = !v ? r->view() : (max ? std::max(*v, r->view()) : std::min(*v, r->view()));
    }
    return v.value_or(0);
  }

  const node::MpirMiner* Freshest() const {
    const node::MpirMiner* best = nullptr;
    for (const auto& r : replicas_) {
      if (!ConsensusHonest(r->config().strategy)) continue;
      if (!best || r->committed_height() > best->committed_height()) best = r.get();
    }
    return best;
  }

  bool RunOp(std::size_t i) {
    const scenario::Op& op = sc_.workload[i];
    const Bytes& content = sc_.files.at(op.file);
    const aca::Fid fid = aca::Fid::OfContent(content);
    const std::uint64_t view_before = HonestView(false);
    ScopedHashCount hashes;
    const auto wall_start = std::chrono::steady_clock::now();

    const auto one_target = [&]() -> std::optional<std::string> {
      if (op.targets.empty()) return std::nullopt;
      return op.targets.front();
    };
    if (op.mode == Mode::kSpir) {
      switch (op.op) {
        case Operation::kUpload: client_->StartUploadSpir(content, op.targets); break;
        case Operation::kDelete: client_->StartDeleteSpir(fid, one_target()); break;
        case Operation::kRetrieve: client_->StartRetrieveSpir(fid, one_target()); break;
      }
    } else {
      switch (op.op) {
        case Operation::kUpload: client_->StartUploadMpir(content); break;
        case Operation::kDelete: client_->StartDeleteMpir(fid); break;
        case Operation::kRetrieve: client_->StartRetrieveMpir(fid); break;
      }
    }
    const bool finished = net_.RunUntil([&] { return !client_->busy(); },
                                        net_.now() + 200 * timeout_);
    if (!finished) {
      result_.violations.push_back("op " + std::to_string(i) + " never finished");
      return false;
    }

    OpRecord rec;
    rec.report = *client_->last();
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - wall_start)
                      .count();
    rec.hash_count = hashes.Elapsed();
    rec.target = rec.report.miner;
    if (op.mode == Mode::kMpir) {
      rec.views_elapsed = HonestView(true) - view_before;
      if (auto* r = Freshest()) rec.live_files = r->state().accumulator().size();
    } else {
      for (const auto& m : spir_) {
        if (m->config().id == rec.target) rec.live_files = m->state().accumulator().size();
      }
    }
    Judge(op, rec);
    if (!rec.as_expected) result_.violations.push_back(Describe(rec, i));
    result_.ops.push_back(std::move(rec));
    return true;
  }

  void Judge(const scenario::Op& op, OpRecord& rec) const {
    const client::Report& r = rec.report;
    bool satisfiable = true;
    if (op.mode == Mode::kSpir) {
      if (op.op == Operation::kUpload ||
          (op.op == Operation::kDelete && !op.targets.empty())) {
        satisfiable = std::any_of(op.targets.begin(), op.targets.end(),
                                  [&](const auto& t) { return IsHonestMiner(t); });
      } else if (!r.miner.empty()) {
        satisfiable = IsHonestMiner(r.miner);
      }
      for (const auto& why : r.rejections) {
        for (const auto& [name, s] : strategy_of_) {
          if (s != Strategy::kHonest && StartsWith(why, name + ":")) {
            rec.attack_detected = true;
          }
        }
      }
    } else if (op.op == Operation::kRetrieve) {
      const auto corrupt = CorruptReplicaIds();
      rec.attack_detected = !corrupt.empty() && r.faulty == corrupt;
    }

    switch (op.expect) {
      case scenario::Expect::kAuto:
        rec.expected_success = satisfiable;
        break;
      case scenario::Expect::kSuccess:
        rec.expected_success = true;
        break;
      case scenario::Expect::kAbsent:
      case scenario::Expect::kDetected:
        rec.expected_success = false;
        break;
    }

    if (op.expect == scenario::Expect::kAbsent) {
      rec.as_expected = r.retrieval ? *r.retrieval == RetrievalOutcome::kAbsent
                                    : r.outcome == "absent";
    } else if (rec.expected_success) {
      rec.as_expected = r.success;
      if (op.mode == Mode::kMpir && op.op == Operation::kRetrieve) {
        rec.as_expected = r.success && r.faulty == CorruptReplicaIds() &&
                          r.pir_rounds == 1;
      } else if (op.op == Operation::kRetrieve) {
        rec.as_expected = r.success && r.pir_rounds == 1;
      }
    } else {
      rec.as_expected = !r.success && rec.attack_detected;
    }
  }

  void Check() {
    auto violation = [&](std::string s) { result_.violations.push_back(std::move(s)); };
    const std::uint64_t liveness_bound =
        sc_.mpir ? 3 * (sc_.mpir->f + 1) : 0;

    // Attack accounting.
    for (const auto& m : spir_) {
      const auto s = m->config().strategy;
      if (s == Strategy::kHonest) continue;
      auto& tally = result_.attacks[std::string(attacks::StrategyName(s))];
      tally.attempted += m->stats().forged;
      tally.detected += m->stats().forged_rejected;
      if (s == Strategy::kCorruptPirAnswer) {
        tally.attempted += m->stats().corrupted_answers;
        for (const auto& rec : result_.ops) {
          if (rec.report.op == Operation::kRetrieve &&
              rec.report.mode == Mode::kSpir && rec.report.miner == m->config().id &&
              rec.report.retrieval == RetrievalOutcome::kIntegrityFailure) {
            ++tally.detected;
          }
        }
      }
    }

    std::set<Digest> honest_committed;
    std::map<std::uint64_t, std::pair<Digest, Digest>> reference;
    for (const auto& r : replicas_) {
      if (!ConsensusHonest(r->config().strategy)) continue;
      for (const auto& c : r->commits()) {
        honest_committed.insert(c.block);
        auto [it, fresh] = reference.emplace(c.height, std::make_pair(c.block, c.state));
        if (!fresh && (it->second.first != c.block || it->second.second != c.state)) {
          violation("replica r" + std::to_string(r->config().index) +
                    " diverges at height " + std::to_string(c.height));
        }
      }
      result_.view_changes = std::max(result_.view_changes, r->stats().view_changes);
      if (r->stats().ledger_rejections) {
        violation("ledger refused a committed proof from r" +
                  std::to_string(r->config().index));
      }
    }
    const std::uint64_t final_view = HonestView(true);
    for (const auto& r : replicas_) {
      const auto s = r->config().strategy;
      if (s == Strategy::kHonest) continue;
      auto& tally = result_.attacks[std::string(attacks::StrategyName(s))];
      switch (s) {
        case Strategy::kCorruptPirAnswer: {
          tally.attempted += r->miner_stats().corrupted_answers;
          for (const auto& rec : result_.ops) {
            if (rec.report.mode == Mode::kMpir &&
                rec.report.op == Operation::kRetrieve &&
                rec.report.faulty.contains(r->config().index + 1)) {
              ++tally.detected;
            }
          }
          break;
        }
        case Strategy::kSilentLeader:
          // Each view the silent replica led before the last must have been
          // abandoned by a view change.
          for (std::uint64_t v = 0; v < final_view; ++v) {
            if (r->IsLeader(v)) {
              ++tally.attempted;
              ++tally.detected;
            }
          }
          if (r->IsLeader(final_view) && Freshest() && Freshest()->pending() > 0) {
            ++tally.attempted;
          }
          break;
        case Strategy::kEquivocate:
          tally.attempted += r->stats().equivocations;
          if (result_.violations.empty()) tally.detected += r->stats().equivocations;
          break;
        default:
          for (const Digest& d : r->stats().forged_blocks) {
            ++tally.attempted;
            if (!honest_committed.contains(d)) ++tally.detected;
          }
          break;
      }
    }
    for (const auto& [name, t] : result_.attacks) {
      if (t.detected < t.attempted) {
        violation("attack " + name + ": " + std::to_string(t.attempted - t.detected) +
                  " of " + std::to_string(t.attempted) + " undetected");
      }
    }

    // Liveness bound for subnet writes.
    for (std::size_t i = 0; i < result_.ops.size(); ++i) {
      const auto& rec = result_.ops[i];
      result_.max_views_per_request =
          std::max(result_.max_views_per_request, rec.views_elapsed);
      if (rec.report.mode == Mode::kMpir && rec.report.op != Operation::kRetrieve &&
          rec.views_elapsed > liveness_bound) {
        violation("op " + std::to_string(i) + " took " +
                  std::to_string(rec.views_elapsed) + " views");
      }
    }

    // Honest replicas converge once the network settles.
    std::optional<std::uint64_t> height;
    for (const auto& r : replicas_) {
      if (!ConsensusHonest(r->config().strategy)) continue;
      if (height && *height != r->committed_height()) {
        violation("honest replicas stopped at different heights");
      }
      height = r->committed_height();
    }

    // Stores agree with their own bookkeeping and with the ledger.
    std::map<std::string, aca::Accumulator> replayed;
    try {
      replayed = ledger_->Replay();
    } catch (const std::exception& e) {
      violation(std::string("ledger replay failed: ") + e.what());
    }
    auto check_store = [&](const std::string& name, const store::MinerState& st,
                           const std::string& chain) {
      try {
        st.CheckCoherence();
      } catch (const std::exception& e) {
        violation(name + " incoherent: " + e.what());
      }
      auto it = replayed.find(chain);
      const bool empty = st.accumulator().size() == 0 && st.applied() == 0;
      if ((it == replayed.end() && !empty) ||
          (it != replayed.end() && !(it->second == st.accumulator()))) {
        violation(name + " disagrees with the ledger");
      }
      result_.state_digests[name] = st.StateDigest();
    };
    for (const auto& m : spir_) check_store(m->config().id, m->state(), m->config().id);
    for (const auto& r : replicas_) {
      const std::string name = "r" + std::to_string(r->config().index);
      if (!ConsensusHonest(r->config().strategy)) {
        result_.state_digests[name] = r->state().StateDigest();
        continue;
      }
      check_store(name, r->state(), r->config().chain_id);
    }
    if (!net_.counters().Conserved()) violation("message conservation broken");
  }

  const scenario::Scenario& sc_;
  std::uint64_t seed_;
  netsim::Network net_;
  std::shared_ptr<ledger::Ledger> ledger_;
  netsim::Tick timeout_ = 0;
  std::vector<std::unique_ptr<node::SpirMiner>> spir_;
  std::vector<std::unique_ptr<node::MpirMiner>> replicas_;
  std::unique_ptr<client::Client> client_;
  std::map<std::string, Strategy> strategy_of_;
  SimResult result_;
};

std::string FaultyList(const std::set<std::uint32_t>& ids) {
  std::string s;
  for (auto id : ids) s += (s.empty() ? "" : ";") + std::to_string(id);
  return s;
}

}  // namespace

SimResult Run(const scenario::Scenario& sc, const RunOptions& options) {
  return Runner(sc, options).Run();
}

void WriteCsv(std::ostream& out, const SimResult& result) {
  out << "operation,mode,n,record_len,latency_ticks,wall_ms,hash_count,outcome,"
         "miner,expected,detected,pir_rounds,records_touched,faulty\n";
  for (const auto& rec : result.ops) {
    const auto& r = rec.report;
    std::uint64_t touched = 0;
    for (auto t : r.records_touched) touched = std::max(touched, t);
    out << client::OperationName(r.op) << ',' << client::ModeName(r.mode) << ','
        << rec.live_files << ',' << result.record_len << ',' << r.latency() << ','
        << rec.wall_ms << ',' << rec.hash_count << ',' << r.outcome << ','
        << r.miner << ',' << (rec.expected_success ? "success" : "failure") << ','
        << (rec.attack_detected ? 1 : 0) << ',' << r.pir_rounds << ',' << touched
        << ',' << FaultyList(r.faulty) << '\n';
  }
}

void WriteSummary(std::ostream& out, const SimResult& result) {
  std::size_t satisfied = 0;
  for (const auto& rec : result.ops) satisfied += rec.as_expected;
  out << "scenario " << result.scenario << " seed " << result.seed << '\n';
  out << "operations " << satisfied << "/" << result.ops.size()
      << " as expected\n";
  for (const auto& [name, t] : result.attacks) {
    out << "attack " << name << " detected " << t.detected << "/" << t.attempted
        << '\n';
  }
  out << "view changes " << result.view_changes << ", max views per request "
      << result.max_views_per_request << '\n';
  out << "messages sent " << result.counters.sent << " delivered "
      << result.counters.delivered << " dropped " << result.counters.dropped
      << " in flight " << result.counters.in_flight << '\n';
  for (const auto& [name, d] : result.state_digests) {
    out << "state " << name << " " << ToHex(d) << '\n';
  }
  out << "trace " << ToHex(result.trace_digest) << '\n';
  for (const auto& v : result.violations) out << "VIOLATION " << v << '\n';
  out << (result.ok() ? "OK" : "FAILED") << '\n';
}

}  // namespace pirdsn::sim
