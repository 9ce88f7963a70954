// Acceptance suite. Prints one PASS or FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "commands.h"
#include "oracles.h"
#include "pirdsn/aca.h"
#include "pirdsn/attacks.h"
#include "pirdsn/database.h"
#include "pirdsn/galois.h"
#include "pirdsn/ledger.h"
#include "pirdsn/node.h"
#include "pirdsn/pir_multi.h"
#include "pirdsn/pir_single.h"
#include "pirdsn/proofs.h"
#include "pirdsn/rng.h"
#include "pirdsn/scenario.h"
#include "pirdsn/sim.h"
#include "subnet_harness.h"

namespace pirdsn {
namespace {

using attacks::Strategy;
using testing::FlatAca;
using testing::LabelFid;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since)
      .count();
}

std::string Fmt(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

// --- 1 ----------------------------------------------------------------------

Verdict AcaOracleEquivalence() {
  const auto start = std::chrono::steady_clock::now();
  std::uint64_t mismatches = 0, checks = 0, max_live = 0;
  constexpr int kSeeds = 20;
  constexpr int kOps = 10000;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    Rng rng(static_cast<std::uint64_t>(seed));
    aca::Accumulator acc = aca::Accumulator::Gen();
    FlatAca oracle;
    std::vector<int> live;
    int next = 0;
    auto compare_all = [&] {
      for (int label : live) {
        ++checks;
        if (acc.IndexOf(LabelFid(label)) != *oracle.Index(label)) ++mismatches;
      }
      if (acc.capacity() != oracle.capacity()) ++mismatches;
    };
    for (int op = 0; op < kOps; ++op) {
      const bool insert =
          live.empty() || (live.size() < 4096 && rng.Bernoulli(0.6));
      if (insert) {
        const int label = next++;
        const auto got = acc.Insert(LabelFid(label));
        ++checks;
        if (got.index != oracle.Insert(label)) ++mismatches;
        live.push_back(label);
      } else {
        const std::size_t pos = rng.Uniform(live.size());
        acc.Delete(LabelFid(live[pos]));
        oracle.Delete(live[pos]);
        live[pos] = live.back();
        live.pop_back();
      }
      max_live = std::max<std::uint64_t>(max_live, live.size());
      if (op % 500 == 499) compare_all();
    }
    compare_all();
  }

  // Six sequential inserts end with FID6 in tree 1's right leaf.
  aca::Accumulator acc = aca::Accumulator::Gen();
  aca::IndexAssignment sixth;
  for (int i = 1; i <= 6; ++i) sixth = acc.Insert(LabelFid(100 + i));
  const std::uint64_t recomputed =
      aca::ComputeIndex(acc.roots(), sixth.tree_index, sixth.witness);
  const bool worked = sixth.index == 6 && recomputed == 6 &&
                      sixth.tree_index == 1 && sixth.witness.leaf_position == 1;

  const double secs = Seconds(start);
  return {mismatches == 0 && worked && secs < 60,
          Fmt("%d seeds x %d ops, %llu index checks, %llu mismatches, max live "
              "%llu; worked example index %llu; %.1fs",
              kSeeds, kOps, (unsigned long long)checks,
              (unsigned long long)mismatches, (unsigned long long)max_live,
              (unsigned long long)sixth.index, secs)};
}

// --- 2 ----------------------------------------------------------------------

// An honest miner's chain on a ledger, driven by random operations.
struct HonestChain {
  explicit HonestChain(std::string id) : id(std::move(id)) {}

  bool Step(Rng& rng, std::size_t target_live) {
    const bool insert = live.empty() ||
                        (live.size() < target_live && rng.Bernoulli(0.7)) ||
                        rng.Bernoulli(0.3);
    proofs::Proof p;
    if (insert) {
      const int label = next++;
      p = proofs::MakeUploadProof(state, LabelFid(label), ledger.Head(id));
      live.push_back(label);
    } else {
      const std::size_t pos = rng.Uniform(live.size());
      p = proofs::MakeDeletionProof(state, LabelFid(live[pos]), ledger.Head(id));
      live[pos] = live.back();
      live.pop_back();
    }
    return ledger.Append(id, p).accepted();
  }

  std::string id;
  ledger::Ledger ledger;
  aca::Accumulator state = aca::Accumulator::Gen();
  std::vector<int> live;
  int next = 0;
};

Verdict PublicVerifiability() {
  const auto start = std::chrono::steady_clock::now();
  struct Attack {
    const char* label;
    std::function<std::optional<proofs::Proof>(const HonestChain&, Rng&)> forge;
  };
  const std::vector<Attack> matrix = {
      {"1a conflict-index",
       [](const HonestChain& c, Rng& rng) -> std::optional<proofs::Proof> {
         auto p = attacks::ForgeConflictIndex(c.state, LabelFid(-1 - c.next),
                                              c.ledger.Head(c.id), rng);
         if (!p) return std::nullopt;
         return proofs::Proof{*p};
       }},
      {"1b wrong-vacant-index",
       [](const HonestChain& c, Rng& rng) -> std::optional<proofs::Proof> {
         auto p = attacks::ForgeWrongVacantIndex(c.state, LabelFid(-1 - c.next),
                                                 c.ledger.Head(c.id), rng);
         if (!p) return std::nullopt;
         return proofs::Proof{*p};
       }},
      {"2a delete-wrong-fid",
       [](const HonestChain& c, Rng& rng) -> std::optional<proofs::Proof> {
         if (c.live.empty()) return std::nullopt;
         const int victim = c.live[rng.Uniform(c.live.size())];
         auto p = attacks::ForgeDeleteWrongFid(c.state, LabelFid(victim),
                                               c.ledger.Head(c.id), rng);
         if (!p) return std::nullopt;
         return proofs::Proof{*p};
       }},
      {"2b fake-delete",
       [](const HonestChain& c, Rng& rng) -> std::optional<proofs::Proof> {
         if (c.live.empty()) return std::nullopt;
         const int victim = c.live[rng.Uniform(c.live.size())];
         auto p = attacks::ForgeFakeDelete(c.state, LabelFid(victim),
                                           c.ledger.Head(c.id));
         if (!p) return std::nullopt;
         return proofs::Proof{*p};
       }},
      {"3 mutate-index",
       [](const HonestChain& c, Rng& rng) {
         return attacks::ForgeMutateIndex(c.state, c.ledger.Head(c.id), rng);
       }},
  };

  constexpr int kCases = 200;
  bool ok = true;
  std::ostringstream detail;
  for (std::size_t a = 0; a < matrix.size(); ++a) {
    Rng rng(900 + a);
    HonestChain chain("m" + std::to_string(a));
    int injected = 0, accepted = 0, steps = 0;
    while (injected < kCases && steps < 100 * kCases) {
      ++steps;
      if (!chain.Step(rng, 1 + rng.Uniform(200))) ok = false;
      auto forged = matrix[a].forge(chain, rng);
      if (!forged) continue;
      ++injected;
      const auto before = chain.ledger.Height(chain.id);
      if (chain.ledger.Append(chain.id, *forged).accepted()) ++accepted;
      if (chain.ledger.Height(chain.id) != before) ok = false;
    }
    ok = ok && injected >= kCases && accepted == 0;
    detail << matrix[a].label << " " << injected << " injected " << accepted
           << " accepted; ";
  }

  // Honest proofs are never refused, by the ledger or standalone.
  Rng rng(4242);
  HonestChain honest("honest");
  int false_rejects = 0;
  constexpr int kHonest = 10000;
  for (int i = 0; i < kHonest; ++i) {
    if (!honest.Step(rng, 3000)) ++false_rejects;
  }
  for (const auto& e : honest.ledger.Entries()) {
    if (!proofs::VerifyProof(e.payload, honest.ledger.Resolver("honest"))) {
      ++false_rejects;
    }
  }
  const double secs = Seconds(start);
  ok = ok && false_rejects == 0 && secs < 120;
  detail << kHonest << " honest proofs " << false_rejects << " rejected; "
         << Fmt("%.1fs", secs);
  return {ok, detail.str()};
}

// --- 3 ----------------------------------------------------------------------

Verdict LogarithmicVerification() {
  bool ok = true;
  std::ostringstream detail;
  for (int e = 4; e <= 12; ++e) {
    const std::uint64_t n = std::uint64_t{1} << e;
    Rng rng(e);
    aca::Accumulator state = aca::Accumulator::Gen();
    for (std::uint64_t i = 0; i < n; ++i) state.Insert(LabelFid(static_cast<int>(i)));
    const auto live = state.Live();
    const std::uint64_t bound =
        8 * static_cast<std::uint64_t>(std::ceil(std::log2(static_cast<double>(n)))) + 16;
    std::uint64_t worst = 0;
    const Digest head{};
    for (int trial = 0; trial < 100; ++trial) {
      aca::Accumulator scratch = state;
      proofs::VerifyOutcome out;
      std::uint64_t used = 0;
      if (trial % 2 == 0) {
        const auto p = proofs::MakeUploadProof(scratch, LabelFid(-1 - trial), head);
        ScopedHashCount count;
        out = proofs::VerifyUploadTransition(p, state.roots());
        used = count.Elapsed();
      } else {
        const aca::Fid victim = live[rng.Uniform(live.size())].second;
        const auto p = proofs::MakeDeletionProof(scratch, victim, head);
        ScopedHashCount count;
        out = proofs::VerifyDeletionTransition(p, state.roots());
        used = count.Elapsed();
      }
      if (!out) ok = false;
      worst = std::max(worst, used);
    }
    ok = ok && worst <= bound;
    detail << "n=" << n << " max " << worst << "/" << bound << "; ";
  }
  return {ok, detail.str()};
}

// --- 4 ----------------------------------------------------------------------

struct FilledDatabase {
  pir::Database db;
  std::vector<Bytes> files;  // files[i - 1] at index i
};

FilledDatabase RandomDatabase(std::uint64_t size, std::size_t record_len,
                              Rng& rng) {
  FilledDatabase out{pir::Database(size, record_len), {}};
  for (std::uint64_t i = 1; i <= size; ++i) {
    Bytes file(1 + rng.Uniform(record_len - 4));
    rng.Fill(file);
    out.db.SetRecord(i, pir::Database::EncodeRecord(file, record_len));
    out.files.push_back(std::move(file));
  }
  return out;
}

Verdict SpirCorrectness(std::uint64_t& touch_violations) {
  const auto start = std::chrono::steady_clock::now();
  constexpr std::size_t kRecordLen = 1024;
  pir::SingleParams params;
  std::uint64_t sweeps = 0, mismatches = 0;
  Rng rng(4);
  std::shared_ptr<const pir::LwePublic> last_pub;
  FilledDatabase last{pir::Database(1, kRecordLen), {}};
  for (std::uint64_t size : {7u, 63u, 255u}) {
    FilledDatabase fd = RandomDatabase(size, kRecordLen, rng);
    auto pub = std::make_shared<const pir::LwePublic>(
        pir::LweSetup(fd.db, rng.NextDigest(), params.lwe));
    for (std::uint64_t i = 1; i <= size; ++i) {
      auto [st, q] = pir::SQuery(i, size, kRecordLen, params, pub, rng);
      const auto wire_q = pir::DeserializeQuery(pir::SerializeQuery(q));
      const auto answer = pir::SAnswer(fd.db, wire_q);
      if (answer.records_touched != size) ++touch_violations;
      const auto wire_a = pir::DeserializeAnswer(pir::SerializeAnswer(answer));
      ++sweeps;
      try {
        if (pir::SDecrypt(st, wire_a) != testing::PadRecord(fd.files[i - 1], kRecordLen)) {
          ++mismatches;
        }
      } catch (const std::exception&) {
        ++mismatches;
      }
    }
    last_pub = pub;
    last = std::move(fd);
  }

  // Tampered answers against the 255-record database.
  int detected = 0, silent = 0, benign = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint64_t i = 1 + rng.Uniform(last.db.size());
    auto [st, q] = pir::SQuery(i, last.db.size(), kRecordLen, params, last_pub, rng);
    const auto tampered = node::TamperSingleAnswer(pir::SAnswer(last.db, q), rng);
    const aca::Fid expected = aca::Fid::OfContent(last.files[i - 1]);
    try {
      const auto file = pir::Database::DecodeRecord(pir::SDecrypt(st, tampered));
      if (!file || aca::Fid::OfContent(*file) != expected) {
        ++detected;
      } else if (*file == last.files[i - 1]) {
        ++benign;
      } else {
        ++silent;
      }
    } catch (const std::exception&) {
      ++detected;
    }
  }
  const double secs = Seconds(start);
  return {mismatches == 0 && detected >= 99 && silent == 0 && secs < 300,
          Fmt("%llu indexes swept (7, 63, 255 x 1KB, LWE n=%u), %llu mismatches; "
              "tamper detected %d/100, silently accepted %d, harmless %d; %.1fs",
              (unsigned long long)sweeps, params.lwe.dimension,
              (unsigned long long)mismatches, detected, silent, benign, secs)};
}

// --- 5 ----------------------------------------------------------------------

Verdict MpirRobustness(std::uint64_t& touch_violations) {
  constexpr std::uint32_t kServers = 4, kThreshold = 1;
  constexpr std::size_t kRecordLen = 64;
  Rng rng(5);
  int recovered = 0, control_failed = 0;
  std::map<int, int> by_strategy;
  for (int trial = 0; trial < 200; ++trial) {
    const bool control = trial >= 100;
    const std::uint64_t size = 8 + rng.Uniform(57);
    FilledDatabase fd = RandomDatabase(size, kRecordLen, rng);
    const std::uint64_t index = 1 + rng.Uniform(size);
    auto [st, queries] = pir::MQuery(index, size, kRecordLen, kServers, kThreshold, rng);

    std::set<std::uint32_t> corrupt{static_cast<std::uint32_t>(1 + rng.Uniform(kServers))};
    while (control && corrupt.size() < 2) {
      corrupt.insert(static_cast<std::uint32_t>(1 + rng.Uniform(kServers)));
    }
    std::vector<pir::MultiAnswer> answers;
    for (const auto& q : queries) {
      const auto wire = pir::DeserializeMultiQuery(pir::SerializeMultiQuery(q));
      auto a = pir::MAnswer(fd.db, wire);
      if (a.records_touched != size) ++touch_violations;
      if (corrupt.contains(q.server_id)) {
        const auto how = static_cast<node::Corruption>(rng.Uniform(5));
        ++by_strategy[static_cast<int>(how)];
        a = node::CorruptMultiAnswer(fd.db, wire, a, how, rng);
      }
      answers.push_back(pir::DeserializeMultiAnswer(pir::SerializeMultiAnswer(a)));
    }
    const auto result = pir::MReconstruct(st, answers);
    if (!control) {
      if (result.ok && result.faulty == corrupt &&
          result.record == testing::PadRecord(fd.files[index - 1], kRecordLen)) {
        ++recovered;
      }
    } else if (result.ok) {
      ++control_failed;
    }
  }
  std::ostringstream mix;
  for (const auto& [k, v] : by_strategy) mix << (mix.tellp() ? "/" : "") << v;
  return {recovered == 100 && control_failed == 0,
          Fmt("N=4 t=1: %d/100 recovered with exact faulty set; 2 corrupt: "
              "%d/100 unrecoverable; corruption mix %s",
              recovered, 100 - control_failed, mix.str().c_str())};
}

// --- 6 ----------------------------------------------------------------------

Verdict RobustnessInequality() {
  int violations = 0;
  for (int n = 1; n <= 1000; ++n) {
    const long double lhs = (2.0L * n + 1) / 3;
    const long double rhs = std::sqrt(static_cast<long double>(n) * (n - 1) / 3);
    if (!(lhs > rhs)) ++violations;
    // At N = 3f+1, t = f the decoder's radius covers f faulty answers.
    if (n % 3 == 1 && n > 1) {
      const int f = (n - 1) / 3;
      if (galois::MaxCorrectableErrors(n, f) < f) ++violations;
    }
  }
  return {violations == 0,
          Fmt("N in [1, 1000]: %d violations", violations)};
}

// --- 7 and 8 ----------------------------------------------------------------

struct SmrRuns {
  int schedules = 0;
  int divergent = 0;
  int invalid_commits = 0;
  int unfinished = 0;
  int failed_writes = 0;
  int byzantine_leader_runs = 0;
  std::uint64_t view_changes = 0;
  std::uint64_t commits_compared = 0;
  std::uint64_t max_views = 0;  // views used by one write, f+1 budget runs
  int over_budget = 0;
  std::string first_problem;
};

void CheckRun(const testing::SubnetSetup& setup, SmrRuns& runs) {
  const auto out = testing::RunSubnet(setup);
  ++runs.schedules;
  auto note = [&](const std::string& what) {
    if (runs.first_problem.empty()) {
      runs.first_problem = "seed " + std::to_string(setup.seed) + ": " + what;
    }
  };
  if (!out.finished) {
    ++runs.unfinished;
    note("client stalled");
  }
  for (const auto& r : out.reports) {
    if (!r.success) {
      ++runs.failed_writes;
      note("operation failed: " + r.outcome);
    }
  }
  // Honest replicas agree on block and state at every committed height.
  std::map<std::uint64_t, std::pair<Digest, Digest>> by_height;
  std::set<std::uint64_t> heights;
  for (std::size_t i = 0; i < out.commits.size(); ++i) {
    if (!out.consensus_honest[i]) continue;
    for (const auto& c : out.commits[i]) {
      ++runs.commits_compared;
      auto [it, fresh] = by_height.try_emplace(c.height, c.block, c.state);
      if (!fresh && it->second != std::make_pair(c.block, c.state)) {
        ++runs.divergent;
        note("divergence at height " + std::to_string(c.height));
      }
    }
    const std::string bad = testing::CheckCommittedBlocks(out.blocks[i]);
    if (!bad.empty()) {
      ++runs.invalid_commits;
      note("replica " + std::to_string(i) + " " + bad);
    }
  }
  std::optional<Digest> final_state;
  for (std::size_t i = 0; i < out.final_state.size(); ++i) {
    if (!out.consensus_honest[i]) continue;
    if (final_state && *final_state != out.final_state[i]) {
      ++runs.divergent;
      note("final states differ");
    }
    final_state = out.final_state[i];
  }
  for (std::uint64_t changes : out.write_view_changes) {
    runs.view_changes += changes;
    runs.max_views = std::max(runs.max_views, changes + 1);
    if (changes + 1 > 3 * (setup.f + 1)) {
      ++runs.over_budget;
      note("write needed " + std::to_string(changes + 1) + " views");
    }
  }
}

SmrRuns AdversarialSchedules() {
  const std::vector<Strategy> byzantine = {
      Strategy::kSilentLeader,   Strategy::kEquivocate,
      Strategy::kConflictIndex,  Strategy::kWrongVacantIndex,
      Strategy::kMutateIndex,    Strategy::kDeleteWrongFid,
      Strategy::kFakeDelete};
  SmrRuns runs;
  for (std::uint64_t seed = 1; seed <= 56; ++seed) {
    Rng rng(seed * 31);
    testing::SubnetSetup setup;
    setup.seed = seed;
    setup.strategies.assign(4, Strategy::kHonest);
    const std::size_t who = seed % 4;
    setup.strategies[who] = byzantine[seed % byzantine.size()];
    if (who == 0) ++runs.byzantine_leader_runs;
    setup.min_delay = 1 + rng.Uniform(2);
    setup.max_delay = setup.min_delay + rng.Uniform(8);
    setup.byzantine_drop_rate = 0.1 * static_cast<double>(rng.Uniform(4));
    setup.uploads = 7;
    setup.deletes = 2;
    setup.max_batch = 1 + rng.Uniform(4);
    CheckRun(setup, runs);
  }
  return runs;
}

Verdict SmrSafety(const SmrRuns& runs) {
  return {runs.schedules >= 50 && runs.divergent == 0 && runs.invalid_commits == 0 &&
              runs.byzantine_leader_runs > 0 && runs.view_changes > 0,
          Fmt("%d schedules at N=4 f=1 (%d with a Byzantine first leader), "
              "%llu view changes, %llu commits compared, %d divergent, %d with "
              "invalid committed entries%s%s",
              runs.schedules, runs.byzantine_leader_runs,
              (unsigned long long)runs.view_changes,
              (unsigned long long)runs.commits_compared, runs.divergent,
              runs.invalid_commits, runs.first_problem.empty() ? "" : "; ",
              runs.first_problem.c_str())};
}

Verdict SmrLiveness(const SmrRuns& four) {
  // The same budget at N=7 with two Byzantine replicas, consecutive leaders.
  SmrRuns seven;
  const std::vector<std::pair<Strategy, Strategy>> pairs = {
      {Strategy::kSilentLeader, Strategy::kEquivocate},
      {Strategy::kWrongVacantIndex, Strategy::kSilentLeader},
      {Strategy::kEquivocate, Strategy::kMutateIndex},
      {Strategy::kSilentLeader, Strategy::kSilentLeader},
  };
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    testing::SubnetSetup setup;
    setup.n = 7;
    setup.f = 2;
    setup.seed = 500 + seed;
    setup.strategies.assign(7, Strategy::kHonest);
    const auto& [a, b] = pairs[seed % pairs.size()];
    setup.strategies[seed % 7] = a;
    setup.strategies[(seed + 1) % 7] = b;
    setup.max_delay = 2 + seed % 5;
    setup.uploads = 5;
    setup.deletes = 1;
    CheckRun(setup, seven);
  }
  const bool ok = four.unfinished == 0 && four.failed_writes == 0 &&
                  four.over_budget == 0 && seven.unfinished == 0 &&
                  seven.failed_writes == 0 && seven.over_budget == 0 &&
                  seven.divergent == 0 && seven.invalid_commits == 0;
  return {ok, Fmt("N=4 f=1: max %llu views per write (budget 6), %d failed; "
                  "N=7 f=2: max %llu views (budget 9), %d failed%s%s",
                  (unsigned long long)four.max_views,
                  four.failed_writes + four.unfinished + four.over_budget,
                  (unsigned long long)seven.max_views,
                  seven.failed_writes + seven.unfinished + seven.over_budget,
                  seven.first_problem.empty() ? "" : "; ",
                  seven.first_problem.c_str())};
}

// --- 9 ----------------------------------------------------------------------

Verdict LinearRetrieval(std::uint64_t touch_violations) {
  // Round counts through the full client on the bundled scenarios.
  std::uint64_t retrievals = 0, bad_rounds = 0;
  for (const char* name : {"honest-baseline.json", "mixed-workload.json"}) {
    const auto result =
        sim::Run(scenario::Load(std::string(PIRDSN_SCENARIO_DIR) + "/" + name));
    for (const auto& op : result.ops) {
      const auto& r = op.report;
      if (r.op != client::Operation::kRetrieve || !r.retrieval ||
          *r.retrieval == client::RetrievalOutcome::kAbsent) {
        continue;
      }
      ++retrievals;
      if (r.pir_rounds != 1) ++bad_rounds;
    }
  }

  tools::BenchOptions mpir;
  mpir.mode = "mpir";
  mpir.record_len = 256;
  mpir.trials = 1;
  for (const auto& row : tools::BenchRetrieval(mpir)) {
    for (std::uint64_t touched : row.records_touched) {
      if (touched != row.n) ++touch_violations;
    }
    if (row.pir_rounds != 1) ++bad_rounds;
  }

  tools::BenchOptions spir;
  // Large enough that per-record work dominates the fixed decryption cost.
  spir.sizes = {256, 512, 1024, 2048};
  spir.trials = 9;
  // Fit the per-size minimum so scheduler noise cannot sink the fit.
  std::map<std::uint64_t, std::vector<double>> by_size;
  for (const auto& row : tools::BenchRetrieval(spir)) {
    for (std::uint64_t touched : row.records_touched) {
      if (touched != row.n) ++touch_violations;
    }
    if (row.pir_rounds != 1) ++bad_rounds;
    by_size[row.n].push_back(row.wall_ms);
  }
  std::vector<double> xs, ys;
  std::ostringstream series;
  for (auto& [n, ms] : by_size) {
    xs.push_back(static_cast<double>(n));
    ys.push_back(*std::min_element(ms.begin(), ms.end()));
    series << n << ":" << Fmt("%.2f", ys.back()) << "ms ";
  }
  const auto fit = tools::FitLine(xs, ys);
  return {touch_violations == 0 && bad_rounds == 0 && retrievals > 0 && fit.r2 > 0.9,
          Fmt("records touched != db_size: %llu; %llu client retrievals, %llu "
              "with rounds != 1; SPIR bench %sR^2=%.4f",
              (unsigned long long)touch_violations, (unsigned long long)retrievals,
              (unsigned long long)bad_rounds, series.str().c_str(), fit.r2)};
}

// --- 10 ---------------------------------------------------------------------

Verdict EndToEnd() {
  const auto start = std::chrono::steady_clock::now();
  const auto sc =
      scenario::Load(std::string(PIRDSN_SCENARIO_DIR) + "/mixed-workload.json");
  const auto first = sim::Run(sc);
  const auto second = sim::Run(sc);
  int unsatisfied = 0;
  for (const auto& op : first.ops) {
    if (op.expected_success && !op.report.success) ++unsatisfied;
  }
  std::set<std::string> exercised;
  bool all_detected = true;
  for (const auto& [name, t] : first.attacks) {
    if (t.attempted > 0) exercised.insert(name);
    all_detected = all_detected && t.detected == t.attempted;
  }
  // Every Byzantine strategy appears in the workload.
  const bool complete = exercised.size() == 8;
  const bool same = first.trace_digest == second.trace_digest &&
                    first.state_digests == second.state_digests;
  const double secs = Seconds(start);
  return {first.ok() && second.ok() && unsatisfied == 0 && all_detected &&
              complete && same && secs < 300,
          Fmt("%zu ops, %d honest unsatisfied, %zu strategies exercised all "
              "detected=%s, violations %zu, trace %s %s across runs; %.1fs",
              first.ops.size(), unsatisfied, exercised.size(),
              all_detected ? "yes" : "no", first.violations.size(),
              ShortHex(first.trace_digest).c_str(),
              same ? "identical" : "DIFFERENT", secs)};
}

}  // namespace
}  // namespace pirdsn

int main() {
  using pirdsn::Verdict;
  int failures = 0;
  auto report = [&](int n, const char* name, const Verdict& v) {
    std::cout << (v.pass ? "PASS" : "FAIL") << " [" << n << "] " << name
              << ": " << v.detail << std::endl;
    if (!v.pass) ++failures;
  };
  auto guarded = [&](int n, const char* name, auto fn) {
    try {
      report(n, name, fn());
    } catch (const std::exception& e) {
      report(n, name, Verdict{false, std::string("exception: ") + e.what()});
    }
  };
  std::uint64_t touch_violations = 0;
  guarded(1, "aca oracle equivalence", [] { return pirdsn::AcaOracleEquivalence(); });
  guarded(2, "public verifiability", [] { return pirdsn::PublicVerifiability(); });
  guarded(3, "logarithmic verification", [] { return pirdsn::LogarithmicVerification(); });
  guarded(4, "spir correctness", [&] { return pirdsn::SpirCorrectness(touch_violations); });
  guarded(5, "mpir robustness", [&] { return pirdsn::MpirRobustness(touch_violations); });
  guarded(6, "robustness inequality", [] { return pirdsn::RobustnessInequality(); });
  pirdsn::SmrRuns runs;
  try {
    runs = pirdsn::AdversarialSchedules();
  } catch (const std::exception& e) {
    runs.first_problem = std::string("exception: ") + e.what();
    runs.divergent = runs.unfinished = 1;
  }
  guarded(7, "smr safety and determinism", [&] { return pirdsn::SmrSafety(runs); });
  guarded(8, "smr liveness", [&] { return pirdsn::SmrLiveness(runs); });
  guarded(9, "linear retrieval, single round",
          [&] { return pirdsn::LinearRetrieval(touch_violations); });
  guarded(10, "end-to-end mixed workload", [] { return pirdsn::EndToEnd(); });
  return failures == 0 ? 0 : 1;
}
