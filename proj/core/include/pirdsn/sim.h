#ifndef PIRDSN_SIM_H_
#define PIRDSN_SIM_H_

// Runs a scenario end to end on the simulated network and checks the
// outcome: honest requests satisfied, attacks detected, honest replicas in
// agreement, stores coherent with the ledger.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "pirdsn/client.h"
#include "pirdsn/netsim.h"
#include "pirdsn/scenario.h"

namespace pirdsn::sim {

struct OpRecord {
  client::Report report;
  std::string target;           // miner or subnet the operation ended at
  bool expected_success = true;
  bool as_expected = false;
  bool attack_detected = false;
  std::uint64_t live_files = 0;  // at the target after the operation
  std::uint64_t hash_count = 0;
  double wall_ms = 0;
  std::uint64_t views_elapsed = 0;  // subnet writes only
};

struct AttackTally {
  std::uint64_t attempted = 0;
  std::uint64_t detected = 0;
};

struct RunOptions {
  bool keep_trace = false;
  std::optional<std::uint64_t> seed;  // overrides the scenario's seed
};

struct SimResult {
  std::string scenario;
  std::uint64_t seed = 0;
  std::size_t record_len = 0;
  std::vector<OpRecord> ops;
  std::map<std::string, AttackTally> attacks;  // by strategy name
  Digest trace_digest{};
  std::map<std::string, Digest> state_digests;  // per miner / replica
  netsim::Counters counters;
  netsim::Tick final_tick = 0;
  std::uint64_t view_changes = 0;  // max over honest replicas
  std::uint64_t max_views_per_request = 0;
  std::vector<std::string> violations;
  std::vector<std::string> trace;

  bool ok() const { return violations.empty(); }
};

SimResult Run(const scenario::Scenario& sc, const RunOptions& options = {});

// operation,mode,n,record_len,latency_ticks,wall_ms,hash_count,outcome,
// followed by miner,expected,detected,pir_rounds,records_touched,faulty.
void WriteCsv(std::ostream& out, const SimResult& result);
void WriteSummary(std::ostream& out, const SimResult& result);

}  // namespace pirdsn::sim

#endif  // PIRDSN_SIM_H_
