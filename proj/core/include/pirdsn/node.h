#ifndef PIRDSN_NODE_H_
#define PIRDSN_NODE_H_

// Storage miners. A SpirMiner owns its accumulator and publishes proofs to
// the ledger directly; an MpirMiner is a replica of a subnet whose state is
// ordered by smr::Replica. Both answer PIR queries from a read snapshot and
// can be configured with a Byzantine strategy.

#include <map>
#include <memory>
#include <string>

#include "pirdsn/attacks.h"
#include "pirdsn/ledger.h"
#include "pirdsn/netsim.h"
#include "pirdsn/pir_multi.h"
#include "pirdsn/pir_single.h"
#include "pirdsn/smr.h"
#include "pirdsn/store.h"

namespace pirdsn::node {

using aca::Fid;
using netsim::ActorId;

// --- Messages -------------------------------------------------------------------

struct UploadMsg final : netsim::Message {
  std::uint64_t request_id = 0;
  Bytes content;
  std::string_view Kind() const override { return "upload"; }
  Bytes Encode() const override;
};

struct DeleteMsg final : netsim::Message {
  std::uint64_t request_id = 0;
  Fid fid;
  std::string_view Kind() const override { return "delete"; }
  Bytes Encode() const override;
};

struct OpOutcome {
  bool accepted = false;
  std::optional<proofs::Rejection> rejection;
  std::string reason;
  std::uint64_t index = 0;
  std::uint64_t db_size = 0;
  bool forged = false;  // instrumentation only; never sent to clients
};

struct OpReplyMsg final : netsim::Message {
  std::uint64_t request_id = 0;
  OpOutcome outcome;
  std::string_view Kind() const override { return "op-reply"; }
  Bytes Encode() const override;
};

struct HintRequestMsg final : netsim::Message {
  std::uint64_t request_id = 0;
  std::uint64_t db_size = 0;
  std::string_view Kind() const override { return "hint-request"; }
  Bytes Encode() const override;
};

struct HintMsg final : netsim::Message {
  std::uint64_t request_id = 0;
  std::shared_ptr<const pir::LwePublic> pub;
  std::string_view Kind() const override { return "hint"; }
  Bytes Encode() const override;
};

struct SpirQueryMsg final : netsim::Message {
  std::uint64_t request_id = 0;
  pir::SingleQuery query;
  std::string_view Kind() const override { return "spir-query"; }
  Bytes Encode() const override { return pir::SerializeQuery(query); }
};

struct SpirAnswerMsg final : netsim::Message {
  std::uint64_t request_id = 0;
  pir::SingleAnswer answer;
  std::string_view Kind() const override { return "spir-answer"; }
  Bytes Encode() const override { return pir::SerializeAnswer(answer); }
};

struct MpirQueryMsg final : netsim::Message {
  std::uint64_t request_id = 0;
  pir::MultiQuery query;
  // Number of proofs the subnet had applied when the client read the
  // directory; replicas answer only at exactly this state.
  std::uint64_t applied = 0;
  std::string_view Kind() const override { return "mpir-query"; }
  Bytes Encode() const override;
};

struct MpirAnswerMsg final : netsim::Message {
  std::uint64_t request_id = 0;
  pir::MultiAnswer answer;
  std::string_view Kind() const override { return "mpir-answer"; }
  Bytes Encode() const override { return pir::SerializeMultiAnswer(answer); }
};

// The query was sized for a database the miner no longer holds, or was
// malformed.
struct RefusalMsg final : netsim::Message {
  std::uint64_t request_id = 0;
  std::string reason;
  std::uint64_t db_size = 0;
  std::uint64_t applied = 0;
  std::string_view Kind() const override { return "refusal"; }
  Bytes Encode() const override;
};

// --- Answer corruption -------------------------------------------------------------

enum class Corruption : std::uint8_t {
  kRandomWords,
  kSingleWordOffset,
  kConstantDelta,
  kPermutedDatabase,
  kZero,
};

// Returns an answer that differs from `honest` in at least one word.
pir::MultiAnswer CorruptMultiAnswer(const pir::Database& db,
                                    const pir::MultiQuery& query,
                                    pir::MultiAnswer honest, Corruption how,
                                    Rng& rng);
pir::MultiAnswer CorruptMultiAnswer(const pir::Database& db,
                                    const pir::MultiQuery& query,
                                    pir::MultiAnswer honest, Rng& rng);

// Overwrites a random 16-byte window of the serialized payload with random
// bytes, the single-server tamper model.
pir::SingleAnswer TamperSingleAnswer(const pir::SingleAnswer& honest, Rng& rng);

// --- Miners ------------------------------------------------------------------------

struct MinerConfig {
  std::string id;
  attacks::Strategy strategy = attacks::Strategy::kHonest;
  std::size_t record_len = 64;
  pir::LweParams lwe;
  std::uint64_t seed = 1;
};

struct MinerStats {
  std::uint64_t forged = 0;          // forged proofs published
  std::uint64_t forged_rejected = 0;  // ...that the ledger refused
  std::uint64_t corrupted_answers = 0;
  std::uint64_t answers = 0;
  std::uint64_t refusals = 0;
};

class SpirMiner : public netsim::Actor {
 public:
  SpirMiner(MinerConfig config, std::shared_ptr<ledger::Ledger> ledger);

  void OnMessage(ActorId from, const netsim::MessagePtr& msg) override;

  OpOutcome HandleUpload(Bytes content);
  OpOutcome HandleDelete(const Fid& fid);
  // Null when no retained snapshot has this size.
  std::shared_ptr<const pir::LwePublic> Hint(std::uint64_t db_size);
  // Throws std::invalid_argument for a malformed query and
  // std::out_of_range for a size the miner no longer holds.
  pir::SingleAnswer HandleQuery(const pir::SingleQuery& query);

  const MinerConfig& config() const { return config_; }
  const store::MinerState& state() const { return state_; }
  const MinerStats& stats() const { return stats_; }

 private:
  MinerConfig config_;
  std::shared_ptr<ledger::Ledger> ledger_;
  Rng rng_;
  Digest matrix_seed_;
  store::MinerState state_;
  std::map<const pir::Database*,
           std::pair<std::shared_ptr<const pir::Database>,
                     std::shared_ptr<const pir::LwePublic>>>
      hints_;
  MinerStats stats_;
};

class MpirMiner : public smr::Replica {
 public:
  MpirMiner(smr::ReplicaConfig config,
            std::shared_ptr<const smr::Authenticator> auth,
            std::shared_ptr<ledger::Ledger> ledger);

  const MinerStats& miner_stats() const { return stats_; }

 protected:
  void OnApplied(const smr::Block& block) override;
  bool OnOtherMessage(ActorId from, const netsim::MessagePtr& msg) override;

 private:
  void Answer(ActorId to, const MpirQueryMsg& msg);

  Rng rng_;
  std::vector<std::pair<ActorId, std::shared_ptr<const MpirQueryMsg>>> deferred_;
  MinerStats stats_;
};

}  // namespace pirdsn::node

#endif  // PIRDSN_NODE_H_
