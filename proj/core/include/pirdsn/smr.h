#ifndef PIRDSN_SMR_H_
#define PIRDSN_SMR_H_

// Byzantine fault-tolerant replication of a miner subnet's database.
//
// Two voting phases per block. The leader of view v (v mod N) proposes a
// block of client requests with embedded accumulator proofs; replicas
// validate every proof against their speculative state and vote prepare. A
// prepare quorum locks the block; a commit quorum finalizes it. On timeout
// replicas move to the next view carrying their lock, and a replica only
// votes for a block that conflicts with its lock when the proposal is
// justified by a newer prepare quorum. Proposals and new-view messages also
// forward commit quorums so a replica that missed commit votes catches up.

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pirdsn/aca.h"
#include "pirdsn/attacks.h"
#include "pirdsn/ledger.h"
#include "pirdsn/netsim.h"
#include "pirdsn/proofs.h"
#include "pirdsn/rng.h"
#include "pirdsn/store.h"

namespace pirdsn::smr {

using aca::Fid;
using netsim::ActorId;
using netsim::Tick;

struct RequestKey {
  ActorId client = 0;
  std::uint64_t request = 0;
  friend auto operator<=>(const RequestKey&, const RequestKey&) = default;
};

struct ClientRequest {
  enum class Kind : std::uint8_t { kUpload = 1, kDelete = 2 };
  Kind kind = Kind::kUpload;
  Fid fid;
  Bytes content;  // uploads only
  ActorId client = 0;
  std::uint64_t request_id = 0;

  RequestKey key() const { return {client, request_id}; }
  // Uploads must carry content hashing to the fid; deletions none.
  bool WellFormed() const;
  friend bool operator==(const ClientRequest&, const ClientRequest&) = default;
};

void WriteRequest(ByteWriter& w, const ClientRequest& r);
ClientRequest ReadRequest(ByteReader& r);

// A request the leader could not serve (duplicate upload, deletion of an
// absent fid) is ordered without a proof; replicas re-check that claim.
struct BlockEntry {
  ClientRequest request;
  std::optional<proofs::Proof> proof;
  friend bool operator==(const BlockEntry&, const BlockEntry&) = default;
};

struct Block {
  std::uint64_t height = 0;
  Digest parent{};
  std::uint64_t view = 0;
  std::uint32_t leader = 0;
  std::vector<BlockEntry> entries;

  Bytes Serialize() const;
  static Block Deserialize(std::span<const std::uint8_t> bytes);
  Digest Hash() const;
};

enum class Phase : std::uint8_t { kPrepare = 1, kCommit = 2 };

struct Vote {
  Phase phase = Phase::kPrepare;
  std::uint64_t view = 0;
  std::uint64_t height = 0;
  Digest block{};
  std::uint32_t voter = 0;
  Digest auth{};

  Bytes SignedBytes() const;
};

struct QuorumCertificate {
  Phase phase = Phase::kPrepare;
  std::uint64_t view = 0;
  std::uint64_t height = 0;
  Digest block{};
  std::vector<Vote> votes;
};

// ceil(2N/3).
inline std::size_t QuorumSize(std::size_t n) { return (2 * n + 2) / 3; }

// Keyed-hash authenticators standing in for signatures: replica i's key is
// derived from a shared simulation secret.
class Authenticator {
 public:
  Authenticator(const Digest& master, std::uint32_t replicas);
  Digest Sign(std::uint32_t signer, std::span<const std::uint8_t> msg) const;
  bool Check(std::uint32_t signer, std::span<const std::uint8_t> msg,
             const Digest& tag) const;
  std::uint32_t replicas() const {
    return static_cast<std::uint32_t>(keys_.size());
  }

 private:
  std::vector<Digest> keys_;
};

// Rejects fewer than a quorum of votes, duplicate voters, votes on a
// different (phase, view, height, block), and bad authenticators.
bool CheckQuorumCertificate(const QuorumCertificate& qc,
                            const Authenticator& auth);

struct ValidationResult {
  bool ok = true;
  std::string reason;
  std::optional<proofs::Rejection> rejection;
};

// Replays `entries` on a copy of `state` whose chain head is `head`. Every
// proof must verify against the running state and every upload must land on
// the first vacant leaf (or grow the forest when none is vacant). Entries
// without a proof must be genuinely unserviceable.
ValidationResult ValidateEntries(const aca::Accumulator& state,
                                 const Digest& head,
                                 const std::vector<BlockEntry>& entries,
                                 const std::set<RequestKey>& done);

// --- Messages ---------------------------------------------------------------

struct RequestMsg final : netsim::Message {
  ClientRequest request;
  std::string_view Kind() const override { return "request"; }
  Bytes Encode() const override;
};

struct ProposalMsg final : netsim::Message {
  std::uint64_t view = 0;
  Block block;
  std::optional<QuorumCertificate> justify;
  std::optional<QuorumCertificate> parent_commit;  // commit QC at height - 1
  Digest auth{};  // leader's tag over (view, block digest)
  std::string_view Kind() const override { return "proposal"; }
  Bytes Encode() const override;
};

struct VoteMsg final : netsim::Message {
  Vote vote;
  std::string_view Kind() const override {
    return vote.phase == Phase::kPrepare ? "prepare" : "commit";
  }
  Bytes Encode() const override;
};

struct NewViewMsg final : netsim::Message {
  std::uint64_t view = 0;
  std::uint32_t sender = 0;
  std::uint64_t committed_height = 0;
  std::optional<QuorumCertificate> lock;
  std::optional<Block> locked_block;
  std::optional<QuorumCertificate> commit;  // for committed_height
  Digest auth{};
  std::string_view Kind() const override { return "new-view"; }
  Bytes Encode() const override;
};

struct FetchMsg final : netsim::Message {
  Digest block{};
  std::string_view Kind() const override { return "fetch"; }
  Bytes Encode() const override;
};

struct BlockMsg final : netsim::Message {
  Block block;
  std::string_view Kind() const override { return "block"; }
  Bytes Encode() const override;
};

struct ReplyMsg final : netsim::Message {
  RequestKey key;
  std::uint32_t replica = 0;
  bool accepted = false;
  std::string reason;
  std::uint64_t index = 0;  // uploads
  std::uint64_t db_size = 0;
  std::uint64_t applied = 0;  // proofs applied after this request
  std::string_view Kind() const override { return "reply"; }
  Bytes Encode() const override;
};

// --- Replica ------------------------------------------------------------------

struct ReplicaConfig {
  std::uint32_t index = 0;  // position in the subnet, 0-based
  std::uint32_t n = 4;
  std::uint32_t f = 1;
  std::vector<ActorId> peers;  // actor id of every replica, by index
  Tick timeout = 40;
  // Extra wait for straggling new-view messages once a quorum is in.
  Tick new_view_wait = 4;
  std::size_t max_batch = 8;
  attacks::Strategy strategy = attacks::Strategy::kHonest;
  std::uint64_t seed = 1;
  std::string chain_id = "mpir";
  std::size_t record_len = 64;
};

struct CommitRecord {
  std::uint64_t height = 0;
  std::uint64_t view = 0;  // replica's view when it applied the block
  Digest block{};
  Digest state{};
};

struct ReplicaStats {
  std::uint64_t view_changes = 0;
  std::uint64_t proposals = 0;
  std::uint64_t forged_proposals = 0;
  std::vector<Digest> forged_blocks;
  std::uint64_t equivocations = 0;
  std::uint64_t rejected_blocks = 0;
  std::vector<std::string> rejection_reasons;
  std::uint64_t ledger_rejections = 0;
};

class Replica : public netsim::Actor {
 public:
  Replica(ReplicaConfig config, std::shared_ptr<const Authenticator> auth,
          std::shared_ptr<ledger::Ledger> ledger);

  void OnMessage(ActorId from, const netsim::MessagePtr& msg) override;
  void OnTimer(std::uint64_t token) override;

  const ReplicaConfig& config() const { return config_; }
  bool honest() const { return config_.strategy == attacks::Strategy::kHonest; }
  std::uint64_t view() const { return view_; }
  std::uint64_t committed_height() const { return committed_; }
  const store::MinerState& state() const { return state_; }
  const std::vector<CommitRecord>& commits() const { return commits_; }
  const ReplicaStats& stats() const { return stats_; }
  std::size_t pending() const { return pending_.size(); }
  bool IsLeader(std::uint64_t view) const { return view % config_.n == config_.index; }

 protected:
  // Called after each block is applied.
  virtual void OnApplied(const Block& block) { (void)block; }
  // Messages the replica does not understand; return false to drop.
  virtual bool OnOtherMessage(ActorId from, const netsim::MessagePtr& msg) {
    (void)from;
    (void)msg;
    return false;
  }

 private:
  struct VoteKey {
    Phase phase;
    std::uint64_t view;
    std::uint64_t height;
    Digest block;
    friend auto operator<=>(const VoteKey&, const VoteKey&) = default;
  };

  bool silent() const {
    return config_.strategy == attacks::Strategy::kSilentLeader;
  }
  bool validates() const;
  std::uint32_t leader_of(std::uint64_t view) const {
    return static_cast<std::uint32_t>(view % config_.n);
  }

  void HandleRequest(const ClientRequest& request);
  void HandleProposal(const ProposalMsg& msg);
  void HandleVote(const Vote& vote);
  void HandleNewView(const NewViewMsg& msg);
  void HandleFetch(ActorId from, const FetchMsg& msg);
  void HandleBlock(const Block& block);

  void TryPropose();
  std::vector<BlockEntry> BuildEntries(std::size_t limit, bool forge);
  void SendProposal(const Block& block,
                    const std::optional<QuorumCertificate>& justify,
                    const std::vector<ActorId>& to);
  bool SafeToVote(const Block& block,
                  const std::optional<QuorumCertificate>& justify) const;
  ValidationResult Validate(const Block& block) const;
  void CastVote(Phase phase, std::uint64_t view, const Block& block);
  void OnQuorum(const QuorumCertificate& qc);
  void LearnCommit(const QuorumCertificate& qc);
  QuorumCertificate BuildQc(const VoteKey& key) const;
  void RescanQuorums();
  bool Outstanding() const;
  void ResetTimer();
  bool LeaderReady();
  void MaybeCommitVote();
  void TryApply();
  void Apply(const Block& block);
  void RequestBlock(const Digest& digest, const std::vector<std::uint32_t>& from);
  void StartViewChange(std::uint64_t view);
  void ArmTimer();
  void DrainBuffered();
  std::optional<Block> FindBlock(const Digest& d) const;
  void Broadcast(const netsim::MessagePtr& msg);

  ReplicaConfig config_;
  std::shared_ptr<const Authenticator> auth_;
  std::shared_ptr<ledger::Ledger> ledger_;
  Rng rng_;
  store::MinerState state_;

  std::uint64_t view_ = 0;
  std::uint64_t committed_ = 0;
  Digest last_block_{};
  std::vector<CommitRecord> commits_;

  std::deque<ClientRequest> pending_;
  std::set<RequestKey> known_;
  std::set<RequestKey> done_;
  std::map<RequestKey, std::shared_ptr<const ReplyMsg>> replies_;

  std::map<Digest, Block> blocks_;
  std::set<Digest> validated_;
  std::map<VoteKey, std::map<std::uint32_t, Vote>> votes_;
  std::set<VoteKey> formed_;
  std::set<std::pair<std::uint64_t, std::uint64_t>> prepare_voted_;
  std::set<std::pair<std::uint64_t, std::uint64_t>> commit_voted_;
  std::set<std::pair<std::uint64_t, std::uint64_t>> proposed_;
  std::optional<QuorumCertificate> lock_;
  std::map<std::uint64_t, Digest> decided_;
  std::map<std::uint64_t, std::vector<std::uint32_t>> decided_voters_;
  std::map<std::uint64_t, QuorumCertificate> commit_qcs_;
  std::set<Digest> fetching_;
  std::vector<ProposalMsg> buffered_;

  std::map<std::uint64_t, std::map<std::uint32_t, NewViewMsg>> new_views_;
  bool straggler_wait_started_ = false;
  bool straggler_wait_done_ = false;

  std::uint64_t timer_generation_ = 0;
  bool timer_armed_ = false;
  ReplicaStats stats_;
};

}  // namespace pirdsn::smr

#endif  // PIRDSN_SMR_H_
