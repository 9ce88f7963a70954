#include "pirdsn/smr.h"

#include <algorithm>

namespace pirdsn::smr {
namespace {

using proofs::DeletionProof;
using proofs::Proof;
using proofs::Rejection;
using proofs::UploadProof;

ValidationResult Fail(std::string reason,
                      std::optional<Rejection> rejection = std::nullopt) {
  return {false, std::move(reason), rejection};
}

void WriteQc(ByteWriter& w, const std::optional<QuorumCertificate>& qc) {
  w.U8(qc.has_value());
  if (!qc) return;
  w.U8(static_cast<std::uint8_t>(qc->phase));
  w.U64(qc->view);
  w.U64(qc->height);
  w.Put(qc->block);
  w.U32(static_cast<std::uint32_t>(qc->votes.size()));
  for (const Vote& v : qc->votes) {
    w.U32(v.voter);
    w.Put(v.auth);
  }
}

Bytes ViewSignedBytes(std::uint64_t view, const Digest& digest) {
  ByteWriter w;
  w.U64(view);
  w.Put(digest);
  return std::move(w).Take();
}

Bytes NewViewSignedBytes(const NewViewMsg& m) {
  ByteWriter w;
  w.U64(m.view);
  w.U32(m.sender);
  w.U64(m.committed_height);
  w.Put(m.lock ? m.lock->block : Digest{});
  return std::move(w).Take();
}

}  // namespace

bool ClientRequest::WellFormed() const {
  if (kind == Kind::kDelete) return content.empty();
  return !content.empty() && Fid::OfContent(content) == fid;
}

void WriteRequest(ByteWriter& w, const ClientRequest& r) {
  w.U8(static_cast<std::uint8_t>(r.kind));
  w.U32(r.client);
  w.U64(r.request_id);
  w.Put(r.fid.digest);
  w.LengthPrefixed(r.content);
}

ClientRequest ReadRequest(ByteReader& r) {
  ClientRequest req;
  const std::uint8_t kind = r.U8();
  if (kind != 1 && kind != 2) throw DecodeError("unknown request kind");
  req.kind = static_cast<ClientRequest::Kind>(kind);
  req.client = r.U32();
  req.request_id = r.U64();
  req.fid.digest = r.GetDigest();
  req.content = r.LengthPrefixed();
  return req;
}

Bytes Block::Serialize() const {
  ByteWriter w;
  w.U64(height);
  w.Put(parent);
  w.U64(view);
  w.U32(leader);
  w.U32(static_cast<std::uint32_t>(entries.size()));
  for (const BlockEntry& e : entries) {
    WriteRequest(w, e.request);
    w.U8(e.proof.has_value());
    if (e.proof) w.LengthPrefixed(proofs::Serialize(*e.proof));
  }
  return std::move(w).Take();
}

Block Block::Deserialize(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  Block b;
  b.height = r.U64();
  b.parent = r.GetDigest();
  b.view = r.U64();
  b.leader = r.U32();
  const std::uint32_t count = r.U32();
  for (std::uint32_t i = 0; i < count; ++i) {
    BlockEntry e;
    e.request = ReadRequest(r);
    if (r.U8()) e.proof = proofs::Deserialize(r.LengthPrefixed());
    b.entries.push_back(std::move(e));
  }
  r.ExpectDone();
  return b;
}

Digest Block::Hash() const {
  return HashTaggedUncounted(HashDomain::kBlock, {Serialize()});
}

Bytes Vote::SignedBytes() const {
  ByteWriter w;
  w.U8(static_cast<std::uint8_t>(phase));
  w.U64(view);
  w.U64(height);
  w.Put(block);
  return std::move(w).Take();
}

Authenticator::Authenticator(const Digest& master, std::uint32_t replicas) {
  for (std::uint32_t i = 0; i < replicas; ++i) {
    ByteWriter w;
    w.U32(i);
    keys_.push_back(
        HashTaggedUncounted(HashDomain::kAuthenticator, {master, w.bytes()}));
  }
}

Digest Authenticator::Sign(std::uint32_t signer,
                           std::span<const std::uint8_t> msg) const {
  return HashTaggedUncounted(HashDomain::kAuthenticator,
                             {keys_.at(signer), msg});
}

bool Authenticator::Check(std::uint32_t signer,
                          std::span<const std::uint8_t> msg,
                          const Digest& tag) const {
  return signer < keys_.size() && Sign(signer, msg) == tag;
}

bool CheckQuorumCertificate(const QuorumCertificate& qc,
                            const Authenticator& auth) {
  if (qc.votes.size() < QuorumSize(auth.replicas())) return false;
  std::set<std::uint32_t> voters;
  for (const Vote& v : qc.votes) {
    if (v.phase != qc.phase || v.view != qc.view || v.height != qc.height ||
        v.block != qc.block) {
      return false;
    }
    if (!voters.insert(v.voter).second) return false;
    if (!auth.Check(v.voter, v.SignedBytes(), v.auth)) return false;
  }
  return true;
}

ValidationResult ValidateEntries(const aca::Accumulator& state,
                                 const Digest& head,
                                 const std::vector<BlockEntry>& entries,
                                 const std::set<RequestKey>& done) {
  aca::Accumulator acc = state;
  Digest chain = head;
  std::set<RequestKey> seen;
  for (const BlockEntry& e : entries) {
    const ClientRequest& req = e.request;
    if (!req.WellFormed()) return Fail("malformed request");
    if (done.contains(req.key()) || !seen.insert(req.key()).second) {
      return Fail("request ordered twice");
    }
    if (req.kind == ClientRequest::Kind::kUpload) {
      if (!e.proof) {
        if (acc.Contains(req.fid)) continue;
        return Fail("upload left without a proof");
      }
      if (!proofs::IsUpload(*e.proof)) {
        return Fail("deletion proof for an upload",
                    Rejection::kStateTransitionInvalid);
      }
      const auto& p = std::get<UploadProof>(*e.proof);
      if (p.fid != req.fid) {
        return Fail("proof names another fid", Rejection::kFidAbsent);
      }
      if (p.prev_hash != chain) {
        return Fail("proof breaks the chain", Rejection::kChainBroken);
      }
      if (acc.Contains(p.fid)) {
        return Fail("fid already mapped", Rejection::kIndexConflict);
      }
      if (auto out = proofs::VerifyUploadTransition(p, acc.roots()); !out) {
        return Fail(std::string(proofs::RejectionName(*out.reason)),
                    out.reason);
      }
      if (auto slot = acc.NextSlot()) {
        if (p.k() != slot->tree || p.witness.leaf_position != slot->position) {
          return Fail("upload skips the first vacant leaf",
                      Rejection::kIndexMismatch);
        }
        acc.InsertAt(p.fid, *slot);
      } else {
        if (p.k() != acc.m()) {
          return Fail("upload skips the first vacant leaf",
                      Rejection::kIndexMismatch);
        }
        acc.InsertGrow(p.fid);
      }
      if (acc.roots() != p.roots) {
        return Fail("proof disagrees with the replayed state",
                    Rejection::kStateTransitionInvalid);
      }
    } else {
      if (!e.proof) {
        if (!acc.Contains(req.fid)) continue;
        return Fail("deletion left without a proof");
      }
      if (proofs::IsUpload(*e.proof)) {
        return Fail("upload proof for a deletion",
                    Rejection::kStateTransitionInvalid);
      }
      const auto& p = std::get<DeletionProof>(*e.proof);
      if (p.fid != req.fid) {
        return Fail("proof names another fid", Rejection::kFidAbsent);
      }
      if (p.prev_hash != chain) {
        return Fail("proof breaks the chain", Rejection::kChainBroken);
      }
      const auto loc = acc.Locate(p.fid);
      if (!loc || loc->tree != p.k() || loc->position != p.leaf_position) {
        return Fail("fid not at the claimed leaf", Rejection::kFidAbsent);
      }
      if (auto out = proofs::VerifyDeletionTransition(p, acc.roots()); !out) {
        return Fail(std::string(proofs::RejectionName(*out.reason)),
                    out.reason);
      }
      acc.Delete(p.fid);
      if (acc.roots() != p.roots) {
        return Fail("proof disagrees with the replayed state",
                    Rejection::kStateTransitionInvalid);
      }
    }
    chain = proofs::ProofHash(*e.proof);
  }
  return {};
}

// --- Message encodings --------------------------------------------------------

Bytes RequestMsg::Encode() const {
  ByteWriter w;
  WriteRequest(w, request);
  return std::move(w).Take();
}

Bytes ProposalMsg::Encode() const {
  ByteWriter w;
  w.U64(view);
  w.LengthPrefixed(block.Serialize());
  WriteQc(w, justify);
  WriteQc(w, parent_commit);
  w.Put(auth);
  return std::move(w).Take();
}

Bytes VoteMsg::Encode() const {
  ByteWriter w;
  w.Raw(vote.SignedBytes());
  w.U32(vote.voter);
  w.Put(vote.auth);
  return std::move(w).Take();
}

Bytes NewViewMsg::Encode() const {
  ByteWriter w;
  w.Raw(NewViewSignedBytes(*this));
  WriteQc(w, lock);
  WriteQc(w, commit);
  w.Put(auth);
  return std::move(w).Take();
}

Bytes FetchMsg::Encode() const {
  ByteWriter w;
  w.Put(block);
  return std::move(w).Take();
}

Bytes BlockMsg::Encode() const { return block.Serialize(); }

Bytes ReplyMsg::Encode() const {
  ByteWriter w;
  w.U32(key.client);
  w.U64(key.request);
  w.U32(replica);
  w.U8(accepted);
  w.String(reason);
  w.U64(index);
  w.U64(db_size);
  w.U64(applied);
  return std::move(w).Take();
}

// --- Replica --------------------------------------------------------------------

Replica::Replica(ReplicaConfig config, std::shared_ptr<const Authenticator> auth,
                 std::shared_ptr<ledger::Ledger> ledger)
    : config_(std::move(config)),
      auth_(std::move(auth)),
      ledger_(std::move(ledger)),
      rng_(Rng(config_.seed).Fork(config_.index)),
      state_(config_.chain_id, config_.record_len),
      last_block_(proofs::GenesisDigest(config_.chain_id)) {
  if (config_.peers.size() != config_.n || config_.index >= config_.n) {
    throw std::invalid_argument("replica peer list does not match N");
  }
}

bool Replica::validates() const {
  using attacks::Strategy;
  switch (config_.strategy) {
    case Strategy::kHonest:
    case Strategy::kCorruptPirAnswer:
    case Strategy::kSilentLeader:
      return true;
    default:
      return false;
  }
}

void Replica::Broadcast(const netsim::MessagePtr& msg) {
  net().Broadcast(id(), config_.peers, msg);
}

void Replica::OnMessage(ActorId from, const netsim::MessagePtr& msg) {
  if (auto* m = dynamic_cast<const RequestMsg*>(msg.get())) {
    HandleRequest(m->request);
  } else if (auto* m = dynamic_cast<const ProposalMsg*>(msg.get())) {
    HandleProposal(*m);
  } else if (auto* m = dynamic_cast<const VoteMsg*>(msg.get())) {
    HandleVote(m->vote);
  } else if (auto* m = dynamic_cast<const NewViewMsg*>(msg.get())) {
    if (m->sender < config_.n && config_.peers[m->sender] == from) {
      HandleNewView(*m);
    }
  } else if (auto* m = dynamic_cast<const FetchMsg*>(msg.get())) {
    HandleFetch(from, *m);
  } else if (auto* m = dynamic_cast<const BlockMsg*>(msg.get())) {
    HandleBlock(m->block);
  } else {
    OnOtherMessage(from, msg);
  }
}

void Replica::HandleRequest(const ClientRequest& request) {
  if (!request.WellFormed()) return;
  const RequestKey key = request.key();
  if (done_.contains(key)) {
    auto it = replies_.find(key);
    if (it != replies_.end() && !silent()) {
      net().Send(id(), request.client, it->second);
    }
    return;
  }
  if (!known_.insert(key).second) return;
  pending_.push_back(request);
  ArmTimer();
  TryPropose();
}

bool Replica::Outstanding() const {
  return !pending_.empty() || (lock_ && lock_->height > committed_) ||
         !decided_.empty();
}

void Replica::ArmTimer() {
  if (timer_armed_) return;
  timer_armed_ = true;
  net().SetTimer(id(), config_.timeout, 2 * ++timer_generation_);
}

void Replica::ResetTimer() {
  timer_armed_ = false;
  ++timer_generation_;
  if (Outstanding()) ArmTimer();
}

void Replica::OnTimer(std::uint64_t token) {
  if (token % 2 == 1) {
    if (token / 2 == view_ && IsLeader(view_)) {
      straggler_wait_done_ = true;
      TryPropose();
    }
    return;
  }
  if (token / 2 != timer_generation_) return;
  timer_armed_ = false;
  if (!Outstanding()) return;
  StartViewChange(view_ + 1);
}

void Replica::StartViewChange(std::uint64_t view) {
  if (view <= view_) return;
  view_ = view;
  ++stats_.view_changes;
  straggler_wait_started_ = false;
  straggler_wait_done_ = false;
  net().Note(id(), "view-change " + std::to_string(view_));
  timer_armed_ = false;
  ++timer_generation_;
  ArmTimer();
  if (!silent()) {
    auto nv = std::make_shared<NewViewMsg>();
    nv->view = view_;
    nv->sender = config_.index;
    nv->committed_height = committed_;
    if (auto it = commit_qcs_.find(committed_); it != commit_qcs_.end()) {
      nv->commit = it->second;
    }
    if (lock_ && lock_->height == committed_ + 1) {
      nv->lock = lock_;
      nv->locked_block = FindBlock(lock_->block);
      if (!nv->locked_block) nv->lock.reset();
    }
    nv->auth = auth_->Sign(config_.index, NewViewSignedBytes(*nv));
    Broadcast(nv);
  }
  DrainBuffered();
  TryPropose();
}

void Replica::HandleNewView(const NewViewMsg& msg) {
  if (!auth_->Check(msg.sender, NewViewSignedBytes(msg), msg.auth)) return;
  if (msg.commit) LearnCommit(*msg.commit);
  NewViewMsg copy = msg;
  const bool lock_ok =
      copy.lock && copy.locked_block &&
      copy.lock->phase == Phase::kPrepare &&
      copy.locked_block->Hash() == copy.lock->block &&
      copy.locked_block->height == copy.lock->height &&
      CheckQuorumCertificate(*copy.lock, *auth_);
  if (!lock_ok) {
    copy.lock.reset();
    copy.locked_block.reset();
  } else if (copy.lock->height > committed_) {
    blocks_.emplace(copy.lock->block, *copy.locked_block);
  }
  auto& senders = new_views_[copy.view];
  senders[copy.sender] = std::move(copy);
  if (msg.view > view_ && senders.size() >= config_.f + 1) {
    StartViewChange(msg.view);
    return;
  }
  if (msg.view == view_ && IsLeader(view_)) TryPropose();
}

bool Replica::LeaderReady() {
  if (view_ == 0) return true;
  const auto& nv = new_views_[view_];
  if (nv.size() < QuorumSize(config_.n)) return false;
  if (nv.size() < config_.n && !straggler_wait_done_) {
    if (!straggler_wait_started_) {
      straggler_wait_started_ = true;
      net().SetTimer(id(), config_.new_view_wait, 2 * view_ + 1);
    }
    return false;
  }
  for (const auto& [sender, m] : nv) {
    if (m.committed_height > committed_) return false;  // catch up first
  }
  return true;
}

void Replica::TryPropose() {
  if (silent() || !IsLeader(view_)) return;
  const std::uint64_t height = committed_ + 1;
  if (proposed_.contains({view_, height})) return;
  if (decided_.contains(height)) return;
  if (!LeaderReady()) return;

  std::optional<QuorumCertificate> best;
  if (lock_ && lock_->height == height) best = lock_;
  for (const auto& [sender, m] : new_views_[view_]) {
    if (m.lock && m.lock->height == height &&
        (!best || m.lock->view > best->view)) {
      best = m.lock;
    }
  }
  if (best) {
    auto block = FindBlock(best->block);
    if (!block) return;
    proposed_.insert({view_, height});
    ++stats_.proposals;
    SendProposal(*block, best, config_.peers);
    return;
  }
  if (pending_.empty()) return;

  const bool forge = attacks::ForgesUploads(config_.strategy) ||
                     attacks::ForgesDeletions(config_.strategy);
  const std::uint64_t forged_before = stats_.forged_proposals;
  Block block{height, last_block_, view_, config_.index,
              BuildEntries(config_.max_batch, forge)};
  proposed_.insert({view_, height});
  ++stats_.proposals;
  blocks_[block.Hash()] = block;
  if (stats_.forged_proposals != forged_before) {
    stats_.forged_blocks.push_back(block.Hash());
  }

  if (config_.strategy == attacks::Strategy::kEquivocate) {
    Block alt = block;
    if (!alt.entries.empty()) alt.entries.pop_back();
    blocks_[alt.Hash()] = alt;
    ++stats_.equivocations;
    std::vector<ActorId> even, odd;
    for (std::uint32_t i = 0; i < config_.n; ++i) {
      (i % 2 == 0 ? even : odd).push_back(config_.peers[i]);
    }
    SendProposal(block, std::nullopt, even);
    SendProposal(alt, std::nullopt, odd);
    prepare_voted_.insert({view_, height});
    CastVote(Phase::kPrepare, view_, block);
    CastVote(Phase::kPrepare, view_, alt);
    net().Note(id(), "equivocate height " + std::to_string(height));
    return;
  }
  SendProposal(block, std::nullopt, config_.peers);
}

std::vector<BlockEntry> Replica::BuildEntries(std::size_t limit, bool forge) {
  aca::Accumulator acc = state_.accumulator();
  Digest head = state_.chain_head();
  std::vector<BlockEntry> entries;
  bool forged = false;
  for (const ClientRequest& req : pending_) {
    if (entries.size() >= limit) break;
    if (done_.contains(req.key())) continue;
    BlockEntry e{req, std::nullopt};
    const bool upload = req.kind == ClientRequest::Kind::kUpload;
    const bool live = acc.Contains(req.fid);
    if (upload ? live : !live) {
      entries.push_back(std::move(e));
      continue;
    }
    if (forge && !forged) {
      auto fake = upload ? attacks::ForgeForUpload(config_.strategy, acc,
                                                   req.fid, head, rng_)
                         : attacks::ForgeForDelete(config_.strategy, acc,
                                                   req.fid, head, rng_);
      if (fake) {
        forged = true;
        ++stats_.forged_proposals;
        e.proof = std::move(fake);
        entries.push_back(std::move(e));
        net().Note(id(), "forged proof in proposal");
        continue;
      }
    }
    if (upload) {
      e.proof = proofs::MakeUploadProof(acc, req.fid, head);
    } else {
      e.proof = proofs::MakeDeletionProof(acc, req.fid, head);
    }
    head = proofs::ProofHash(*e.proof);
    entries.push_back(std::move(e));
  }
  return entries;
}

void Replica::SendProposal(const Block& block,
                           const std::optional<QuorumCertificate>& justify,
                           const std::vector<ActorId>& to) {
  auto msg = std::make_shared<ProposalMsg>();
  msg->view = view_;
  msg->block = block;
  msg->justify = justify;
  if (auto it = commit_qcs_.find(block.height - 1); it != commit_qcs_.end()) {
    msg->parent_commit = it->second;
  }
  msg->auth = auth_->Sign(config_.index, ViewSignedBytes(view_, block.Hash()));
  net().Broadcast(id(), to, msg);
}

void Replica::HandleProposal(const ProposalMsg& msg) {
  const Digest digest = msg.block.Hash();
  if (!auth_->Check(leader_of(msg.view), ViewSignedBytes(msg.view, digest),
                    msg.auth)) {
    return;
  }
  if (msg.parent_commit) LearnCommit(*msg.parent_commit);
  if (msg.view < view_ || msg.block.height <= committed_) return;
  if (msg.view > view_ || msg.block.height > committed_ + 1) {
    buffered_.push_back(msg);
    return;
  }
  blocks_.emplace(digest, msg.block);
  if (silent()) return;
  if (prepare_voted_.contains({msg.view, msg.block.height})) return;
  if (validates()) {
    if (!SafeToVote(msg.block, msg.justify)) {
      net().Note(id(), "refuse proposal conflicting with lock");
      return;
    }
    ValidationResult v = Validate(msg.block);
    if (!v.ok) {
      ++stats_.rejected_blocks;
      stats_.rejection_reasons.push_back(v.reason);
      net().Note(id(), "reject block " + ShortHex(digest) + ": " + v.reason);
      return;
    }
    validated_.insert(digest);
  }
  prepare_voted_.insert({msg.view, msg.block.height});
  CastVote(Phase::kPrepare, msg.view, msg.block);
}

bool Replica::SafeToVote(const Block& block,
                         const std::optional<QuorumCertificate>& justify) const {
  if (!lock_ || lock_->height != block.height) return true;
  const Digest digest = block.Hash();
  if (lock_->block == digest) return true;
  return justify && justify->phase == Phase::kPrepare &&
         justify->height == block.height && justify->block == digest &&
         justify->view > lock_->view &&
         CheckQuorumCertificate(*justify, *auth_);
}

ValidationResult Replica::Validate(const Block& block) const {
  if (block.height != committed_ + 1 || block.parent != last_block_) {
    return Fail("block does not extend the committed chain");
  }
  return ValidateEntries(state_.accumulator(), state_.chain_head(),
                         block.entries, done_);
}

void Replica::CastVote(Phase phase, std::uint64_t view, const Block& block) {
  auto msg = std::make_shared<VoteMsg>();
  msg->vote = Vote{phase, view, block.height, block.Hash(), config_.index, {}};
  msg->vote.auth = auth_->Sign(config_.index, msg->vote.SignedBytes());
  Broadcast(msg);
}

void Replica::HandleVote(const Vote& vote) {
  if (vote.voter >= config_.n ||
      !auth_->Check(vote.voter, vote.SignedBytes(), vote.auth)) {
    return;
  }
  if (vote.height <= committed_) return;
  const VoteKey key{vote.phase, vote.view, vote.height, vote.block};
  auto& by_voter = votes_[key];
  by_voter.emplace(vote.voter, vote);
  if (by_voter.size() >= QuorumSize(config_.n) && formed_.insert(key).second) {
    OnQuorum(BuildQc(key));
  }
}

QuorumCertificate Replica::BuildQc(const VoteKey& key) const {
  QuorumCertificate qc{key.phase, key.view, key.height, key.block, {}};
  for (const auto& [voter, v] : votes_.at(key)) qc.votes.push_back(v);
  return qc;
}

void Replica::OnQuorum(const QuorumCertificate& qc) {
  if (qc.height != committed_ + 1) return;  // rescanned after catching up
  if (qc.phase == Phase::kPrepare) {
    if (!lock_ || lock_->height != qc.height || qc.view > lock_->view) {
      lock_ = qc;
    }
    MaybeCommitVote();
    return;
  }
  decided_[qc.height] = qc.block;
  std::vector<std::uint32_t> voters;
  for (const Vote& v : qc.votes) voters.push_back(v.voter);
  decided_voters_[qc.height] = std::move(voters);
  commit_qcs_[qc.height] = qc;
  TryApply();
}

void Replica::LearnCommit(const QuorumCertificate& qc) {
  if (qc.phase != Phase::kCommit || qc.height != committed_ + 1 ||
      decided_.contains(qc.height) || !CheckQuorumCertificate(qc, *auth_)) {
    return;
  }
  net().Note(id(), "learn commit at height " + std::to_string(qc.height));
  OnQuorum(qc);
}

void Replica::RescanQuorums() {
  std::vector<VoteKey> keys;
  for (const VoteKey& k : formed_) {
    if (k.height == committed_ + 1) keys.push_back(k);
  }
  // Prepare quorums before commit quorums, older views first.
  std::sort(keys.begin(), keys.end(), [](const VoteKey& a, const VoteKey& b) {
    return std::tie(a.phase, a.view) < std::tie(b.phase, b.view);
  });
  for (const VoteKey& k : keys) {
    if (k.height != committed_ + 1) break;
    OnQuorum(BuildQc(k));
  }
}

void Replica::MaybeCommitVote() {
  if (silent() || !lock_ || lock_->height != committed_ + 1) return;
  // Commit votes are only cast within the view that produced the lock; a
  // replica that has moved on may already have voted for something newer.
  if (lock_->view != view_) return;
  if (commit_voted_.contains({lock_->view, lock_->height})) return;
  auto block = FindBlock(lock_->block);
  if (!block) {
    std::vector<std::uint32_t> voters;
    for (const Vote& v : lock_->votes) voters.push_back(v.voter);
    RequestBlock(lock_->block, voters);
    return;
  }
  if (validates() && !validated_.contains(lock_->block)) {
    if (!Validate(*block).ok) return;
    validated_.insert(lock_->block);
  }
  commit_voted_.insert({lock_->view, lock_->height});
  CastVote(Phase::kCommit, lock_->view, *block);
}

std::optional<Block> Replica::FindBlock(const Digest& d) const {
  auto it = blocks_.find(d);
  if (it == blocks_.end()) return std::nullopt;
  return it->second;
}

void Replica::RequestBlock(const Digest& digest,
                           const std::vector<std::uint32_t>& from) {
  if (!fetching_.insert(digest).second) return;
  auto msg = std::make_shared<FetchMsg>();
  msg->block = digest;
  for (std::uint32_t voter : from) {
    if (voter != config_.index) net().Send(id(), config_.peers[voter], msg);
  }
}

void Replica::HandleFetch(ActorId from, const FetchMsg& msg) {
  if (silent()) return;
  if (auto block = FindBlock(msg.block)) {
    auto reply = std::make_shared<BlockMsg>();
    reply->block = *block;
    net().Send(id(), from, reply);
  }
}

void Replica::HandleBlock(const Block& block) {
  const Digest digest = block.Hash();
  if (!fetching_.contains(digest)) return;
  fetching_.erase(digest);
  blocks_.emplace(digest, block);
  MaybeCommitVote();
  TryApply();
}

void Replica::TryApply() {
  bool progressed = false;
  const std::size_t pending_before = pending_.size();
  while (true) {
    auto it = decided_.find(committed_ + 1);
    if (it == decided_.end()) break;
    auto block = FindBlock(it->second);
    if (!block) {
      RequestBlock(it->second, decided_voters_[it->first]);
      break;
    }
    ValidationResult v = Validate(*block);
    if (!v.ok) {
      // A commit quorum over an invalid block needs more than f faults.
      net().Note(id(), "refuse to apply invalid committed block: " + v.reason);
      ++stats_.rejected_blocks;
      stats_.rejection_reasons.push_back(v.reason);
      break;
    }
    Apply(*block);
    progressed = true;
  }
  if (!progressed) return;
  // Only progress on client requests counts; otherwise a leader could keep
  // the view alive with blocks that never serve anyone.
  if (pending_.empty() || pending_.size() < pending_before) ResetTimer();
  DrainBuffered();
  RescanQuorums();
  TryPropose();
}

void Replica::Apply(const Block& block) {
  for (const BlockEntry& e : block.entries) {
    const ClientRequest& req = e.request;
    auto reply = std::make_shared<ReplyMsg>();
    reply->key = req.key();
    reply->replica = config_.index;
    reply->accepted = e.proof.has_value();
    if (e.proof) {
      if (const auto* up = std::get_if<UploadProof>(&*e.proof)) {
        state_.ApplyUpload(*up, req.content);
        reply->index = up->index;
      } else {
        state_.ApplyDelete(std::get<DeletionProof>(*e.proof));
      }
      if (!ledger_->Append(config_.chain_id, *e.proof).accepted()) {
        ++stats_.ledger_rejections;
      }
    } else {
      reply->reason = req.kind == ClientRequest::Kind::kUpload
                          ? "fid already stored"
                          : "fid not stored";
    }
    reply->db_size = state_.accumulator().capacity();
    reply->applied = state_.applied();
    done_.insert(req.key());
    known_.insert(req.key());
    replies_[req.key()] = reply;
    if (!silent()) net().Send(id(), req.client, reply);
  }
  std::erase_if(pending_,
                [this](const ClientRequest& r) { return done_.contains(r.key()); });
  committed_ = block.height;
  last_block_ = block.Hash();
  decided_.erase(block.height);
  decided_voters_.erase(block.height);
  if (lock_ && lock_->height <= committed_) lock_.reset();
  commits_.push_back({committed_, view_, last_block_, state_.StateDigest()});
  std::erase_if(votes_, [this](const auto& kv) {
    return kv.first.height <= committed_;
  });
  std::erase_if(formed_,
                [this](const VoteKey& k) { return k.height <= committed_; });
  OnApplied(block);
}

void Replica::DrainBuffered() {
  std::vector<ProposalMsg> waiting;
  waiting.swap(buffered_);
  for (const ProposalMsg& m : waiting) HandleProposal(m);
}

}  // namespace pirdsn::smr
