#include "pirdsn/node.h"

#include <algorithm>

namespace pirdsn::node {
namespace {

void WriteOutcome(ByteWriter& w, const OpOutcome& o) {
  w.U8(o.accepted);
  w.U8(o.rejection ? static_cast<std::uint8_t>(*o.rejection) + 1 : 0);
  w.String(o.reason);
  w.U64(o.index);
  w.U64(o.db_size);
}

bool SameWords(const pir::MultiAnswer& a, const pir::MultiAnswer& b) {
  return a.words == b.words;
}

void OffsetOneWord(pir::MultiAnswer& a, Rng& rng) {
  const std::uint64_t p = galois::kDefaultModulus;
  auto& word = a.words[rng.Uniform(a.words.size())];
  word = static_cast<std::uint32_t>((word + 1 + rng.Uniform(p - 1)) % p);
}

}  // namespace

Bytes UploadMsg::Encode() const {
  ByteWriter w;
  w.U64(request_id);
  w.LengthPrefixed(content);
  return std::move(w).Take();
}

Bytes DeleteMsg::Encode() const {
  ByteWriter w;
  w.U64(request_id);
  w.Put(fid.digest);
  return std::move(w).Take();
}

Bytes OpReplyMsg::Encode() const {
  ByteWriter w;
  w.U64(request_id);
  WriteOutcome(w, outcome);
  return std::move(w).Take();
}

Bytes HintRequestMsg::Encode() const {
  ByteWriter w;
  w.U64(request_id);
  w.U64(db_size);
  return std::move(w).Take();
}

Bytes HintMsg::Encode() const {
  ByteWriter w;
  w.U64(request_id);
  w.Put(pub->matrix_seed);
  w.U64(pub->db_size);
  w.U32(pub->record_len);
  w.U32(pub->dimension);
  for (std::uint32_t x : pub->hint) w.U32(x);
  return std::move(w).Take();
}

Bytes MpirQueryMsg::Encode() const {
  ByteWriter w;
  w.U64(request_id);
  w.U64(applied);
  w.Raw(pir::SerializeMultiQuery(query));
  return std::move(w).Take();
}

Bytes RefusalMsg::Encode() const {
  ByteWriter w;
  w.U64(request_id);
  w.String(reason);
  w.U64(db_size);
  w.U64(applied);
  return std::move(w).Take();
}

pir::MultiAnswer CorruptMultiAnswer(const pir::Database& db,
                                    const pir::MultiQuery& query,
                                    pir::MultiAnswer honest, Corruption how,
                                    Rng& rng) {
  const std::uint64_t p = galois::kDefaultModulus;
  pir::MultiAnswer bad = honest;
  if (bad.words.empty()) return bad;
  switch (how) {
    case Corruption::kRandomWords:
      for (auto& w : bad.words) w = static_cast<std::uint32_t>(rng.Uniform(p));
      break;
    case Corruption::kSingleWordOffset:
      OffsetOneWord(bad, rng);
      break;
    case Corruption::kConstantDelta: {
      const std::uint64_t delta = 1 + rng.Uniform(p - 1);
      for (auto& w : bad.words) w = static_cast<std::uint32_t>((w + delta) % p);
      break;
    }
    case Corruption::kPermutedDatabase: {
      // Answer over the database rotated by one record.
      pir::Database rotated(db.size(), db.record_len());
      for (std::uint64_t i = 1; i <= db.size(); ++i) {
        rotated.SetRecord(i % db.size() + 1, db.Record(i));
      }
      bad = pir::MAnswer(rotated, query);
      break;
    }
    case Corruption::kZero:
      std::fill(bad.words.begin(), bad.words.end(), 0);
      break;
  }
  if (SameWords(bad, honest)) OffsetOneWord(bad, rng);
  return bad;
}

pir::MultiAnswer CorruptMultiAnswer(const pir::Database& db,
                                    const pir::MultiQuery& query,
                                    pir::MultiAnswer honest, Rng& rng) {
  const auto how = static_cast<Corruption>(rng.Uniform(5));
  return CorruptMultiAnswer(db, query, std::move(honest), how, rng);
}

pir::SingleAnswer TamperSingleAnswer(const pir::SingleAnswer& honest,
                                     Rng& rng) {
  Bytes wire = pir::SerializeAnswer(honest);
  const std::size_t payload_bytes = 4 * honest.payload.size();
  if (payload_bytes < 16) throw std::invalid_argument("answer too short");
  const std::size_t start = wire.size() - payload_bytes;
  const std::size_t offset = start + rng.Uniform(payload_bytes - 16 + 1);
  std::span<std::uint8_t> window(wire.data() + offset, 16);
  const Bytes before(window.begin(), window.end());
  do {
    rng.Fill(window);
  } while (std::equal(window.begin(), window.end(), before.begin()));
  pir::SingleAnswer out = pir::DeserializeAnswer(wire);
  out.records_touched = honest.records_touched;
  return out;
}

// --- SpirMiner --------------------------------------------------------------------

SpirMiner::SpirMiner(MinerConfig config, std::shared_ptr<ledger::Ledger> ledger)
    : config_(std::move(config)),
      ledger_(std::move(ledger)),
      rng_(config_.seed),
      matrix_seed_(rng_.NextDigest()),
      state_(config_.id, config_.record_len) {}

OpOutcome SpirMiner::HandleUpload(Bytes content) {
  OpOutcome out;
  if (content.empty()) {
    out.reason = "empty file";
    return out;
  }
  if (content.size() > pir::Database::MaxFileSize(config_.record_len)) {
    out.reason = "file exceeds record length";
    return out;
  }
  const Fid fid = Fid::OfContent(content);
  const auto& acc = state_.accumulator();
  if (acc.Contains(fid)) {
    out.accepted = true;
    out.reason = "fid already stored";
    out.index = acc.IndexOf(fid);
    out.db_size = acc.capacity();
    return out;
  }
  if (attacks::ForgesUploads(config_.strategy)) {
    if (auto fake = attacks::ForgeForUpload(config_.strategy, acc, fid,
                                            state_.chain_head(), rng_)) {
      ++stats_.forged;
      out.forged = true;
      const auto r = ledger_->Append(config_.id, *fake);
      out.accepted = r.accepted();
      out.rejection = r.outcome.reason;
      if (!r.accepted()) {
        ++stats_.forged_rejected;
        out.reason = std::string(proofs::RejectionName(*r.outcome.reason));
      }
      return out;
    }
  }
  aca::Accumulator next = acc;
  auto proof = proofs::MakeUploadProof(next, fid, state_.chain_head());
  const auto r = ledger_->Append(config_.id, proof);
  if (!r.accepted()) {
    out.rejection = r.outcome.reason;
    out.reason = std::string(proofs::RejectionName(*r.outcome.reason));
    return out;
  }
  state_.ApplyUpload(proof, std::move(content));
  out.accepted = true;
  out.index = proof.index;
  out.db_size = state_.accumulator().capacity();
  return out;
}

OpOutcome SpirMiner::HandleDelete(const Fid& fid) {
  OpOutcome out;
  const auto& acc = state_.accumulator();
  if (!acc.Contains(fid)) {
    out.reason = "fid not stored";
    out.rejection = proofs::Rejection::kFidAbsent;
    return out;
  }
  if (attacks::ForgesDeletions(config_.strategy)) {
    if (auto fake = attacks::ForgeForDelete(config_.strategy, acc, fid,
                                            state_.chain_head(), rng_)) {
      ++stats_.forged;
      out.forged = true;
      const auto r = ledger_->Append(config_.id, *fake);
      out.accepted = r.accepted();
      out.rejection = r.outcome.reason;
      if (!r.accepted()) {
        ++stats_.forged_rejected;
        out.reason = std::string(proofs::RejectionName(*r.outcome.reason));
      }
      return out;
    }
  }
  aca::Accumulator next = acc;
  auto proof = proofs::MakeDeletionProof(next, fid, state_.chain_head());
  const auto r = ledger_->Append(config_.id, proof);
  if (!r.accepted()) {
    out.rejection = r.outcome.reason;
    out.reason = std::string(proofs::RejectionName(*r.outcome.reason));
    return out;
  }
  state_.ApplyDelete(proof);
  out.accepted = true;
  out.db_size = state_.accumulator().capacity();
  return out;
}

std::shared_ptr<const pir::LwePublic> SpirMiner::Hint(std::uint64_t db_size) {
  auto snapshot = state_.SnapshotForSize(db_size);
  if (!snapshot) return nullptr;
  auto it = hints_.find(snapshot.get());
  if (it != hints_.end()) return it->second.second;
  auto pub = std::make_shared<const pir::LwePublic>(
      pir::LweSetup(*snapshot, matrix_seed_, config_.lwe));
  if (hints_.size() >= 2) hints_.clear();
  hints_[snapshot.get()] = {snapshot, pub};
  return pub;
}

pir::SingleAnswer SpirMiner::HandleQuery(const pir::SingleQuery& query) {
  auto snapshot = state_.SnapshotForSize(query.db_size);
  if (!snapshot) throw std::out_of_range("no snapshot of the queried size");
  if (query.backend == pir::Backend::kLwe && query.matrix_seed != matrix_seed_) {
    throw std::invalid_argument("query built for another matrix");
  }
  pir::SingleAnswer answer = pir::SAnswer(*snapshot, query);
  ++stats_.answers;
  if (config_.strategy == attacks::Strategy::kCorruptPirAnswer) {
    ++stats_.corrupted_answers;
    return TamperSingleAnswer(answer, rng_);
  }
  return answer;
}

void SpirMiner::OnMessage(ActorId from, const netsim::MessagePtr& msg) {
  auto refuse = [&](std::uint64_t request_id, std::string reason) {
    ++stats_.refusals;
    auto r = std::make_shared<RefusalMsg>();
    r->request_id = request_id;
    r->reason = std::move(reason);
    r->db_size = state_.accumulator().capacity();
    r->applied = state_.applied();
    net().Send(id(), from, r);
  };
  if (auto* m = dynamic_cast<const UploadMsg*>(msg.get())) {
    auto reply = std::make_shared<OpReplyMsg>();
    reply->request_id = m->request_id;
    reply->outcome = HandleUpload(m->content);
    if (reply->outcome.forged) net().Note(id(), "forged upload proof");
    net().Send(id(), from, reply);
  } else if (auto* m = dynamic_cast<const DeleteMsg*>(msg.get())) {
    auto reply = std::make_shared<OpReplyMsg>();
    reply->request_id = m->request_id;
    reply->outcome = HandleDelete(m->fid);
    if (reply->outcome.forged) net().Note(id(), "forged deletion proof");
    net().Send(id(), from, reply);
  } else if (auto* m = dynamic_cast<const HintRequestMsg*>(msg.get())) {
    auto pub = Hint(m->db_size);
    if (!pub) return refuse(m->request_id, "stale database size");
    auto reply = std::make_shared<HintMsg>();
    reply->request_id = m->request_id;
    reply->pub = std::move(pub);
    net().Send(id(), from, reply);
  } else if (auto* m = dynamic_cast<const SpirQueryMsg*>(msg.get())) {
    auto reply = std::make_shared<SpirAnswerMsg>();
    reply->request_id = m->request_id;
    try {
      reply->answer = HandleQuery(m->query);
    } catch (const std::out_of_range&) {
      return refuse(m->request_id, "stale database size");
    } catch (const std::invalid_argument& e) {
      return refuse(m->request_id, e.what());
    }
    net().Send(id(), from, reply);
  }
}

// --- MpirMiner --------------------------------------------------------------------

MpirMiner::MpirMiner(smr::ReplicaConfig config,
                     std::shared_ptr<const smr::Authenticator> auth,
                     std::shared_ptr<ledger::Ledger> ledger)
    : smr::Replica(config, std::move(auth), std::move(ledger)),
      rng_(Rng(config.seed).Fork(1000 + config.index)) {}

bool MpirMiner::OnOtherMessage(ActorId from, const netsim::MessagePtr& msg) {
  auto query = std::dynamic_pointer_cast<const MpirQueryMsg>(msg);
  if (!query) return false;
  if (state().applied() < query->applied) {
    deferred_.emplace_back(from, std::move(query));
    return true;
  }
  Answer(from, *query);
  return true;
}

void MpirMiner::OnApplied(const smr::Block&) {
  std::vector<std::pair<ActorId, std::shared_ptr<const MpirQueryMsg>>> ready;
  std::erase_if(deferred_, [&](const auto& d) {
    if (state().applied() < d.second->applied) return false;
    ready.push_back(d);
    return true;
  });
  for (const auto& [from, q] : ready) Answer(from, *q);
}

void MpirMiner::Answer(ActorId to, const MpirQueryMsg& msg) {
  auto refuse = [&](std::string reason) {
    ++stats_.refusals;
    auto r = std::make_shared<RefusalMsg>();
    r->request_id = msg.request_id;
    r->reason = std::move(reason);
    r->db_size = state().accumulator().capacity();
    r->applied = state().applied();
    net().Send(id(), to, r);
  };
  if (state().applied() != msg.applied) return refuse("stale subnet state");
  auto snapshot = state().SnapshotForSize(msg.query.db_size);
  if (!snapshot) return refuse("stale database size");
  if (msg.query.server_id != config().index + 1) {
    return refuse("query addressed to another replica");
  }
  auto reply = std::make_shared<MpirAnswerMsg>();
  reply->request_id = msg.request_id;
  try {
    reply->answer = pir::MAnswer(*snapshot, msg.query);
  } catch (const std::invalid_argument& e) {
    return refuse(e.what());
  }
  ++stats_.answers;
  if (config().strategy == attacks::Strategy::kCorruptPirAnswer) {
    ++stats_.corrupted_answers;
    reply->answer =
        CorruptMultiAnswer(*snapshot, msg.query, reply->answer, rng_);
  }
  net().Send(id(), to, reply);
}

}  // namespace pirdsn::node
