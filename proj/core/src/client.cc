#include "pirdsn/client.h"

#include "pirdsn/database.h"
#include "pirdsn/pir_multi.h"

namespace pirdsn::client {

std::string_view ModeName(Mode m) {
  return m == Mode::kSpir ? "spir" : "mpir";
}

std::string_view OperationName(Operation op) {
  switch (op) {
    case Operation::kUpload: return "upload";
    case Operation::kDelete: return "delete";
    case Operation::kRetrieve: return "retrieve";
  }
  return "?";
}

std::string_view RetrievalOutcomeName(RetrievalOutcome o) {
  switch (o) {
    case RetrievalOutcome::kRecovered: return "Recovered";
    case RetrievalOutcome::kIntegrityFailure: return "IntegrityFailure";
    case RetrievalOutcome::kAbsent: return "Absent";
    case RetrievalOutcome::kRobustRecovered: return "RobustRecovered";
    case RetrievalOutcome::kUnrecoverable: return "Unrecoverable";
    case RetrievalOutcome::kUnavailable: return "Unavailable";
  }
  return "?";
}

Client::Client(ClientConfig config, std::shared_ptr<const ledger::Ledger> ledger,
               std::map<std::string, ActorId> miners)
    : config_(std::move(config)),
      ledger_(std::move(ledger)),
      miners_(std::move(miners)),
      rng_(config_.seed) {}

std::optional<ActorId> Client::MinerActor(const std::string& name) const {
  auto it = miners_.find(name);
  if (it == miners_.end()) return std::nullopt;
  return it->second;
}

void Client::Begin(Operation op, Mode mode, const Fid& fid) {
  if (busy()) throw std::logic_error("client already has an operation in flight");
  report_ = Report{};
  report_.op = op;
  report_.mode = mode;
  report_.fid = fid;
  report_.started = net().now();
  ++timer_token_;
}

void Client::Finish() {
  report_.finished = net().now();
  if (report_.outcome.empty()) {
    report_.outcome = report_.success ? "accepted" : "rejected";
  }
  phase_ = Phase::kIdle;
  ++timer_token_;
  last_ = report_;
}

void Client::Arm(Tick after) { net().SetTimer(id(), after, ++timer_token_); }

// --- Upload and delete ------------------------------------------------------------

void Client::StartUploadSpir(Bytes content, std::vector<std::string> targets) {
  Begin(Operation::kUpload, Mode::kSpir, Fid::OfContent(content));
  upload_content_ = std::move(content);
  targets_ = std::move(targets);
  target_pos_ = 0;
  SendUploadAttempt();
}

void Client::SendUploadAttempt() {
  while (target_pos_ < targets_.size() && !MinerActor(targets_[target_pos_])) {
    report_.rejections.push_back(targets_[target_pos_] + ": unknown miner");
    ++target_pos_;
  }
  if (target_pos_ >= targets_.size()) {
    report_.success = false;
    return Finish();
  }
  ++report_.attempts;
  auto msg = std::make_shared<node::UploadMsg>();
  msg->request_id = active_request_ = NextRequest();
  msg->content = upload_content_;
  net().Send(id(), *MinerActor(targets_[target_pos_]), msg);
  phase_ = Phase::kAwaitOp;
  Arm(config_.op_timeout);
}

void Client::StartDeleteSpir(const Fid& fid, std::optional<std::string> target) {
  Begin(Operation::kDelete, Mode::kSpir, fid);
  if (!target) {
    if (auto entry = ledger_->Lookup(fid)) {
      for (const auto& p : entry->placements) {
        if (miners_.contains(p.miner_id)) {
          target = p.miner_id;
          break;
        }
      }
    }
  }
  if (!target || !MinerActor(*target)) {
    report_.outcome = "absent";
    return Finish();
  }
  targets_ = {*target};
  target_pos_ = 0;
  ++report_.attempts;
  auto msg = std::make_shared<node::DeleteMsg>();
  msg->request_id = active_request_ = NextRequest();
  msg->fid = fid;
  net().Send(id(), *MinerActor(*target), msg);
  phase_ = Phase::kAwaitOp;
  Arm(config_.op_timeout);
}

void Client::OnOpReply(const node::OpReplyMsg& msg) {
  if (phase_ != Phase::kAwaitOp || msg.request_id != active_request_) return;
  const std::string& name = targets_[target_pos_];
  // Success is what the ledger says, not what the miner says.
  const auto placement = ledger_->Lookup(report_.fid, name);
  const bool ok = msg.outcome.accepted &&
                  (report_.op == Operation::kUpload ? placement.has_value()
                                                    : !placement.has_value());
  if (ok) {
    report_.success = true;
    report_.miner = name;
    if (placement) {
      report_.index = placement->index;
      report_.db_size = placement->db_size;
    }
    return Finish();
  }
  report_.rejections.push_back(
      name + ": " + (msg.outcome.reason.empty() ? "rejected" : msg.outcome.reason));
  if (report_.op == Operation::kUpload) {
    ++target_pos_;
    return SendUploadAttempt();
  }
  Finish();
}

void Client::StartUploadMpir(Bytes content) {
  Begin(Operation::kUpload, Mode::kMpir, Fid::OfContent(content));
  upload_content_ = std::move(content);
  active_request_ = NextRequest();
  subnet_replies_.clear();
  ++report_.attempts;
  auto msg = std::make_shared<smr::RequestMsg>();
  msg->request = {smr::ClientRequest::Kind::kUpload, report_.fid,
                  upload_content_, id(), active_request_};
  net().Broadcast(id(), config_.subnet, msg);
  phase_ = Phase::kAwaitReplies;
  Arm(config_.op_timeout);
}

void Client::StartDeleteMpir(const Fid& fid) {
  Begin(Operation::kDelete, Mode::kMpir, fid);
  upload_content_.clear();
  active_request_ = NextRequest();
  subnet_replies_.clear();
  ++report_.attempts;
  auto msg = std::make_shared<smr::RequestMsg>();
  msg->request = {smr::ClientRequest::Kind::kDelete, fid, {}, id(),
                  active_request_};
  net().Broadcast(id(), config_.subnet, msg);
  phase_ = Phase::kAwaitReplies;
  Arm(config_.op_timeout);
}

void Client::OnSubnetReply(const smr::ReplyMsg& msg) {
  if (phase_ != Phase::kAwaitReplies || msg.key.client != id() ||
      msg.key.request != active_request_) {
    return;
  }
  subnet_replies_[msg.replica] = msg;
  const std::size_t n = config_.subnet.size();
  const std::size_t f = (n - 1) / 3;
  std::map<std::pair<bool, std::uint64_t>, std::size_t> groups;
  for (const auto& [replica, r] : subnet_replies_) {
    if (++groups[{r.accepted, r.index}] < f + 1) continue;
    const auto placement = ledger_->Lookup(report_.fid, config_.subnet_chain);
    if (r.accepted) {
      report_.success = report_.op == Operation::kUpload ? placement.has_value()
                                                         : !placement.has_value();
    } else {
      report_.rejections.push_back("subnet: " + r.reason);
    }
    if (placement) {
      report_.index = placement->index;
      report_.db_size = placement->db_size;
    }
    report_.miner = config_.subnet_chain;
    return Finish();
  }
}

// --- Retrieval -------------------------------------------------------------------

void Client::StartRetrieveSpir(const Fid& fid, std::optional<std::string> miner) {
  Begin(Operation::kRetrieve, Mode::kSpir, fid);
  spir_miner_name_ = miner.value_or("");
  BeginSpirRetrieval();
}

void Client::BeginSpirRetrieval() {
  std::optional<ledger::Placement> placement;
  if (!spir_miner_name_.empty()) {
    placement = ledger_->Lookup(report_.fid, spir_miner_name_);
  } else if (auto entry = ledger_->Lookup(report_.fid)) {
    for (const auto& p : entry->placements) {
      if (miners_.contains(p.miner_id)) {
        placement = p;
        break;
      }
    }
  }
  if (!placement || !MinerActor(placement->miner_id)) {
    return RetrievalDone(RetrievalOutcome::kAbsent, "not in directory");
  }
  spir_miner_ = *MinerActor(placement->miner_id);
  report_.miner = placement->miner_id;
  report_.index = placement->index;
  report_.db_size = placement->db_size;
  if (config_.single.backend == pir::Backend::kPlain) return SendSpirQuery(nullptr);
  auto msg = std::make_shared<node::HintRequestMsg>();
  msg->request_id = active_request_ = NextRequest();
  msg->db_size = placement->db_size;
  net().Send(id(), spir_miner_, msg);
  phase_ = Phase::kAwaitHint;
  Arm(config_.pir_timeout);
}

void Client::SendSpirQuery(std::shared_ptr<const pir::LwePublic> pub) {
  try {
    auto [state, query] =
        pir::SQuery(report_.index, report_.db_size,
                    static_cast<std::uint32_t>(config_.record_len),
                    config_.single, std::move(pub), rng_);
    spir_state_ = std::move(state);
    auto msg = std::make_shared<node::SpirQueryMsg>();
    msg->request_id = active_request_ = NextRequest();
    msg->query = std::move(query);
    net().Send(id(), spir_miner_, msg);
  } catch (const std::exception& e) {
    // A hint that does not match the directory is the miner's fault.
    return RetrievalDone(RetrievalOutcome::kIntegrityFailure, e.what());
  }
  ++report_.pir_rounds;
  phase_ = Phase::kAwaitAnswer;
  Arm(config_.pir_timeout);
}

void Client::OnSpirAnswer(const node::SpirAnswerMsg& msg) {
  if (phase_ != Phase::kAwaitAnswer || msg.request_id != active_request_) return;
  report_.records_touched.push_back(msg.answer.records_touched);
  Bytes record;
  try {
    record = pir::SDecrypt(*spir_state_, msg.answer);
  } catch (const std::exception& e) {
    return RetrievalDone(RetrievalOutcome::kIntegrityFailure, e.what());
  }
  Conclude(record, false);
}

void Client::StartRetrieveMpir(const Fid& fid) {
  Begin(Operation::kRetrieve, Mode::kMpir, fid);
  BeginMpirRetrieval();
}

void Client::BeginMpirRetrieval() {
  const auto placement = ledger_->Lookup(report_.fid, config_.subnet_chain);
  if (!placement) {
    return RetrievalDone(RetrievalOutcome::kAbsent, "not in directory");
  }
  report_.miner = config_.subnet_chain;
  report_.index = placement->index;
  report_.db_size = placement->db_size;
  const std::uint64_t applied = ledger_->Height(config_.subnet_chain);
  auto [state, queries] = pir::MQuery(
      placement->index, placement->db_size,
      static_cast<std::uint32_t>(config_.record_len),
      static_cast<std::uint32_t>(config_.subnet.size()), config_.threshold,
      rng_);
  mpir_state_ = state;
  multi_answers_.clear();
  active_request_ = NextRequest();
  for (std::size_t l = 0; l < queries.size(); ++l) {
    auto msg = std::make_shared<node::MpirQueryMsg>();
    msg->request_id = active_request_;
    msg->query = std::move(queries[l]);
    msg->applied = applied;
    net().Send(id(), config_.subnet[l], msg);
  }
  ++report_.pir_rounds;
  phase_ = Phase::kAwaitMultiAnswers;
  Arm(config_.pir_timeout);
}

void Client::FinishMpirRetrieval() {
  std::vector<pir::MultiAnswer> answers;
  for (auto& [server, a] : multi_answers_) {
    report_.records_touched.push_back(a.records_touched);
    answers.push_back(a);
  }
  if (answers.size() < mpir_state_->threshold + 1) {
    return RetrievalDone(RetrievalOutcome::kUnavailable, "too few answers");
  }
  const auto result = pir::MReconstruct(*mpir_state_, answers);
  report_.faulty = result.faulty;
  if (!result.ok) {
    return RetrievalDone(RetrievalOutcome::kUnrecoverable,
                         "more corrupt answers than the code corrects");
  }
  Conclude(result.record, true);
}

void Client::OnRefusal(const node::RefusalMsg& msg) {
  if (msg.request_id != active_request_) return;
  if (phase_ != Phase::kAwaitHint && phase_ != Phase::kAwaitAnswer &&
      phase_ != Phase::kAwaitMultiAnswers) {
    return;
  }
  if (report_.refreshes > 0) {
    return RetrievalDone(RetrievalOutcome::kUnavailable, msg.reason);
  }
  // One directory refresh, then start over.
  ++report_.refreshes;
  ++timer_token_;
  if (report_.mode == Mode::kSpir) {
    BeginSpirRetrieval();
  } else {
    BeginMpirRetrieval();
  }
}

void Client::Conclude(const Bytes& record, bool robust) {
  std::optional<Bytes> file;
  try {
    file = pir::Database::DecodeRecord(record);
  } catch (const DecodeError&) {
    return RetrievalDone(RetrievalOutcome::kIntegrityFailure, "malformed record");
  }
  if (!file) return RetrievalDone(RetrievalOutcome::kAbsent, "vacant record");
  if (Fid::OfContent(*file) != report_.fid) {
    return RetrievalDone(RetrievalOutcome::kIntegrityFailure, "fid mismatch");
  }
  report_.content = std::move(*file);
  RetrievalDone(robust ? RetrievalOutcome::kRobustRecovered
                       : RetrievalOutcome::kRecovered);
}

void Client::RetrievalDone(RetrievalOutcome outcome, std::string detail) {
  report_.retrieval = outcome;
  report_.outcome = std::string(RetrievalOutcomeName(outcome));
  report_.success = outcome == RetrievalOutcome::kRecovered ||
                    outcome == RetrievalOutcome::kRobustRecovered;
  if (!detail.empty()) {
    report_.rejections.push_back(
        (report_.miner.empty() ? std::string("client") : report_.miner) + ": " +
        detail);
  }
  Finish();
}

// --- Dispatch --------------------------------------------------------------------

void Client::OnMessage(ActorId from, const netsim::MessagePtr& msg) {
  if (auto* m = dynamic_cast<const node::OpReplyMsg*>(msg.get())) {
    OnOpReply(*m);
  } else if (auto* m = dynamic_cast<const smr::ReplyMsg*>(msg.get())) {
    OnSubnetReply(*m);
  } else if (auto* m = dynamic_cast<const node::HintMsg*>(msg.get())) {
    if (phase_ == Phase::kAwaitHint && m->request_id == active_request_ &&
        from == spir_miner_) {
      SendSpirQuery(m->pub);
    }
  } else if (auto* m = dynamic_cast<const node::SpirAnswerMsg*>(msg.get())) {
    if (from == spir_miner_) OnSpirAnswer(*m);
  } else if (auto* m = dynamic_cast<const node::MpirAnswerMsg*>(msg.get())) {
    if (phase_ != Phase::kAwaitMultiAnswers ||
        m->request_id != active_request_) {
      return;
    }
    for (std::size_t l = 0; l < config_.subnet.size(); ++l) {
      if (config_.subnet[l] != from) continue;
      pir::MultiAnswer a = m->answer;
      a.server_id = static_cast<std::uint32_t>(l + 1);  // trust the transport
      multi_answers_[a.server_id] = std::move(a);
    }
    if (multi_answers_.size() == config_.subnet.size()) FinishMpirRetrieval();
  } else if (auto* m = dynamic_cast<const node::RefusalMsg*>(msg.get())) {
    OnRefusal(*m);
  }
}

void Client::OnTimer(std::uint64_t token) {
  if (token != timer_token_) return;
  switch (phase_) {
    case Phase::kIdle:
      return;
    case Phase::kAwaitOp:
      report_.rejections.push_back(targets_[target_pos_] + ": no reply");
      if (report_.op == Operation::kUpload) {
        ++target_pos_;
        return SendUploadAttempt();
      }
      return Finish();
    case Phase::kAwaitReplies: {
      if (report_.attempts >= 3) {
        report_.rejections.push_back("subnet: no quorum of replies");
        return Finish();
      }
      // Replicas deduplicate; a resend only recovers lost replies.
      ++report_.attempts;
      auto msg = std::make_shared<smr::RequestMsg>();
      msg->request = {report_.op == Operation::kUpload
                          ? smr::ClientRequest::Kind::kUpload
                          : smr::ClientRequest::Kind::kDelete,
                      report_.fid, upload_content_, id(), active_request_};
      net().Broadcast(id(), config_.subnet, msg);
      return Arm(config_.op_timeout);
    }
    case Phase::kAwaitHint:
    case Phase::kAwaitAnswer:
      return RetrievalDone(RetrievalOutcome::kUnavailable, "no answer");
    case Phase::kAwaitMultiAnswers:
      return FinishMpirRetrieval();
  }
}

}  // namespace pirdsn::client
