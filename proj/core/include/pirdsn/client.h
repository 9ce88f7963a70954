#ifndef PIRDSN_CLIENT_H_
#define PIRDSN_CLIENT_H_

// Client workflows over the simulated transport: upload and delete (to a
// single miner or a replicated subnet) and private retrieval by fid. Every
// retrieval is exactly one PIR round; the fid check decides whether the
// returned bytes are accepted.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pirdsn/ledger.h"
#include "pirdsn/netsim.h"
#include "pirdsn/node.h"
#include "pirdsn/pir_single.h"

namespace pirdsn::client {

using aca::Fid;
using netsim::ActorId;
using netsim::Tick;

enum class Mode : std::uint8_t { kSpir, kMpir };
enum class Operation : std::uint8_t { kUpload, kDelete, kRetrieve };

enum class RetrievalOutcome : std::uint8_t {
  kRecovered,
  kIntegrityFailure,
  kAbsent,
  kRobustRecovered,
  kUnrecoverable,
  kUnavailable,  // no answer before the deadline
};

std::string_view ModeName(Mode m);
std::string_view OperationName(Operation op);
std::string_view RetrievalOutcomeName(RetrievalOutcome o);

struct Report {
  Operation op = Operation::kUpload;
  Mode mode = Mode::kSpir;
  Fid fid;
  bool success = false;
  std::string outcome;
  std::optional<RetrievalOutcome> retrieval;
  Bytes content;  // retrievals that passed the fid check
  std::set<std::uint32_t> faulty;  // 1-based replica ids blamed by decoding
  std::vector<std::string> rejections;  // "miner: reason", verbatim
  std::string miner;
  std::uint64_t index = 0;
  std::uint64_t db_size = 0;
  std::uint64_t attempts = 0;
  std::uint64_t pir_rounds = 0;
  std::uint64_t refreshes = 0;
  std::vector<std::uint64_t> records_touched;  // one entry per answer
  Tick started = 0;
  Tick finished = 0;
  Tick latency() const { return finished - started; }
};

struct ClientConfig {
  std::size_t record_len = 64;
  pir::SingleParams single;
  std::vector<ActorId> subnet;  // MPIR replicas by index
  std::uint32_t threshold = 1;  // MPIR privacy threshold t
  std::string subnet_chain = "mpir";
  Tick op_timeout = 400;   // per miner attempt or per subnet request
  Tick pir_timeout = 100;  // per PIR phase
  std::uint64_t seed = 7;
};

class Client : public netsim::Actor {
 public:
  Client(ClientConfig config, std::shared_ptr<const ledger::Ledger> ledger,
         std::map<std::string, ActorId> miners);

  void OnMessage(ActorId from, const netsim::MessagePtr& msg) override;
  void OnTimer(std::uint64_t token) override;

  // Tries each target in turn until one miner's proof is on the ledger.
  void StartUploadSpir(Bytes content, std::vector<std::string> targets);
  // Without a target, the miner holding the fid per the directory.
  void StartDeleteSpir(const Fid& fid, std::optional<std::string> target);
  void StartRetrieveSpir(const Fid& fid, std::optional<std::string> miner);
  void StartUploadMpir(Bytes content);
  void StartDeleteMpir(const Fid& fid);
  void StartRetrieveMpir(const Fid& fid);

  bool busy() const { return phase_ != Phase::kIdle; }
  // The last finished operation.
  const std::optional<Report>& last() const { return last_; }

 private:
  enum class Phase : std::uint8_t {
    kIdle,
    kAwaitOp,
    kAwaitReplies,
    kAwaitHint,
    kAwaitAnswer,
    kAwaitMultiAnswers,
  };

  void Begin(Operation op, Mode mode, const Fid& fid);
  void Finish();
  void Arm(Tick after);
  std::uint64_t NextRequest() { return ++request_counter_; }
  std::optional<ActorId> MinerActor(const std::string& name) const;

  void SendUploadAttempt();
  void OnOpReply(const node::OpReplyMsg& msg);
  void OnSubnetReply(const smr::ReplyMsg& msg);
  void BeginSpirRetrieval();
  void SendSpirQuery(std::shared_ptr<const pir::LwePublic> pub);
  void OnSpirAnswer(const node::SpirAnswerMsg& msg);
  void BeginMpirRetrieval();
  void FinishMpirRetrieval();
  void OnRefusal(const node::RefusalMsg& msg);
  void RetrievalDone(RetrievalOutcome outcome, std::string detail = {});
  // Shared tail for both modes: decodes the record and applies the fid
  // check.
  void Conclude(const Bytes& record, bool robust);

  ClientConfig config_;
  std::shared_ptr<const ledger::Ledger> ledger_;
  std::map<std::string, ActorId> miners_;
  Rng rng_;

  Phase phase_ = Phase::kIdle;
  Report report_;
  std::optional<Report> last_;
  std::uint64_t request_counter_ = 0;
  std::uint64_t active_request_ = 0;
  std::uint64_t timer_token_ = 0;

  Bytes upload_content_;
  std::vector<std::string> targets_;
  std::size_t target_pos_ = 0;
  std::map<std::uint32_t, smr::ReplyMsg> subnet_replies_;

  ActorId spir_miner_ = 0;
  std::string spir_miner_name_;
  std::optional<pir::SingleClientState> spir_state_;
  std::optional<pir::MultiClientState> mpir_state_;
  std::map<std::uint32_t, pir::MultiAnswer> multi_answers_;
};

}  // namespace pirdsn::client

#endif  // PIRDSN_CLIENT_H_
