#include "pirdsn/scenario.h"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pirdsn/database.h"
#include "pirdsn/rng.h"

namespace pirdsn::scenario {
namespace {

using nlohmann::json;

attacks::Strategy StrategyOf(const json& j, std::string_view where) {
  const std::string name = j.get<std::string>();
  auto s = attacks::ParseStrategy(name);
  if (!s) throw ScenarioError(std::string(where) + ": unknown strategy '" + name + "'");
  return *s;
}

client::Mode ModeOf(const std::string& s) {
  if (s == "spir") return client::Mode::kSpir;
  if (s == "mpir") return client::Mode::kMpir;
  throw ScenarioError("unknown mode '" + s + "'");
}

client::Operation OperationOf(const std::string& s) {
  if (s == "upload") return client::Operation::kUpload;
  if (s == "delete") return client::Operation::kDelete;
  if (s == "retrieve") return client::Operation::kRetrieve;
  throw ScenarioError("unknown operation '" + s + "'");
}

Expect ExpectOf(const std::string& s) {
  if (s == "success") return Expect::kSuccess;
  if (s == "absent") return Expect::kAbsent;
  if (s == "detected") return Expect::kDetected;
  throw ScenarioError("unknown expectation '" + s + "'");
}

Scenario FromJson(const json& doc) {
  Scenario sc;
  sc.name = doc.value("name", "scenario");
  sc.seed = doc.value("seed", std::uint64_t{1});
  sc.record_len = doc.value("record_len", std::size_t{64});
  if (sc.record_len < 8) throw ScenarioError("record_len must be at least 8");
  if (doc.contains("delay")) {
    sc.min_delay = doc["delay"].value("min", std::uint64_t{1});
    sc.max_delay = doc["delay"].value("max", std::uint64_t{3});
  }
  if (sc.min_delay < 1 || sc.min_delay > sc.max_delay) {
    throw ScenarioError("delay bounds must satisfy 1 <= min <= max");
  }
  sc.byzantine_drop_rate = doc.value("byzantine_drop_rate", 0.0);
  if (sc.byzantine_drop_rate < 0 || sc.byzantine_drop_rate > 1) {
    throw ScenarioError("byzantine_drop_rate outside [0, 1]");
  }
  sc.lwe_dimension = doc.value("lwe_dimension", std::uint32_t{1024});
  sc.plain_backend = doc.value("plain_backend", false);

  for (const auto& m : doc.value("spir_miners", json::array())) {
    SpirMinerSpec spec;
    spec.id = m.at("id").get<std::string>();
    if (spec.id == "mpir") throw ScenarioError("miner id 'mpir' is reserved");
    if (m.contains("strategy")) spec.strategy = StrategyOf(m["strategy"], spec.id);
    if (spec.strategy == attacks::Strategy::kSilentLeader ||
        spec.strategy == attacks::Strategy::kEquivocate) {
      throw ScenarioError(spec.id + ": strategy only applies to a subnet");
    }
    for (const auto& other : sc.spir) {
      if (other.id == spec.id) throw ScenarioError("duplicate miner id " + spec.id);
    }
    sc.spir.push_back(spec);
  }

  if (doc.contains("mpir")) {
    const json& m = doc["mpir"];
    SubnetSpec sub;
    sub.f = m.value("f", std::uint32_t{1});
    sub.n = m.value("n", 3 * sub.f + 1);
    sub.threshold = m.value("threshold", sub.f);
    sub.timeout = m.value("timeout", std::uint64_t{0});
    sub.max_batch = m.value("max_batch", std::size_t{4});
    if (sub.n != 3 * sub.f + 1) throw ScenarioError("subnet requires N = 3f + 1");
    if (sub.threshold < 1 || sub.threshold >= sub.n) {
      throw ScenarioError("privacy threshold must lie in [1, N)");
    }
    sub.strategies.assign(sub.n, attacks::Strategy::kHonest);
    if (m.contains("replicas")) {
      const auto& reps = m["replicas"];
      if (reps.size() != sub.n) throw ScenarioError("replicas list must have N entries");
      for (std::uint32_t i = 0; i < sub.n; ++i) {
        sub.strategies[i] = StrategyOf(reps[i], "replica " + std::to_string(i));
      }
    }
    std::uint32_t faulty = 0;
    for (auto s : sub.strategies) faulty += s != attacks::Strategy::kHonest;
    if (faulty > sub.f) throw ScenarioError("more Byzantine replicas than f");
    sc.mpir = sub;
  }

  const json files = doc.value("files", json::object());
  for (const auto& [name, spec] : files.items()) {
    Bytes content;
    if (spec.is_string()) {
      const std::string s = spec.get<std::string>();
      content.assign(s.begin(), s.end());
    } else {
      content = SyntheticContent(sc.seed, name, spec.value("size", std::size_t{16}));
    }
    if (content.empty()) throw ScenarioError("file " + name + " is empty");
    if (content.size() > pir::Database::MaxFileSize(sc.record_len)) {
      throw ScenarioError("file " + name + " does not fit in a record");
    }
    sc.files[name] = std::move(content);
  }

  for (const auto& o : doc.value("workload", json::array())) {
    Op op;
    op.op = OperationOf(o.at("op").get<std::string>());
    op.mode = ModeOf(o.value("mode", std::string("spir")));
    op.file = o.at("file").get<std::string>();
    if (!sc.files.contains(op.file)) {
      throw ScenarioError("workload references undeclared file " + op.file);
    }
    op.targets = o.value("targets", std::vector<std::string>{});
    for (const auto& t : op.targets) {
      bool known = false;
      for (const auto& m : sc.spir) known |= m.id == t;
      if (!known) throw ScenarioError("unknown target miner " + t);
    }
    if (op.mode == client::Mode::kMpir && !sc.mpir) {
      throw ScenarioError("mpir operation without a subnet");
    }
    if (op.mode == client::Mode::kSpir && op.op == client::Operation::kUpload &&
        op.targets.empty()) {
      throw ScenarioError("spir upload needs at least one target");
    }
    if (o.contains("expect")) op.expect = ExpectOf(o["expect"].get<std::string>());
    sc.workload.push_back(std::move(op));
  }
  return sc;
}

}  // namespace

Scenario Parse(std::string_view text) {
  try {
    return FromJson(json::parse(text));
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("malformed scenario: ") + e.what());
  }
}

Scenario Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return Parse(buf.str());
}

Bytes SyntheticContent(std::uint64_t seed, std::string_view name,
                       std::size_t size) {
  ByteWriter w;
  w.U64(seed);
  w.String(name);
  Rng rng(Sha256Uncounted(w.bytes()));
  Bytes out(size);
  rng.Fill(out);
  if (!out.empty() && std::all_of(out.begin(), out.end(),
                                  [](std::uint8_t b) { return b == 0; })) {
    out[0] = 1;
  }
  return out;
}

}  // namespace pirdsn::scenario
