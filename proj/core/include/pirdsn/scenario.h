#ifndef PIRDSN_SCENARIO_H_
#define PIRDSN_SCENARIO_H_

// Scenario files: JSON documents declaring the actors, their strategies, the
// network delays, and a sequential workload.

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pirdsn/attacks.h"
#include "pirdsn/bytes.h"
#include "pirdsn/client.h"

namespace pirdsn::scenario {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SpirMinerSpec {
  std::string id;
  attacks::Strategy strategy = attacks::Strategy::kHonest;
};

struct SubnetSpec {
  std::uint32_t n = 4;
  std::uint32_t f = 1;
  std::uint32_t threshold = 1;
  std::vector<attacks::Strategy> strategies;  // one per replica
  std::uint64_t timeout = 0;  // 0: derived from the delay bound
  std::size_t max_batch = 4;
};

enum class Expect : std::uint8_t { kAuto, kSuccess, kAbsent, kDetected };

struct Op {
  client::Operation op = client::Operation::kUpload;
  client::Mode mode = client::Mode::kSpir;
  std::string file;
  std::vector<std::string> targets;  // SPIR miners, in preference order
  Expect expect = Expect::kAuto;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 1;
  std::size_t record_len = 64;
  std::uint64_t min_delay = 1;
  std::uint64_t max_delay = 3;
  double byzantine_drop_rate = 0.0;
  std::uint32_t lwe_dimension = 1024;
  bool plain_backend = false;  // unencrypted queries; tests only
  std::vector<SpirMinerSpec> spir;
  std::optional<SubnetSpec> mpir;
  std::map<std::string, Bytes> files;
  std::vector<Op> workload;
};

// Throws ScenarioError with a description of the first problem found.
Scenario Parse(std::string_view json);
Scenario Load(const std::filesystem::path& path);

// Deterministic content for a file declared only by name and size.
Bytes SyntheticContent(std::uint64_t seed, std::string_view name,
                       std::size_t size);

}  // namespace pirdsn::scenario

#endif  // PIRDSN_SCENARIO_H_
