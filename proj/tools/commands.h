#ifndef PIRDSN_TOOLS_COMMANDS_H_
#define PIRDSN_TOOLS_COMMANDS_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pirdsn::tools {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitProtocolFailure = 1;
inline constexpr int kExitUsage = 2;

int RunAcaDemo(const std::string& ops_path, std::ostream& out);

struct BenchOptions {
  std::string mode = "spir";
  std::vector<std::uint64_t> sizes{64, 128, 256, 512};
  std::size_t record_len = 1024;
  int trials = 5;
  std::uint32_t lwe_dimension = 1024;
  std::uint64_t seed = 1;
  std::string out_path;
};

struct BenchRow {
  std::string mode;
  std::uint64_t n = 0;
  std::size_t record_len = 0;
  double wall_ms = 0;
  std::uint64_t hash_count = 0;
  std::string outcome;
  std::uint64_t pir_rounds = 0;
  std::vector<std::uint64_t> records_touched;  // per answering server
};

std::vector<BenchRow> BenchRetrieval(const BenchOptions& options);

struct LineFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

// Ordinary least squares of y on x.
LineFit FitLine(const std::vector<double>& x, const std::vector<double>& y);

int RunBench(const BenchOptions& options, std::ostream& out);

}  // namespace pirdsn::tools

#endif  // PIRDSN_TOOLS_COMMANDS_H_
