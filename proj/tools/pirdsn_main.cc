// pirdsn: run simulation scenarios, replay accumulator operations, and
// benchmark private retrieval.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "commands.h"
#include "pirdsn/scenario.h"
#include "pirdsn/sim.h"

namespace {

using namespace pirdsn;

int RunSim(const std::string& path, std::optional<std::uint64_t> seed,
           const std::string& csv_path, const std::string& trace_path) {
  scenario::Scenario sc;
  try {
    sc = scenario::Load(path);
  } catch (const scenario::ScenarioError& e) {
    std::cerr << "pirdsn sim: " << e.what() << '\n';
    return tools::kExitUsage;
  }
  sim::RunOptions options;
  options.seed = seed;
  options.keep_trace = !trace_path.empty();
  const sim::SimResult result = sim::Run(sc, options);

  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    if (!csv) {
      std::cerr << "pirdsn sim: cannot write " << csv_path << '\n';
      return tools::kExitUsage;
    }
    sim::WriteCsv(csv, result);
  } else {
    sim::WriteCsv(std::cout, result);
  }
  if (!trace_path.empty()) {
    std::ofstream trace(trace_path);
    for (const auto& line : result.trace) trace << line << '\n';
  }
  sim::WriteSummary(csv_path.empty() ? std::cerr : std::cout, result);
  return result.ok() ? tools::kExitOk : tools::kExitProtocolFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Private retrieval on a decentralized storage network"};
  app.require_subcommand(1);

  std::string scenario_path, csv_path, trace_path;
  std::optional<std::uint64_t> seed;
  auto* sim_cmd = app.add_subcommand("sim", "Run a scenario on the simulated network");
  sim_cmd->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  sim_cmd->add_option("--seed", seed, "Override the scenario's seed");
  sim_cmd->add_option("--out", csv_path, "Write per-operation metrics CSV here");
  sim_cmd->add_option("--trace", trace_path, "Write the event trace here");

  std::string ops_path;
  auto* demo_cmd = app.add_subcommand("aca-demo", "Replay accumulator operations");
  demo_cmd->add_option("ops", ops_path, "File of 'insert <label>' / 'delete <label>' lines")
      ->required();

  tools::BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time retrievals against database size");
  bench_cmd->add_option("--mode", bench.mode, "spir or mpir")
      ->check(CLI::IsMember({"spir", "mpir"}));
  bench_cmd->add_option("--n", bench.sizes, "Database sizes")
      ->delimiter(',')
      ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{4096}));
  bench_cmd->add_option("--record-len", bench.record_len, "Record length in bytes")
      ->check(CLI::Range(std::size_t{8}, std::size_t{1 << 16}));
  bench_cmd->add_option("--trials", bench.trials, "Retrievals per size")
      ->check(CLI::Range(1, 1000));
  bench_cmd->add_option("--lwe-dimension", bench.lwe_dimension, "LWE secret dimension")
      ->check(CLI::Range(16u, 4096u));
  bench_cmd->add_option("--seed", bench.seed, "Randomness seed");
  bench_cmd->add_option("--out", bench.out_path, "Write CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? tools::kExitOk : tools::kExitUsage;
  }

  try {
    if (*sim_cmd) return RunSim(scenario_path, seed, csv_path, trace_path);
    if (*demo_cmd) return tools::RunAcaDemo(ops_path, std::cout);
    if (*bench_cmd) return tools::RunBench(bench, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "pirdsn: " << e.what() << '\n';
    return tools::kExitProtocolFailure;
  }
  return tools::kExitUsage;
}
