#include <benchmark/benchmark.h>

#include <memory>
#include <string>
#include <vector>

#include "pirdsn/aca.h"
#include "pirdsn/database.h"
#include "pirdsn/hash.h"
#include "pirdsn/pir_multi.h"
#include "pirdsn/pir_single.h"
#include "pirdsn/proofs.h"
#include "pirdsn/rng.h"

namespace {

using namespace pirdsn;

aca::Fid NthFid(std::int64_t i) {
  return aca::Fid{Sha256Uncounted(AsBytes("bench-" + std::to_string(i)))};
}

void BM_AcaInsert(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  for (auto _ : state) {
    state.PauseTiming();
    aca::Accumulator acc = aca::Accumulator::Gen();
    state.ResumeTiming();
    for (std::int64_t i = 0; i < n; ++i) acc.Insert(NthFid(i));
    benchmark::DoNotOptimize(acc.roots());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_AcaInsert)->RangeMultiplier(4)->Range(64, 4096);

void BM_VerifyUploadTransition(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  aca::Accumulator acc = aca::Accumulator::Gen();
  for (std::int64_t i = 0; i < n; ++i) acc.Insert(NthFid(i));
  const proofs::RootVector before = acc.roots();
  const proofs::UploadProof proof =
      proofs::MakeUploadProof(acc, NthFid(n), Digest{});
  for (auto _ : state) {
    benchmark::DoNotOptimize(proofs::VerifyUploadTransition(proof, before));
  }
}
BENCHMARK(BM_VerifyUploadTransition)->RangeMultiplier(4)->Range(16, 4096);

pir::Database RandomDb(std::uint64_t n, std::size_t record_len) {
  pir::Database db(n, record_len);
  Rng rng(n);
  Bytes rec(record_len);
  for (std::uint64_t i = 1; i <= n; ++i) {
    rng.Fill(rec);
    db.SetRecord(i, rec);
  }
  return db;
}

void BM_SAnswer(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  const pir::Database db = RandomDb(n, 1024);
  auto pub = std::make_shared<const pir::LwePublic>(
      pir::LweSetup(db, Sha256Uncounted(AsBytes("matrix"))));
  Rng rng(7);
  auto [client, query] = pir::SQuery(1, n, 1024, {}, pub, rng);
  for (auto _ : state) benchmark::DoNotOptimize(pir::SAnswer(db, query));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(n) * 1024);
}
BENCHMARK(BM_SAnswer)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void BM_MAnswer(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  const pir::Database db = RandomDb(n, 1024);
  Rng rng(7);
  auto [client, queries] = pir::MQuery(1, n, 1024, 4, 1, rng);
  for (auto _ : state) benchmark::DoNotOptimize(pir::MAnswer(db, queries[0]));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(n) * 1024);
}
BENCHMARK(BM_MAnswer)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
