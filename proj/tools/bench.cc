#include <chrono>
#include <fstream>
#include <map>
#include <ostream>

#include "commands.h"
#include "pirdsn/aca.h"
#include "pirdsn/database.h"
#include "pirdsn/hash.h"
#include "pirdsn/pir_multi.h"
#include "pirdsn/pir_single.h"
#include "pirdsn/rng.h"

namespace pirdsn::tools {
namespace {

constexpr std::uint32_t kServers = 4;
constexpr std::uint32_t kThreshold = 1;

}  // namespace

std::vector<BenchRow> BenchRetrieval(const BenchOptions& options) {
  if (options.mode != "spir" && options.mode != "mpir") {
    throw std::invalid_argument("mode must be spir or mpir");
  }
  Rng rng(options.seed);
  const auto record_len = static_cast<std::uint32_t>(options.record_len);
  pir::SingleParams params;
  params.lwe.dimension = options.lwe_dimension;
  std::vector<BenchRow> rows;

  for (std::uint64_t n : options.sizes) {
    pir::Database db(n, record_len);
    std::vector<aca::Fid> fids(n + 1);
    for (std::uint64_t i = 1; i <= n; ++i) {
      Bytes file(pir::Database::MaxFileSize(record_len));
      rng.Fill(file);
      file[0] |= 1;
      fids[i] = aca::Fid::OfContent(file);
      db.SetRecord(i, pir::Database::EncodeRecord(file, record_len));
    }
    std::shared_ptr<const pir::LwePublic> pub;
    if (options.mode == "spir") {
      // Offline phase, published once per snapshot; not part of a retrieval.
      pub = std::make_shared<const pir::LwePublic>(
          pir::LweSetup(db, rng.NextDigest(), params.lwe));
    }

    for (int trial = 0; trial < options.trials; ++trial) {
      const std::uint64_t index = rng.Range(1, n);
      BenchRow row{options.mode, n, options.record_len, 0, 0, "", 1, {}};
      ScopedHashCount hashes;
      const auto start = std::chrono::steady_clock::now();
      std::optional<Bytes> record;
      bool recovered = false;
      if (options.mode == "spir") {
        auto [state, query] = pir::SQuery(index, n, record_len, params, pub, rng);
        const auto answer = pir::SAnswer(db, query);
        row.records_touched.push_back(answer.records_touched);
        record = pir::SDecrypt(state, answer);
      } else {
        auto [state, queries] =
            pir::MQuery(index, n, record_len, kServers, kThreshold, rng);
        std::vector<pir::MultiAnswer> answers;
        for (const auto& q : queries) {
          answers.push_back(pir::MAnswer(db, q));
          row.records_touched.push_back(answers.back().records_touched);
        }
        auto result = pir::MReconstruct(state, answers);
        if (result.ok) record = std::move(result.record);
      }
      if (record) {
        auto file = pir::Database::DecodeRecord(*record);
        recovered = file && aca::Fid::OfContent(*file) == fids[index];
      }
      row.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
      row.hash_count = hashes.Elapsed();
      row.outcome = !recovered                ? "IntegrityFailure"
                    : options.mode == "spir" ? "Recovered"
                                             : "RobustRecovered";
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

LineFit FitLine(const std::vector<double>& x, const std::vector<double>& y) {
  const double k = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LineFit fit;
  const double denom = k * sxx - sx * sx;
  if (x.size() < 2 || denom == 0) return fit;
  fit.slope = (k * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / k;
  const double mean = sy / k;
  double ss_tot = 0, ss_res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pred = fit.intercept + fit.slope * x[i];
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  fit.r2 = ss_tot == 0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

int RunBench(const BenchOptions& options, std::ostream& out) {
  const auto rows = BenchRetrieval(options);

  std::ofstream file;
  std::ostream* csv = &out;
  if (!options.out_path.empty()) {
    file.open(options.out_path);
    if (!file) {
      out << "cannot write " << options.out_path << '\n';
      return kExitUsage;
    }
    csv = &file;
  }
  *csv << "operation,mode,n,record_len,latency_ticks,wall_ms,hash_count,outcome,"
          "pir_rounds,records_touched\n";
  bool all_ok = true;
  std::map<std::uint64_t, std::pair<double, int>> means;
  for (const auto& r : rows) {
    std::uint64_t touched = r.records_touched.empty() ? 0 : r.records_touched.front();
    for (auto t : r.records_touched) {
      if (t != r.n) all_ok = false;
    }
    *csv << "retrieve," << r.mode << ',' << r.n << ',' << r.record_len << ",0,"
         << r.wall_ms << ',' << r.hash_count << ',' << r.outcome << ','
         << r.pir_rounds << ',' << touched << '\n';
    all_ok = all_ok && r.outcome != "IntegrityFailure";
    means[r.n].first += r.wall_ms;
    means[r.n].second += 1;
  }
  std::vector<double> xs, ys;
  for (const auto& [n, acc] : means) {
    xs.push_back(static_cast<double>(n));
    ys.push_back(acc.first / acc.second);
    out << "# n=" << n << " mean_wall_ms=" << ys.back() << '\n';
  }
  const LineFit fit = FitLine(xs, ys);
  out << "# linear fit slope_ms_per_record=" << fit.slope
      << " intercept_ms=" << fit.intercept << " r2=" << fit.r2 << '\n';
  return all_ok ? kExitOk : kExitProtocolFailure;
}

}  // namespace pirdsn::tools
