#include "pirdsn/pir_multi.h"

#include <map>
#include <string>

namespace pirdsn::pir {
namespace {

constexpr std::uint16_t kWireVersion = 1;
constexpr std::uint8_t kQueryKind = 0x71;
constexpr std::uint8_t kAnswerKind = 0x61;

const galois::PrimeField& Field() {
  static const galois::PrimeField field(galois::kDefaultModulus);
  return field;
}

void WriteWords(ByteWriter& w, const std::vector<std::uint32_t>& v) {
  w.U64(v.size());
  for (std::uint32_t x : v) w.U32(x);
}

std::vector<std::uint32_t> ReadFieldWords(ByteReader& r) {
  const std::uint64_t n = r.U64();
  if (n > r.remaining() / 4) throw DecodeError("word vector length overflow");
  std::vector<std::uint32_t> v(n);
  for (auto& x : v) {
    x = r.U32();
    if (x >= galois::kDefaultModulus) throw DecodeError("word outside field");
  }
  return v;
}

}  // namespace

std::pair<MultiClientState, std::vector<MultiQuery>> MQuery(
    std::uint64_t index, std::uint64_t db_size, std::uint32_t record_len,
    std::uint32_t servers, std::uint32_t threshold, Rng& rng) {
  if (index < 1 || index > db_size) {
    throw std::out_of_range("query index " + std::to_string(index) +
                            " outside [1, " + std::to_string(db_size) + "]");
  }
  if (threshold == 0 || threshold >= servers ||
      servers >= galois::kDefaultModulus) {
    throw std::invalid_argument("need 0 < t < N < p");
  }
  const auto& f = Field();
  MultiClientState state{index, db_size, record_len, WordsPerRecord(record_len),
                         servers, threshold};
  std::vector<MultiQuery> queries(servers);
  for (std::uint32_t l = 0; l < servers; ++l) {
    queries[l] = MultiQuery{l + 1, servers, threshold, db_size,
                            state.words_per_record, {}};
    queries[l].shares.resize(db_size);
  }
  RngSource source(rng);
  for (std::uint64_t j = 0; j < db_size; ++j) {
    const auto poly = galois::Polynomial::Random(
        f, static_cast<int>(threshold),
        galois::FieldElement{j + 1 == index ? 1u : 0u}, source);
    for (std::uint32_t l = 0; l < servers; ++l) {
      queries[l].shares[j] = poly.Evaluate(f, f.Element(l + 1)).value;
    }
  }
  return {state, std::move(queries)};
}

MultiAnswer MAnswer(const Database& db, const MultiQuery& query) {
  if (query.shares.size() != db.size() || query.db_size != db.size() ||
      query.words_per_record != db.words_per_record()) {
    throw std::invalid_argument("query sized for db_size " +
                                std::to_string(query.db_size) +
                                ", database has " + std::to_string(db.size()));
  }
  const std::uint64_t p = galois::kDefaultModulus;
  const std::size_t words = db.words_per_record();
  // Accumulate in 64 bits and reduce lazily: each term is < 2^33.
  std::vector<std::uint64_t> acc(words, 0);
  MultiAnswer ans;
  ans.server_id = query.server_id;
  ans.db_size = query.db_size;
  for (std::uint64_t j = 0; j < db.size(); ++j) {
    const std::uint64_t share = query.shares[j];
    if (share != 0) {
      for (std::size_t w = 0; w < words; ++w) {
        acc[w] += share * db.Word(j + 1, w);
      }
    }
    if ((j & 0x3fff) == 0x3fff) {
      for (auto& a : acc) a %= p;
    }
    ++ans.records_touched;
  }
  ans.words.resize(words);
  for (std::size_t w = 0; w < words; ++w) {
    ans.words[w] = static_cast<std::uint32_t>(acc[w] % p);
  }
  return ans;
}

ReconstructResult MReconstruct(const MultiClientState& state,
                               std::span<const MultiAnswer> answers) {
  const auto& f = Field();
  ReconstructResult result;

  // One answer per server id; a malformed answer is blamed outright.
  std::map<std::uint32_t, const MultiAnswer*> usable;
  for (const auto& a : answers) {
    if (a.server_id < 1 || a.server_id > state.servers) continue;
    if (a.words.size() != state.words_per_record || a.db_size != state.db_size ||
        usable.contains(a.server_id) || result.faulty.contains(a.server_id)) {
      usable.erase(a.server_id);
      result.faulty.insert(a.server_id);
      continue;
    }
    bool in_field = true;
    for (std::uint32_t w : a.words) in_field &= w < f.modulus();
    if (!in_field) {
      result.faulty.insert(a.server_id);
      continue;
    }
    usable.emplace(a.server_id, &a);
  }

  const int t = static_cast<int>(state.threshold);
  const int k = static_cast<int>(usable.size() + result.faulty.size());
  const int e_max = galois::MaxCorrectableErrors(k, t);
  const int budget = e_max - static_cast<int>(result.faulty.size());
  if (budget < 0 || static_cast<int>(usable.size()) < t + 2 * budget + 1) {
    return result;
  }

  std::vector<galois::EvaluationPoint> points;
  points.reserve(usable.size());
  result.record.assign(state.record_len, 0);
  for (std::uint32_t w = 0; w < state.words_per_record; ++w) {
    points.clear();
    for (const auto& [id, a] : usable) {
      points.push_back({f.Element(id), galois::FieldElement{a->words[w]}});
    }
    auto decoded = galois::BerlekampWelchDecode(f, points, t, budget);
    if (!decoded) {
      result.record.clear();
      return result;
    }
    result.faulty.insert(decoded->error_positions.begin(),
                         decoded->error_positions.end());
    const std::uint32_t value = decoded->polynomial.coefficient(0).value;
    if (static_cast<int>(result.faulty.size()) > e_max || value > 0xffff) {
      result.record.clear();
      return result;
    }
    result.record[2 * w] = static_cast<std::uint8_t>(value >> 8);
    if (2 * w + 1 < state.record_len) {
      result.record[2 * w + 1] = static_cast<std::uint8_t>(value & 0xff);
    } else if ((value & 0xff) != 0) {
      result.record.clear();
      return result;
    }
  }
  for (const auto& [id, a] : usable) {
    if (!result.faulty.contains(id)) result.honest.insert(id);
  }
  result.ok = true;
  return result;
}

Bytes SerializeMultiQuery(const MultiQuery& q) {
  ByteWriter w;
  w.U16(kWireVersion);
  w.U8(kQueryKind);
  w.U32(q.server_id);
  w.U32(q.servers);
  w.U32(q.threshold);
  w.U64(q.db_size);
  w.U32(q.words_per_record);
  WriteWords(w, q.shares);
  return std::move(w).Take();
}

MultiQuery DeserializeMultiQuery(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.U16() != kWireVersion || r.U8() != kQueryKind) {
    throw DecodeError("not a multi-server query");
  }
  MultiQuery q;
  q.server_id = r.U32();
  q.servers = r.U32();
  q.threshold = r.U32();
  q.db_size = r.U64();
  q.words_per_record = r.U32();
  q.shares = ReadFieldWords(r);
  r.ExpectDone();
  return q;
}

Bytes SerializeMultiAnswer(const MultiAnswer& a) {
  ByteWriter w;
  w.U16(kWireVersion);
  w.U8(kAnswerKind);
  w.U32(a.server_id);
  w.U64(a.db_size);
  WriteWords(w, a.words);
  return std::move(w).Take();
}

MultiAnswer DeserializeMultiAnswer(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.U16() != kWireVersion || r.U8() != kAnswerKind) {
    throw DecodeError("not a multi-server answer");
  }
  MultiAnswer a;
  a.server_id = r.U32();
  a.db_size = r.U64();
  a.words = ReadFieldWords(r);
  r.ExpectDone();
  return a;
}

}  // namespace pirdsn::pir
