#include "pirdsn/pir_single.h"

#include <cmath>
#include <random>
#include <string>

namespace pirdsn::pir {
namespace {

constexpr std::uint16_t kWireVersion = 1;
constexpr std::uint8_t kQueryKind = 0x51;   // 'Q'
constexpr std::uint8_t kAnswerKind = 0x41;  // 'A'

// Plaintext digits are 4 bits; Delta = q / 16 with q = 2^32.
constexpr std::uint32_t kDigitBits = 4;
constexpr std::uint32_t kDigitModulus = 1u << kDigitBits;
constexpr std::uint32_t kDelta = 1u << (32 - kDigitBits);
constexpr std::uint32_t kMargin = kDelta / 4;

std::uint64_t Rows(std::uint32_t record_len) {
  return 2ull * record_len;
}

std::vector<std::uint32_t> PublicMatrix(const Digest& seed,
                                        std::uint64_t db_size,
                                        std::uint32_t dimension) {
  std::vector<std::uint32_t> a(db_size * dimension);
  ExpandSeed(seed, a);
  return a;
}

std::int32_t RoundedGaussian(Rng& rng, double stddev) {
  std::normal_distribution<double> dist(0.0, stddev);
  const double bound = 10.0 * stddev;
  const double v = std::clamp(dist(rng), -bound, bound);
  return static_cast<std::int32_t>(std::lround(v));
}

void RequireIndex(std::uint64_t index, std::uint64_t db_size) {
  if (index < 1 || index > db_size) {
    throw std::out_of_range("query index " + std::to_string(index) +
                            " outside [1, " + std::to_string(db_size) + "]");
  }
}

void WriteWords(ByteWriter& w, const std::vector<std::uint32_t>& v) {
  w.U64(v.size());
  for (std::uint32_t x : v) w.U32(x);
}

std::vector<std::uint32_t> ReadWords(ByteReader& r) {
  const std::uint64_t n = r.U64();
  if (n > r.remaining() / 4) throw DecodeError("word vector length overflow");
  std::vector<std::uint32_t> v(n);
  for (auto& x : v) x = r.U32();
  return v;
}

Backend ReadBackend(ByteReader& r) {
  const std::uint8_t b = r.U8();
  if (b > 1) throw DecodeError("unknown PIR backend");
  return static_cast<Backend>(b);
}

void ReadHeader(ByteReader& r, std::uint8_t kind) {
  if (r.U16() != kWireVersion) throw DecodeError("unsupported wire version");
  if (r.U8() != kind) throw DecodeError("unexpected message kind");
}

}  // namespace

LwePublic LweSetup(const Database& db, const Digest& matrix_seed,
                   const LweParams& params) {
  LwePublic pub;
  pub.matrix_seed = matrix_seed;
  pub.db_size = db.size();
  pub.record_len = static_cast<std::uint32_t>(db.record_len());
  pub.dimension = params.dimension;
  const std::uint64_t rows = Rows(pub.record_len);
  const std::uint32_t n = params.dimension;
  const auto a = PublicMatrix(matrix_seed, db.size(), n);
  pub.hint.assign(rows * n, 0);
  // hint = D * A, accumulated one record (column of D) at a time.
  for (std::uint64_t c = 0; c < db.size(); ++c) {
    const auto record = db.Record(c + 1);
    const std::uint32_t* a_row = a.data() + c * n;
    for (std::size_t b = 0; b < record.size(); ++b) {
      const std::uint32_t digits[2] = {static_cast<std::uint32_t>(record[b] >> 4),
                                       static_cast<std::uint32_t>(record[b] & 0xf)};
      for (int half = 0; half < 2; ++half) {
        const std::uint32_t d = digits[half];
        if (d == 0) continue;
        std::uint32_t* h_row = pub.hint.data() + (2 * b + half) * n;
        for (std::uint32_t j = 0; j < n; ++j) h_row[j] += d * a_row[j];
      }
    }
  }
  return pub;
}

std::pair<SingleClientState, SingleQuery> SQuery(
    std::uint64_t index, std::uint64_t db_size, std::uint32_t record_len,
    const SingleParams& params, std::shared_ptr<const LwePublic> pub, Rng& rng) {
  RequireIndex(index, db_size);
  SingleClientState state;
  state.backend = params.backend;
  state.index = index;
  state.db_size = db_size;
  state.record_len = record_len;
  state.nonce = rng.NextDigest();

  SingleQuery q;
  q.backend = params.backend;
  q.db_size = db_size;
  q.record_len = record_len;
  q.nonce = state.nonce;

  if (params.backend == Backend::kPlain) {
    if (!params.allow_plain_backend) {
      throw std::logic_error(
          "plain PIR backend is non-private and disabled by configuration");
    }
    q.payload.assign(db_size, 0);
    q.payload[index - 1] = 1;
    return {std::move(state), std::move(q)};
  }

  if (!pub) throw std::invalid_argument("LWE query requires public parameters");
  if (pub->db_size != db_size || pub->record_len != record_len) {
    throw std::invalid_argument("public parameters describe another database");
  }
  const std::uint32_t n = pub->dimension;
  state.secret.resize(n);
  for (auto& s : state.secret) s = rng.NextU32();

  const auto a = PublicMatrix(pub->matrix_seed, db_size, n);
  q.matrix_seed = pub->matrix_seed;
  q.payload.resize(db_size);
  for (std::uint64_t c = 0; c < db_size; ++c) {
    const std::uint32_t* a_row = a.data() + c * n;
    std::uint32_t acc = 0;
    for (std::uint32_t j = 0; j < n; ++j) acc += a_row[j] * state.secret[j];
    acc += static_cast<std::uint32_t>(RoundedGaussian(rng, params.lwe.noise_stddev));
    if (c == index - 1) acc += kDelta;
    q.payload[c] = acc;
  }
  state.pub = std::move(pub);
  return {std::move(state), std::move(q)};
}

SingleAnswer SAnswer(const Database& db, const SingleQuery& query) {
  if (query.db_size != db.size() || query.record_len != db.record_len() ||
      query.payload.size() != db.size()) {
    throw std::invalid_argument("query sized for db_size " +
                                std::to_string(query.db_size) +
                                ", database has " + std::to_string(db.size()));
  }
  SingleAnswer ans;
  ans.backend = query.backend;
  ans.db_size = query.db_size;
  ans.record_len = query.record_len;
  ans.nonce = query.nonce;

  if (query.backend == Backend::kPlain) {
    ans.payload.assign(db.record_len(), 0);
    for (std::uint64_t c = 0; c < db.size(); ++c) {
      const auto record = db.Record(c + 1);
      const std::uint32_t weight = query.payload[c];
      for (std::size_t b = 0; b < record.size(); ++b) {
        ans.payload[b] += weight * record[b];
      }
      ++ans.records_touched;
    }
    return ans;
  }

  ans.payload.assign(Rows(query.record_len), 0);
  for (std::uint64_t c = 0; c < db.size(); ++c) {
    const auto record = db.Record(c + 1);
    const std::uint32_t qc = query.payload[c];
    for (std::size_t b = 0; b < record.size(); ++b) {
      ans.payload[2 * b] += static_cast<std::uint32_t>(record[b] >> 4) * qc;
      ans.payload[2 * b + 1] += static_cast<std::uint32_t>(record[b] & 0xf) * qc;
    }
    ++ans.records_touched;
  }
  return ans;
}

Bytes SDecrypt(const SingleClientState& state, const SingleAnswer& answer) {
  if (answer.backend != state.backend || answer.db_size != state.db_size ||
      answer.record_len != state.record_len || answer.nonce != state.nonce) {
    throw DecryptionError("answer does not belong to this query");
  }
  if (state.backend == Backend::kPlain) {
    if (answer.payload.size() != state.record_len) {
      throw DecryptionError("plain answer has wrong length");
    }
    Bytes out(state.record_len);
    for (std::size_t b = 0; b < out.size(); ++b) {
      if (answer.payload[b] > 0xff) throw DecryptionError("byte out of range");
      out[b] = static_cast<std::uint8_t>(answer.payload[b]);
    }
    return out;
  }

  const std::uint64_t rows = Rows(state.record_len);
  if (answer.payload.size() != rows || !state.pub) {
    throw DecryptionError("LWE answer has wrong length");
  }
  const std::uint32_t n = state.pub->dimension;
  Bytes out(state.record_len, 0);
  for (std::uint64_t r = 0; r < rows; ++r) {
    const std::uint32_t* h_row = state.pub->hint.data() + r * n;
    std::uint32_t mask = 0;
    for (std::uint32_t j = 0; j < n; ++j) mask += h_row[j] * state.secret[j];
    const std::uint32_t noisy = answer.payload[r] - mask;
    // Nearest multiple of Delta, and the signed distance to it.
    const std::uint32_t digit = ((noisy + kDelta / 2) >> (32 - kDigitBits)) %
                                kDigitModulus;
    const auto noise = static_cast<std::int32_t>(noisy - digit * kDelta);
    if (noise >= static_cast<std::int32_t>(kMargin) ||
        noise <= -static_cast<std::int32_t>(kMargin)) {
      throw DecryptionError("coefficient " + std::to_string(r) +
                            " outside decryption margin");
    }
    out[r / 2] |= static_cast<std::uint8_t>(r % 2 == 0 ? digit << 4 : digit);
  }
  return out;
}

Bytes SerializeQuery(const SingleQuery& q) {
  ByteWriter w;
  w.U16(kWireVersion);
  w.U8(kQueryKind);
  w.U8(static_cast<std::uint8_t>(q.backend));
  w.U64(q.db_size);
  w.U32(q.record_len);
  w.Put(q.matrix_seed);
  w.Put(q.nonce);
  WriteWords(w, q.payload);
  return std::move(w).Take();
}

SingleQuery DeserializeQuery(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  ReadHeader(r, kQueryKind);
  SingleQuery q;
  q.backend = ReadBackend(r);
  q.db_size = r.U64();
  q.record_len = r.U32();
  q.matrix_seed = r.GetDigest();
  q.nonce = r.GetDigest();
  q.payload = ReadWords(r);
  r.ExpectDone();
  return q;
}

Bytes SerializeAnswer(const SingleAnswer& a) {
  ByteWriter w;
  w.U16(kWireVersion);
  w.U8(kAnswerKind);
  w.U8(static_cast<std::uint8_t>(a.backend));
  w.U64(a.db_size);
  w.U32(a.record_len);
  w.Put(a.nonce);
  WriteWords(w, a.payload);
  return std::move(w).Take();
}

SingleAnswer DeserializeAnswer(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  ReadHeader(r, kAnswerKind);
  SingleAnswer a;
  a.backend = ReadBackend(r);
  a.db_size = r.U64();
  a.record_len = r.U32();
  a.nonce = r.GetDigest();
  a.payload = ReadWords(r);
  r.ExpectDone();
  return a;
}

}  // namespace pirdsn::pir
