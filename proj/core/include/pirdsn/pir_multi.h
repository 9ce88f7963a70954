#ifndef PIRDSN_PIR_MULTI_H_
#define PIRDSN_PIR_MULTI_H_

// Byzantine-robust multi-server PIR over GF(65537). The client shares the
// unit vector e_index with degree-t polynomials, one evaluation per server
// (alpha_l = l). Each server returns the share-weighted sum of its records,
// word by word; the client decodes every word with Berlekamp-Welch, which
// both recovers the record and names the servers whose words were wrong.

#include <cstdint>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "pirdsn/bytes.h"
#include "pirdsn/database.h"
#include "pirdsn/galois.h"
#include "pirdsn/rng.h"

namespace pirdsn::pir {

struct MultiQuery {
  std::uint32_t server_id = 0;  // 1-based; also the evaluation point
  std::uint32_t servers = 0;
  std::uint32_t threshold = 0;
  std::uint64_t db_size = 0;
  std::uint32_t words_per_record = 0;
  std::vector<std::uint32_t> shares;  // one field element per record
  friend bool operator==(const MultiQuery&, const MultiQuery&) = default;
};

struct MultiAnswer {
  std::uint32_t server_id = 0;
  std::uint64_t db_size = 0;
  std::vector<std::uint32_t> words;
  // Instrumentation, not serialized.
  std::uint64_t records_touched = 0;
};

struct MultiClientState {
  std::uint64_t index = 0;
  std::uint64_t db_size = 0;
  std::uint32_t record_len = 0;
  std::uint32_t words_per_record = 0;
  std::uint32_t servers = 0;
  std::uint32_t threshold = 0;
};

struct ReconstructResult {
  bool ok = false;
  Bytes record;  // record_len bytes when ok
  std::set<std::uint32_t> honest;
  std::set<std::uint32_t> faulty;
};

inline std::uint32_t WordsPerRecord(std::uint32_t record_len) {
  return (record_len + 1) / 2;
}

// Throws std::out_of_range for a bad index and std::invalid_argument unless
// 0 < threshold < servers < modulus.
std::pair<MultiClientState, std::vector<MultiQuery>> MQuery(
    std::uint64_t index, std::uint64_t db_size, std::uint32_t record_len,
    std::uint32_t servers, std::uint32_t threshold, Rng& rng);

// word w = sum_j shares[j] * db[j][w] mod p. Throws std::invalid_argument on
// a length mismatch.
MultiAnswer MAnswer(const Database& db, const MultiQuery& query);

// Decodes with e_max = floor((k - t - 1) / 2) where k counts the distinct
// responders. Fails (ok == false) when some word cannot be decoded, when the
// union of blamed servers exceeds e_max, or when a decoded word is not a
// byte pair; `faulty` then carries whatever evidence was gathered.
ReconstructResult MReconstruct(const MultiClientState& state,
                               std::span<const MultiAnswer> answers);

// u16 version, u8 kind, then (N, t, db_size, words_per_record) and the
// big-endian word vector.
Bytes SerializeMultiQuery(const MultiQuery& q);
MultiQuery DeserializeMultiQuery(std::span<const std::uint8_t> bytes);
Bytes SerializeMultiAnswer(const MultiAnswer& a);
MultiAnswer DeserializeMultiAnswer(std::span<const std::uint8_t> bytes);

// Adapts Rng to the galois randomness interface.
class RngSource final : public galois::RandomSource {
 public:
  explicit RngSource(Rng& rng) : rng_(rng) {}
  std::uint64_t Uniform(std::uint64_t bound) override {
    return rng_.Uniform(bound);
  }

 private:
  Rng& rng_;
};

}  // namespace pirdsn::pir

#endif  // PIRDSN_PIR_MULTI_H_
