#ifndef PIRDSN_PIR_SINGLE_H_
#define PIRDSN_PIR_SINGLE_H_

// Single-server PIR behind the (Query, Answer, Decrypt) contract.
//
// kLwe: secret-key LWE matrix PIR with a per-database hint. The database is
// a (2 * record_len) x db_size matrix of 4-bit digits, one column per record.
// A query for column i is A*s + e + Delta*u_i over Z_{2^32}; the answer is
// D*query and the client strips D*A*s using the downloaded hint D*A.
//
// kPlain: an unencrypted unit vector. Not private; usable only when the
// parameters explicitly opt in, as a correctness oracle in tests.

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pirdsn/bytes.h"
#include "pirdsn/database.h"
#include "pirdsn/rng.h"

namespace pirdsn::pir {

enum class Backend : std::uint8_t { kPlain = 0, kLwe = 1 };

struct LweParams {
  std::uint32_t dimension = 1024;
  double noise_stddev = 6.4;
};

struct SingleParams {
  Backend backend = Backend::kLwe;
  LweParams lwe;
  bool allow_plain_backend = false;
};

class DecryptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Published by the server once per database snapshot.
struct LwePublic {
  Digest matrix_seed{};
  std::uint64_t db_size = 0;
  std::uint32_t record_len = 0;
  std::uint32_t dimension = 0;
  std::vector<std::uint32_t> hint;  // rows x dimension, row-major
};

LwePublic LweSetup(const Database& db, const Digest& matrix_seed,
                   const LweParams& params = {});

struct SingleQuery {
  Backend backend = Backend::kLwe;
  std::uint64_t db_size = 0;
  std::uint32_t record_len = 0;
  Digest matrix_seed{};
  std::vector<std::uint32_t> payload;
  Digest nonce{};
  friend bool operator==(const SingleQuery&, const SingleQuery&) = default;
};

struct SingleAnswer {
  Backend backend = Backend::kLwe;
  std::uint64_t db_size = 0;
  std::uint32_t record_len = 0;
  std::vector<std::uint32_t> payload;
  Digest nonce{};
  // Instrumentation, not serialized.
  std::uint64_t records_touched = 0;
};

struct SingleClientState {
  Backend backend = Backend::kLwe;
  std::uint64_t index = 0;
  std::uint64_t db_size = 0;
  std::uint32_t record_len = 0;
  std::vector<std::uint32_t> secret;
  Digest nonce{};
  std::shared_ptr<const LwePublic> pub;
};

// `pub` is required for kLwe and ignored for kPlain. Throws
// std::out_of_range for an index outside [1, db_size], std::invalid_argument
// for parameters that do not match `pub`, std::logic_error when the plain
// backend is requested without opting in.
std::pair<SingleClientState, SingleQuery> SQuery(
    std::uint64_t index, std::uint64_t db_size, std::uint32_t record_len,
    const SingleParams& params, std::shared_ptr<const LwePublic> pub, Rng& rng);

// Touches every record exactly once. Throws std::invalid_argument on a size
// mismatch between query and database.
SingleAnswer SAnswer(const Database& db, const SingleQuery& query);

// Returns the raw record (record_len bytes). Throws DecryptionError when the
// answer is malformed or a coefficient falls outside the decryption margin.
Bytes SDecrypt(const SingleClientState& state, const SingleAnswer& answer);

// u16 version, u8 message kind, u8 backend, then the body.
Bytes SerializeQuery(const SingleQuery& q);
SingleQuery DeserializeQuery(std::span<const std::uint8_t> bytes);
Bytes SerializeAnswer(const SingleAnswer& a);
SingleAnswer DeserializeAnswer(std::span<const std::uint8_t> bytes);

}  // namespace pirdsn::pir

#endif  // PIRDSN_PIR_SINGLE_H_
