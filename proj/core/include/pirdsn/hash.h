#ifndef PIRDSN_HASH_H_
#define PIRDSN_HASH_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>

namespace pirdsn {

inline constexpr std::size_t kDigestSize = 32;
using Digest = std::array<std::uint8_t, kDigestSize>;

// Domain-separation prefixes. Every digest that enters an accumulator root or
// the proof chain is computed with exactly one of these leading bytes.
enum class HashDomain : std::uint8_t {
  kMerkleLeaf = 0x00,
  kMerkleNode = 0x01,
  kProofEntry = 0x02,
  kBlock = 0x03,
  kAuthenticator = 0x04,
  kStateDigest = 0x05,
};

// SHA-256 of `data`. Counted by HashCounter.
Digest Sha256(std::span<const std::uint8_t> data);
Digest Sha256(std::string_view data);

// SHA-256 of (domain || parts...). Counted once regardless of the number of
// parts.
Digest HashTagged(HashDomain domain,
                  std::initializer_list<std::span<const std::uint8_t>> parts);

// Same primitive, not counted. Used for precomputed constants (vacant subtree
// digests) so that instrumentation measures per-call work only.
Digest Sha256Uncounted(std::span<const std::uint8_t> data);
Digest HashTaggedUncounted(
    HashDomain domain,
    std::initializer_list<std::span<const std::uint8_t>> parts);

// Thread-local tally of counted hash invocations.
class HashCounter {
 public:
  static std::uint64_t Count();
  static void Reset();
};

// Measures the number of counted hash invocations within a scope.
class ScopedHashCount {
 public:
  ScopedHashCount() : start_(HashCounter::Count()) {}
  std::uint64_t Elapsed() const { return HashCounter::Count() - start_; }

 private:
  std::uint64_t start_;
};

std::string ToHex(std::span<const std::uint8_t> bytes);
std::string ShortHex(const Digest& d);  // first 8 bytes, for logs

struct DigestHash {
  std::size_t operator()(const Digest& d) const noexcept {
    std::size_t h = 0;
    for (int i = 0; i < 8; ++i) h = (h << 8) | d[i];
    return h;
  }
};

}  // namespace pirdsn

#endif  // PIRDSN_HASH_H_
