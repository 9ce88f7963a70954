#ifndef PIRDSN_RNG_H_
#define PIRDSN_RNG_H_

#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>

#include "pirdsn/hash.h"

namespace pirdsn {

// Deterministic AES-128-CTR keystream generator. Seeded runs are exactly
// reproducible, which the simulator depends on; key material derived from a
// high-entropy seed makes the stream suitable for query randomness too.
// Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);
  explicit Rng(const Digest& seed);
  ~Rng();
  Rng(Rng&&) noexcept;
  Rng& operator=(Rng&&) noexcept;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return NextU64(); }

  std::uint64_t NextU64();
  std::uint32_t NextU32() { return static_cast<std::uint32_t>(NextU64()); }
  // Uniform in [0, bound). bound > 0.
  std::uint64_t Uniform(std::uint64_t bound);
  // Uniform in [lo, hi].
  std::uint64_t Range(std::uint64_t lo, std::uint64_t hi) {
    return lo + Uniform(hi - lo + 1);
  }
  bool Bernoulli(double p);
  double UnitDouble();
  void Fill(std::span<std::uint8_t> out);
  Digest NextDigest();

  // Independent child stream, e.g. one per actor.
  Rng Fork(std::uint64_t label);

 private:
  void Refill();

  struct Cipher;
  std::unique_ptr<Cipher> cipher_;
  std::array<std::uint8_t, 4096> buffer_{};
  std::size_t pos_ = 4096;
  Digest seed_{};
};

// Expands `seed` into `count` pseudo-random 32-bit words. Used for public
// matrices that client and server regenerate independently.
void ExpandSeed(const Digest& seed, std::span<std::uint32_t> out);

}  // namespace pirdsn

#endif  // PIRDSN_RNG_H_
