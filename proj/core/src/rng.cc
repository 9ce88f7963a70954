#include "pirdsn/rng.h"

#include <openssl/evp.h>

#include <cstring>
#include <stdexcept>

#include "pirdsn/bytes.h"

namespace pirdsn {
namespace {

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

CipherCtx MakeCtr(const Digest& seed) {
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw std::runtime_error("EVP_CIPHER_CTX_new failed");
  // Key = first 16 bytes of the seed, IV = last 16 bytes.
  if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_ctr(), nullptr, seed.data(),
                         seed.data() + 16) != 1) {
    throw std::runtime_error("EVP_EncryptInit_ex failed");
  }
  return ctx;
}

void Keystream(EVP_CIPHER_CTX* ctx, std::uint8_t* out, std::size_t n) {
  static const std::array<std::uint8_t, 4096> kZeros{};
  while (n > 0) {
    const std::size_t chunk = std::min(n, kZeros.size());
    int written = 0;
    if (EVP_EncryptUpdate(ctx, out, &written, kZeros.data(),
                          static_cast<int>(chunk)) != 1) {
      throw std::runtime_error("EVP_EncryptUpdate failed");
    }
    out += chunk;
    n -= chunk;
  }
}

Digest SeedFromInteger(std::uint64_t seed) {
  ByteWriter w;
  w.Raw(AsBytes("pirdsn-rng"));
  w.U64(seed);
  return Sha256Uncounted(w.bytes());
}

}  // namespace

struct Rng::Cipher {
  CipherCtx ctx;
};

Rng::Rng(std::uint64_t seed) : Rng(SeedFromInteger(seed)) {}

Rng::Rng(const Digest& seed)
    : cipher_(std::make_unique<Cipher>(Cipher{MakeCtr(seed)})), seed_(seed) {}

Rng::~Rng() = default;
Rng::Rng(Rng&&) noexcept = default;
Rng& Rng::operator=(Rng&&) noexcept = default;

void Rng::Refill() {
  Keystream(cipher_->ctx.get(), buffer_.data(), buffer_.size());
  pos_ = 0;
}

std::uint64_t Rng::NextU64() {
  if (pos_ + 8 > buffer_.size()) Refill();
  std::uint64_t v;
  std::memcpy(&v, buffer_.data() + pos_, 8);
  pos_ += 8;
  return v;
}

std::uint64_t Rng::Uniform(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::Uniform: zero bound");
  // Rejection sampling keeps the result exactly uniform.
  const std::uint64_t limit = max() - (max() % bound);
  for (;;) {
    const std::uint64_t v = NextU64();
    if (v < limit) return v % bound;
  }
}

bool Rng::Bernoulli(double p) { return UnitDouble() < p; }

double Rng::UnitDouble() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

void Rng::Fill(std::span<std::uint8_t> out) {
  for (auto& b : out) {
    if (pos_ >= buffer_.size()) Refill();
    b = buffer_[pos_++];
  }
}

Digest Rng::NextDigest() {
  Digest d{};
  Fill(d);
  return d;
}

Rng Rng::Fork(std::uint64_t label) {
  ByteWriter w;
  w.Put(seed_);
  w.U64(label);
  w.U64(NextU64());
  return Rng(Sha256Uncounted(w.bytes()));
}

void ExpandSeed(const Digest& seed, std::span<std::uint32_t> out) {
  CipherCtx ctx = MakeCtr(seed);
  Keystream(ctx.get(), reinterpret_cast<std::uint8_t*>(out.data()),
            out.size() * sizeof(std::uint32_t));
}

}  // namespace pirdsn
