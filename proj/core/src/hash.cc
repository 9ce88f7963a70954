#include "pirdsn/hash.h"

#include <openssl/evp.h>

#include <memory>
#include <stdexcept>

namespace pirdsn {
namespace {

thread_local std::uint64_t g_hash_count = 0;

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

EVP_MD_CTX* ThreadContext() {
  thread_local std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
  if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
  return ctx.get();
}

Digest HashParts(std::initializer_list<std::span<const std::uint8_t>> parts,
                 const std::uint8_t* prefix) {
  EVP_MD_CTX* ctx = ThreadContext();
  if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("EVP_DigestInit_ex failed");
  }
  if (prefix != nullptr) EVP_DigestUpdate(ctx, prefix, 1);
  for (const auto& part : parts) {
    if (!part.empty()) EVP_DigestUpdate(ctx, part.data(), part.size());
  }
  Digest out{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx, out.data(), &len) != 1 || len != kDigestSize) {
    throw std::runtime_error("EVP_DigestFinal_ex failed");
  }
  return out;
}

}  // namespace

Digest Sha256Uncounted(std::span<const std::uint8_t> data) {
  return HashParts({data}, nullptr);
}

Digest Sha256(std::span<const std::uint8_t> data) {
  ++g_hash_count;
  return HashParts({data}, nullptr);
}

Digest Sha256(std::string_view data) {
  return Sha256(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

Digest HashTaggedUncounted(
    HashDomain domain,
    std::initializer_list<std::span<const std::uint8_t>> parts) {
  const auto tag = static_cast<std::uint8_t>(domain);
  return HashParts(parts, &tag);
}

Digest HashTagged(HashDomain domain,
                  std::initializer_list<std::span<const std::uint8_t>> parts) {
  ++g_hash_count;
  return HashTaggedUncounted(domain, parts);
}

std::uint64_t HashCounter::Count() { return g_hash_count; }
void HashCounter::Reset() { g_hash_count = 0; }

std::string ToHex(std::span<const std::uint8_t> bytes) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xf]);
  }
  return out;
}

std::string ShortHex(const Digest& d) {
  return ToHex(std::span<const std::uint8_t>(d.data(), 8));
}

}  // namespace pirdsn
