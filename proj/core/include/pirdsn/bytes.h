#ifndef PIRDSN_BYTES_H_
#define PIRDSN_BYTES_H_

// Canonical binary encoding shared by every on-ledger and on-wire structure:
// big-endian fixed-width integers, raw digests, u32 length prefixes for
// variable-length fields.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pirdsn/hash.h"

namespace pirdsn {

using Bytes = std::vector<std::uint8_t>;

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ByteWriter {
 public:
  void U8(std::uint8_t v) { out_.push_back(v); }
  void U16(std::uint16_t v) { BigEndian(v, 2); }
  void U32(std::uint32_t v) { BigEndian(v, 4); }
  void U64(std::uint64_t v) { BigEndian(v, 8); }
  void Raw(std::span<const std::uint8_t> data) {
    out_.insert(out_.end(), data.begin(), data.end());
  }
  void Put(const Digest& d) { Raw(d); }
  void LengthPrefixed(std::span<const std::uint8_t> data) {
    U32(static_cast<std::uint32_t>(data.size()));
    Raw(data);
  }
  void String(std::string_view s) {
    LengthPrefixed(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  }

  const Bytes& bytes() const& { return out_; }
  Bytes&& Take() && { return std::move(out_); }

 private:
  void BigEndian(std::uint64_t v, int width) {
    for (int i = width - 1; i >= 0; --i) {
      out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }
  Bytes out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t U8() { return static_cast<std::uint8_t>(BigEndian(1)); }
  std::uint16_t U16() { return static_cast<std::uint16_t>(BigEndian(2)); }
  std::uint32_t U32() { return static_cast<std::uint32_t>(BigEndian(4)); }
  std::uint64_t U64() { return BigEndian(8); }

  std::span<const std::uint8_t> Raw(std::size_t n) {
    Need(n);
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  Digest GetDigest() {
    Digest d{};
    auto raw = Raw(kDigestSize);
    std::copy(raw.begin(), raw.end(), d.begin());
    return d;
  }
  Bytes LengthPrefixed() {
    const std::uint32_t n = U32();
    auto raw = Raw(n);
    return Bytes(raw.begin(), raw.end());
  }
  std::string String() {
    const std::uint32_t n = U32();
    auto raw = Raw(n);
    return std::string(raw.begin(), raw.end());
  }

  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }
  void ExpectDone() const {
    if (!done()) throw DecodeError("trailing bytes after canonical encoding");
  }

 private:
  void Need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw DecodeError("truncated input");
  }
  std::uint64_t BigEndian(int width) {
    Need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v = (v << 8) | data_[pos_ + i];
    pos_ += static_cast<std::size_t>(width);
    return v;
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

inline std::span<const std::uint8_t> AsBytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace pirdsn

#endif  // PIRDSN_BYTES_H_
