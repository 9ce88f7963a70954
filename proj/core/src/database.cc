#include "pirdsn/database.h"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace pirdsn::pir {

Database::Database(std::uint64_t db_size, std::size_t record_len)
    : size_(db_size), record_len_(record_len) {
  if (record_len < 4) throw std::invalid_argument("record_len must be >= 4");
  data_.assign(db_size * record_len, 0);
}

void Database::Check(std::uint64_t index) const {
  if (index < 1 || index > size_) {
    throw std::out_of_range("record index " + std::to_string(index) +
                            " outside [1, " + std::to_string(size_) + "]");
  }
}

std::span<const std::uint8_t> Database::Record(std::uint64_t index) const {
  Check(index);
  return {data_.data() + (index - 1) * record_len_, record_len_};
}

void Database::SetRecord(std::uint64_t index,
                         std::span<const std::uint8_t> record) {
  Check(index);
  if (record.size() != record_len_) {
    throw std::invalid_argument("record has wrong length");
  }
  std::copy(record.begin(), record.end(),
            data_.begin() + static_cast<std::ptrdiff_t>((index - 1) * record_len_));
}

void Database::Clear(std::uint64_t index) {
  Check(index);
  auto begin = data_.begin() + static_cast<std::ptrdiff_t>((index - 1) * record_len_);
  std::fill(begin, begin + static_cast<std::ptrdiff_t>(record_len_), 0);
}

bool Database::IsVacant(std::uint64_t index) const {
  auto r = Record(index);
  return std::all_of(r.begin(), r.end(), [](std::uint8_t b) { return b == 0; });
}

std::uint32_t Database::Word(std::uint64_t index, std::size_t w) const {
  const std::uint8_t* rec = data_.data() + (index - 1) * record_len_;
  const std::size_t hi = 2 * w;
  const std::uint32_t high = rec[hi];
  const std::uint32_t low = hi + 1 < record_len_ ? rec[hi + 1] : 0;
  return (high << 8) | low;
}

Digest Database::ContentDigest() const {
  ByteWriter w;
  w.U64(size_);
  w.U64(record_len_);
  return HashTaggedUncounted(HashDomain::kStateDigest, {w.bytes(), data_});
}

Bytes Database::EncodeRecord(std::span<const std::uint8_t> file,
                             std::size_t record_len) {
  if (file.empty()) throw std::invalid_argument("empty files are not storable");
  if (file.size() > MaxFileSize(record_len)) {
    throw std::length_error("file of " + std::to_string(file.size()) +
                            " bytes exceeds record capacity " +
                            std::to_string(MaxFileSize(record_len)));
  }
  ByteWriter w;
  w.U32(static_cast<std::uint32_t>(file.size()));
  w.Raw(file);
  Bytes out = std::move(w).Take();
  out.resize(record_len, 0);
  return out;
}

std::optional<Bytes> Database::DecodeRecord(
    std::span<const std::uint8_t> record) {
  if (std::all_of(record.begin(), record.end(),
                  [](std::uint8_t b) { return b == 0; })) {
    return std::nullopt;
  }
  ByteReader r(record);
  const std::uint32_t len = r.U32();
  if (len == 0 || len > MaxFileSize(record.size())) {
    throw DecodeError("record length prefix out of range");
  }
  auto body = r.Raw(len);
  // Only the canonical encoding is accepted, so a flipped padding bit is an
  // error rather than a silently ignored one.
  if (!std::all_of(record.begin() + 4 + len, record.end(),
                   [](std::uint8_t b) { return b == 0; })) {
    throw DecodeError("nonzero record padding");
  }
  return Bytes(body.begin(), body.end());
}

}  // namespace pirdsn::pir
