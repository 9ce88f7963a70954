#ifndef PIRDSN_DATABASE_H_
#define PIRDSN_DATABASE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pirdsn/bytes.h"

namespace pirdsn::pir {

// Dense array of fixed-length records, 1-based. Record i holds the file whose
// fid maps to index i; vacant indexes are all-zero.
class Database {
 public:
  Database(std::uint64_t db_size, std::size_t record_len);

  std::uint64_t size() const { return size_; }
  std::size_t record_len() const { return record_len_; }

  std::span<const std::uint8_t> Record(std::uint64_t index) const;
  void SetRecord(std::uint64_t index, std::span<const std::uint8_t> record);
  void Clear(std::uint64_t index);
  bool IsVacant(std::uint64_t index) const;

  // Big-endian 16-bit word `w` of record `index`; the odd trailing byte is
  // zero-padded.
  std::uint32_t Word(std::uint64_t index, std::size_t w) const;
  std::size_t words_per_record() const { return (record_len_ + 1) / 2; }

  Digest ContentDigest() const;
  friend bool operator==(const Database&, const Database&) = default;

  // 4-byte big-endian length, content, zero padding. Throws
  // std::length_error if the file does not fit, std::invalid_argument for an
  // empty file (it would be indistinguishable from a vacant record).
  static Bytes EncodeRecord(std::span<const std::uint8_t> file,
                            std::size_t record_len);
  // Inverse of EncodeRecord. The all-zero record decodes to nullopt
  // (vacant); a malformed length prefix or nonzero padding throws
  // DecodeError.
  static std::optional<Bytes> DecodeRecord(std::span<const std::uint8_t> record);
  static std::size_t MaxFileSize(std::size_t record_len) {
    return record_len < 4 ? 0 : record_len - 4;
  }

 private:
  void Check(std::uint64_t index) const;

  std::uint64_t size_;
  std::size_t record_len_;
  std::vector<std::uint8_t> data_;
};

}  // namespace pirdsn::pir

#endif  // PIRDSN_DATABASE_H_
