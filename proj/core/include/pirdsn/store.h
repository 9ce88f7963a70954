#ifndef PIRDSN_STORE_H_
#define PIRDSN_STORE_H_

// A miner's storage state: accumulator, content-addressed file store, and the
// PIR database derived from them.

#include <filesystem>
#include <map>
#include <memory>

#include "pirdsn/aca.h"
#include "pirdsn/database.h"
#include "pirdsn/proofs.h"

namespace pirdsn::store {

using aca::Fid;

class FileStore {
 public:
  // Throws std::invalid_argument if hash(content) != fid.
  void Put(const Fid& fid, Bytes content);
  const Bytes* Get(const Fid& fid) const;
  bool Contains(const Fid& fid) const { return files_.contains(fid); }
  void Erase(const Fid& fid) { files_.erase(fid); }
  std::size_t size() const { return files_.size(); }
  Digest ContentDigest() const;
  const std::map<Fid, Bytes>& files() const { return files_; }

 private:
  std::map<Fid, Bytes> files_;
};

class MinerState {
 public:
  MinerState(std::string chain_id, std::size_t record_len);

  const std::string& chain_id() const { return chain_id_; }
  std::size_t record_len() const { return record_len_; }
  const aca::Accumulator& accumulator() const { return acc_; }
  const FileStore& files() const { return files_; }
  const Digest& chain_head() const { return head_; }
  std::uint64_t applied() const { return applied_; }

  // Applies a proof that the ledger (or replica validation) accepted. The
  // placement follows the proof's witness; the chain head advances to the
  // proof's hash.
  void ApplyUpload(const proofs::UploadProof& proof, Bytes content);
  void ApplyDelete(const proofs::DeletionProof& proof);

  // Database for the current accumulator state.
  std::shared_ptr<const pir::Database> Snapshot() const;
  // Current snapshot if its size matches, else the retained previous one if
  // that matches, else null.
  std::shared_ptr<const pir::Database> SnapshotForSize(std::uint64_t db_size) const;

  Digest StateDigest() const;
  // Occupied leaves and nonzero records coincide, index by index, and every
  // live fid's content is on file. Throws std::logic_error.
  void CheckCoherence() const;

  // Accumulator, files and chain head; digests of each part are embedded and
  // rechecked on restore.
  Bytes Checkpoint() const;
  static MinerState Restore(std::span<const std::uint8_t> bytes);
  void SaveCheckpoint(const std::filesystem::path& path) const;
  static MinerState LoadCheckpoint(const std::filesystem::path& path);

 private:
  std::shared_ptr<const pir::Database> Materialize() const;
  void BeforeMutation();

  std::string chain_id_;
  std::size_t record_len_;
  aca::Accumulator acc_;
  FileStore files_;
  Digest head_{};
  std::uint64_t applied_ = 0;
  mutable std::shared_ptr<const pir::Database> current_;
  mutable std::shared_ptr<const pir::Database> previous_;
};

}  // namespace pirdsn::store

#endif  // PIRDSN_STORE_H_
