#include "pirdsn/store.h"

#include <fstream>

namespace pirdsn::store {

void FileStore::Put(const Fid& fid, Bytes content) {
  if (Fid::OfContent(content) != fid) {
    throw std::invalid_argument("file content does not hash to its fid");
  }
  files_[fid] = std::move(content);
}

const Bytes* FileStore::Get(const Fid& fid) const {
  auto it = files_.find(fid);
  return it == files_.end() ? nullptr : &it->second;
}

Digest FileStore::ContentDigest() const {
  ByteWriter w;
  w.U64(files_.size());
  for (const auto& [fid, content] : files_) {
    w.Put(fid.digest);
    w.U64(content.size());
  }
  return HashTaggedUncounted(HashDomain::kStateDigest, {w.bytes()});
}

MinerState::MinerState(std::string chain_id, std::size_t record_len)
    : chain_id_(std::move(chain_id)),
      record_len_(record_len),
      acc_(aca::Accumulator::Gen()),
      head_(proofs::GenesisDigest(chain_id_)) {}

void MinerState::BeforeMutation() {
  // Keep the outgoing snapshot around when the database is about to grow, so
  // queries sized for it can still be answered.
  if (!current_) current_ = Materialize();
  current_.reset();
}

void MinerState::ApplyUpload(const proofs::UploadProof& proof, Bytes content) {
  if (content.empty() || Fid::OfContent(content) != proof.fid) {
    throw std::invalid_argument("upload content does not match its fid");
  }
  const std::uint64_t before = acc_.capacity();
  auto snapshot = Snapshot();
  if (proof.k() == acc_.m()) {
    acc_.InsertGrow(proof.fid);
  } else {
    acc_.InsertAt(proof.fid, {proof.k(), proof.witness.leaf_position});
  }
  if (acc_.roots() != proof.roots) {
    throw std::logic_error("applied upload diverges from its proof");
  }
  files_.Put(proof.fid, std::move(content));
  if (acc_.capacity() != before) previous_ = snapshot;
  current_.reset();
  head_ = proofs::ProofHash(proofs::Proof{proof});
  ++applied_;
}

void MinerState::ApplyDelete(const proofs::DeletionProof& proof) {
  acc_.Delete(proof.fid);
  if (acc_.roots() != proof.roots) {
    throw std::logic_error("applied deletion diverges from its proof");
  }
  files_.Erase(proof.fid);
  current_.reset();
  head_ = proofs::ProofHash(proofs::Proof{proof});
  ++applied_;
}

std::shared_ptr<const pir::Database> MinerState::Materialize() const {
  auto db = std::make_shared<pir::Database>(acc_.capacity(), record_len_);
  for (const auto& [index, fid] : acc_.Live()) {
    const Bytes* content = files_.Get(fid);
    if (content == nullptr) throw std::logic_error("live fid without content");
    db->SetRecord(index, pir::Database::EncodeRecord(*content, record_len_));
  }
  return db;
}

std::shared_ptr<const pir::Database> MinerState::Snapshot() const {
  if (!current_) current_ = Materialize();
  return current_;
}

std::shared_ptr<const pir::Database> MinerState::SnapshotForSize(
    std::uint64_t db_size) const {
  auto now = Snapshot();
  if (now->size() == db_size) return now;
  if (previous_ && previous_->size() == db_size) return previous_;
  return nullptr;
}

Digest MinerState::StateDigest() const {
  ByteWriter w;
  w.String(chain_id_);
  w.U64(applied_);
  w.Put(head_);
  w.Put(acc_.StateDigest());
  w.Put(files_.ContentDigest());
  w.Put(Snapshot()->ContentDigest());
  return HashTaggedUncounted(HashDomain::kStateDigest, {w.bytes()});
}

void MinerState::CheckCoherence() const {
  acc_.CheckInvariants();
  auto db = Snapshot();
  if (db->size() != acc_.capacity()) {
    throw std::logic_error("database size differs from accumulator capacity");
  }
  std::vector<bool> occupied(db->size() + 1, false);
  for (const auto& [index, fid] : acc_.Live()) {
    occupied[index] = true;
    const Bytes* content = files_.Get(fid);
    if (content == nullptr) throw std::logic_error("live fid without content");
    auto decoded = pir::Database::DecodeRecord(db->Record(index));
    if (!decoded || *decoded != *content) {
      throw std::logic_error("record does not hold the mapped file");
    }
  }
  for (std::uint64_t i = 1; i <= db->size(); ++i) {
    if (!occupied[i] && !db->IsVacant(i)) {
      throw std::logic_error("vacant index holds a nonzero record");
    }
  }
  if (files_.size() != acc_.size()) {
    throw std::logic_error("file store and accumulator disagree on count");
  }
}

Bytes MinerState::Checkpoint() const {
  ByteWriter w;
  w.Raw(AsBytes("PDSNCKP1"));
  w.String(chain_id_);
  w.U64(record_len_);
  w.U64(applied_);
  w.Put(head_);
  w.LengthPrefixed(acc_.Serialize());
  w.U64(files_.size());
  for (const auto& [fid, content] : files_.files()) {
    w.Put(fid.digest);
    w.LengthPrefixed(content);
  }
  w.Put(acc_.StateDigest());
  w.Put(files_.ContentDigest());
  w.Put(Snapshot()->ContentDigest());
  return std::move(w).Take();
}

MinerState MinerState::Restore(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  auto magic = r.Raw(8);
  if (!std::equal(magic.begin(), magic.end(), AsBytes("PDSNCKP1").begin())) {
    throw DecodeError("not a miner checkpoint");
  }
  std::string chain_id = r.String();
  const std::uint64_t record_len = r.U64();
  MinerState s(std::move(chain_id), record_len);
  s.applied_ = r.U64();
  s.head_ = r.GetDigest();
  s.acc_ = aca::Accumulator::Deserialize(r.LengthPrefixed());
  const std::uint64_t count = r.U64();
  for (std::uint64_t i = 0; i < count; ++i) {
    Fid fid{r.GetDigest()};
    s.files_.Put(fid, r.LengthPrefixed());
  }
  const Digest acc_digest = r.GetDigest();
  const Digest files_digest = r.GetDigest();
  const Digest db_digest = r.GetDigest();
  r.ExpectDone();
  if (acc_digest != s.acc_.StateDigest() ||
      files_digest != s.files_.ContentDigest() ||
      db_digest != s.Snapshot()->ContentDigest()) {
    throw DecodeError("checkpoint digests do not match restored state");
  }
  s.CheckCoherence();
  return s;
}

void MinerState::SaveCheckpoint(const std::filesystem::path& path) const {
  const Bytes data = Checkpoint();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
}

MinerState MinerState::LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)),
             std::istreambuf_iterator<char>());
  return Restore(data);
}

}  // namespace pirdsn::store
