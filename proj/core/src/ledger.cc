#include "pirdsn/ledger.h"

#include <fstream>
#include <mutex>

namespace pirdsn::ledger {
namespace {

constexpr std::string_view kMagic = "PDSNLOG1";

}  // namespace

Ledger::Chain& Ledger::ChainFor(std::string_view miner_id) {
  auto it = chains_.find(miner_id);
  if (it != chains_.end()) return it->second;
  Chain c;
  c.head = proofs::GenesisDigest(miner_id);
  c.roots = aca::RootVector{std::nullopt};
  c.states.emplace(c.head, c.roots);
  return chains_.emplace(std::string(miner_id), std::move(c)).first->second;
}

const Ledger::Chain* Ledger::FindChain(std::string_view miner_id) const {
  auto it = chains_.find(miner_id);
  return it == chains_.end() ? nullptr : &it->second;
}

std::optional<aca::RootVector> Ledger::Resolve(const Chain& chain,
                                               const Digest& h) {
  auto it = chain.states.find(h);
  if (it == chain.states.end()) return std::nullopt;
  return it->second;
}

Placement Ledger::MakePlacement(const std::string& miner, const Chain& chain,
                                aca::LeafLocation loc) {
  return Placement{miner, aca::IndexOfLocation(chain.roots, loc),
                   aca::CapacityFor(chain.roots.size()), loc};
}

AppendResult Ledger::Append(std::string_view miner_id, const Proof& proof) {
  std::unique_lock lock(mu_);
  Chain& chain = ChainFor(miner_id);
  const Digest entry_hash = proofs::ProofHash(proof);

  if (auto it = by_hash_.find(entry_hash); it != by_hash_.end()) {
    if (log_[it->second].miner_id == miner_id) {
      return AppendResult{proofs::VerifyOutcome::Accept(), entry_hash, true};
    }
  }
  if (proofs::PrevHashOf(proof) != chain.head) {
    return AppendResult{
        proofs::VerifyOutcome::Reject(proofs::Rejection::kChainBroken), {}, false};
  }
  const proofs::ChainResolver resolver = [&chain](const Digest& h) {
    return Resolve(chain, h);
  };
  proofs::VerifyOutcome outcome = proofs::VerifyProof(proof, resolver);
  if (!outcome) return AppendResult{outcome, {}, false};

  const Fid& fid = proofs::FidOf(proof);
  if (const auto* up = std::get_if<proofs::UploadProof>(&proof)) {
    // A fid already mapped on this chain cannot be mapped again.
    if (chain.live.contains(fid)) {
      return AppendResult{
          proofs::VerifyOutcome::Reject(proofs::Rejection::kIndexConflict), {},
          false};
    }
    const std::uint32_t k = up->k();
    if (up->roots.size() == chain.roots.size() + 1) {
      // Growth: every live fid migrates into the new top tree, larger trees
      // first.
      std::vector<std::uint64_t> offset(chain.roots.size(), 0);
      std::uint64_t running = 0;
      for (std::size_t i = chain.roots.size(); i-- > 0;) {
        offset[i] = running;
        running += std::uint64_t{1} << i;
      }
      for (auto& [f, loc] : chain.live) {
        loc = aca::LeafLocation{k, offset[loc.tree] + loc.position};
      }
    }
    chain.live[fid] = aca::LeafLocation{k, up->witness.leaf_position};
  } else {
    const auto& del = std::get<proofs::DeletionProof>(proof);
    auto it = chain.live.find(fid);
    if (it == chain.live.end() ||
        it->second != aca::LeafLocation{del.k(), del.leaf_position}) {
      return AppendResult{
          proofs::VerifyOutcome::Reject(proofs::Rejection::kFidAbsent), {}, false};
    }
    chain.live.erase(it);
  }

  chain.head = entry_hash;
  chain.height += 1;
  chain.roots = proofs::RootsOf(proof);
  chain.states.emplace(entry_hash, chain.roots);
  by_hash_.emplace(entry_hash, log_.size());
  log_.push_back(LedgerEntry{entry_hash, std::string(miner_id), proof,
                             chain.height});
  return AppendResult{proofs::VerifyOutcome::Accept(), entry_hash, false};
}

std::optional<LedgerEntry> Ledger::Get(const Digest& entry_hash) const {
  std::shared_lock lock(mu_);
  auto it = by_hash_.find(entry_hash);
  if (it == by_hash_.end()) return std::nullopt;
  return log_[it->second];
}

Digest Ledger::Head(std::string_view miner_id) const {
  std::shared_lock lock(mu_);
  if (const Chain* c = FindChain(miner_id)) return c->head;
  return proofs::GenesisDigest(miner_id);
}

std::uint64_t Ledger::Height(std::string_view miner_id) const {
  std::shared_lock lock(mu_);
  const Chain* c = FindChain(miner_id);
  return c ? c->height : 0;
}

aca::RootVector Ledger::CurrentRoots(std::string_view miner_id) const {
  std::shared_lock lock(mu_);
  const Chain* c = FindChain(miner_id);
  return c ? c->roots : aca::RootVector{std::nullopt};
}

std::vector<std::string> Ledger::Miners() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, chain] : chains_) out.push_back(id);
  return out;
}

std::optional<DirectoryEntry> Ledger::Lookup(const Fid& fid) const {
  std::shared_lock lock(mu_);
  DirectoryEntry entry{fid, {}};
  for (const auto& [id, chain] : chains_) {
    auto it = chain.live.find(fid);
    if (it != chain.live.end()) {
      entry.placements.push_back(MakePlacement(id, chain, it->second));
    }
  }
  if (entry.placements.empty()) return std::nullopt;
  return entry;
}

std::optional<Placement> Ledger::Lookup(const Fid& fid,
                                        std::string_view miner_id) const {
  std::shared_lock lock(mu_);
  const Chain* c = FindChain(miner_id);
  if (c == nullptr) return std::nullopt;
  auto it = c->live.find(fid);
  if (it == c->live.end()) return std::nullopt;
  return MakePlacement(std::string(miner_id), *c, it->second);
}

proofs::ChainResolver Ledger::Resolver(std::string miner_id) const {
  return [this, miner_id = std::move(miner_id)](const Digest& h)
             -> std::optional<aca::RootVector> {
    std::shared_lock lock(mu_);
    if (h == proofs::GenesisDigest(miner_id)) {
      return aca::RootVector{std::nullopt};
    }
    const Chain* c = FindChain(miner_id);
    if (c == nullptr) return std::nullopt;
    return Resolve(*c, h);
  };
}

std::vector<LedgerEntry> Ledger::Entries() const {
  std::shared_lock lock(mu_);
  return log_;
}

std::size_t Ledger::size() const {
  std::shared_lock lock(mu_);
  return log_.size();
}

std::map<std::string, aca::Accumulator> Ledger::Replay() const {
  std::shared_lock lock(mu_);
  std::map<std::string, aca::Accumulator> out;
  for (const auto& entry : log_) {
    auto [it, fresh] = out.try_emplace(entry.miner_id, aca::Accumulator::Gen());
    aca::Accumulator& acc = it->second;
    if (const auto* up = std::get_if<proofs::UploadProof>(&entry.payload)) {
      if (up->k() == acc.m()) {
        acc.InsertGrow(up->fid);
      } else {
        acc.InsertAt(up->fid, {up->k(), up->witness.leaf_position});
      }
    } else {
      acc.Delete(proofs::FidOf(entry.payload));
    }
    if (acc.roots() != proofs::RootsOf(entry.payload)) {
      throw std::logic_error("replayed state diverges from proof at height " +
                             std::to_string(entry.height) + " of " +
                             entry.miner_id);
    }
  }
  return out;
}

void Ledger::Save(const std::filesystem::path& path) const {
  std::shared_lock lock(mu_);
  ByteWriter w;
  w.Raw(AsBytes(kMagic));
  for (const auto& entry : log_) {
    ByteWriter e;
    e.String(entry.miner_id);
    e.LengthPrefixed(proofs::Serialize(entry.payload));
    w.LengthPrefixed(e.bytes());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(w.bytes().data()),
            static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::unique_ptr<Ledger> Ledger::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)),
             std::istreambuf_iterator<char>());
  ByteReader r(data);
  auto magic = r.Raw(kMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) {
    throw DecodeError("not a ledger file");
  }
  auto ledger = std::make_unique<Ledger>();
  while (!r.done()) {
    Bytes raw = r.LengthPrefixed();
    ByteReader e(raw);
    const std::string miner = e.String();
    const Bytes proof_bytes = e.LengthPrefixed();
    e.ExpectDone();
    const auto result = ledger->Append(miner, proofs::Deserialize(proof_bytes));
    if (!result.accepted() || result.duplicate) {
      throw std::runtime_error("ledger file contains an entry that fails "
                               "verification");
    }
  }
  return ledger;
}

}  // namespace pirdsn::ledger
