#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "commands.h"
#include "pirdsn/aca.h"
#include "pirdsn/ledger.h"
#include "pirdsn/proofs.h"

namespace pirdsn::tools {
namespace {

std::string RootsString(const aca::RootVector& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += v[i] ? ShortHex(*v[i]) : std::string("nil");
  }
  return s + ")";
}

std::string PathString(const aca::Witness& w) {
  std::string s;
  for (const auto& step : w.path) {
    if (!s.empty()) s += " ";
    s += step.side == aca::Side::kLeft ? "L:" : "R:";
    s += ShortHex(step.sibling);
  }
  return s.empty() ? "-" : s;
}

}  // namespace

int RunAcaDemo(const std::string& ops_path, std::ostream& out) {
  std::ifstream in(ops_path);
  if (!in) {
    out << "cannot open " << ops_path << '\n';
    return kExitUsage;
  }
  ledger::Ledger ledger;
  const std::string miner = "demo";
  aca::Accumulator acc = aca::Accumulator::Gen();
  std::map<aca::Fid, std::string> labels;
  bool failed = false;

  std::string line;
  int lineno = 0;
  out << "start roots=" << RootsString(acc.roots()) << '\n';
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string op, label;
    if (!(ls >> op) || op[0] == '#') continue;
    if (!(ls >> label) || (op != "insert" && op != "delete")) {
      out << ops_path << ":" << lineno << ": expected 'insert <label>' or 'delete <label>'\n";
      return kExitUsage;
    }
    const aca::Fid fid = aca::Fid::OfContent(AsBytes(label));
    labels[fid] = label;
    const Digest head = ledger.Head(miner);
    proofs::Proof proof;
    try {
      if (op == "insert") {
        proof = proofs::MakeUploadProof(acc, fid, head);
      } else {
        proof = proofs::MakeDeletionProof(acc, fid, head);
      }
    } catch (const std::exception& e) {
      out << op << " " << label << ": " << e.what() << '\n';
      failed = true;
      continue;
    }
    const auto appended = ledger.Append(miner, proof);
    if (const auto* up = std::get_if<proofs::UploadProof>(&proof)) {
      out << "insert " << label << " fid=" << ShortHex(fid.digest)
          << " tree=" << up->k() << " leaf=" << up->witness.leaf_position
          << " index=" << up->index << '\n';
      out << "  path " << PathString(up->witness) << '\n';
    } else {
      const auto& del = std::get<proofs::DeletionProof>(proof);
      out << "delete " << label << " fid=" << ShortHex(fid.digest)
          << " tree=" << del.k() << " leaf=" << del.leaf_position << '\n';
      out << "  path " << PathString(del.witness) << '\n';
    }
    out << "  roots " << RootsString(proofs::RootsOf(proof)) << '\n';
    if (appended.accepted()) {
      out << "  verify accepted\n";
    } else {
      out << "  verify rejected: " << proofs::RejectionName(*appended.outcome.reason)
          << '\n';
      failed = true;
    }
  }
  out << "live";
  for (const auto& [index, fid] : acc.Live()) out << " " << index << ":" << labels[fid];
  out << "\ncapacity " << acc.capacity() << '\n';
  return failed ? kExitProtocolFailure : kExitOk;
}

}  // namespace pirdsn::tools
