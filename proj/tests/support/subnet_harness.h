#ifndef PIRDSN_TESTS_SUPPORT_SUBNET_HARNESS_H_
#define PIRDSN_TESTS_SUPPORT_SUBNET_HARNESS_H_

// Drives one replicated subnet and a client on the simulated network,
// recording every block each replica applies.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pirdsn/attacks.h"
#include "pirdsn/client.h"
#include "pirdsn/smr.h"

namespace pirdsn::testing {

struct SubnetSetup {
  std::uint32_t n = 4;
  std::uint32_t f = 1;
  std::vector<attacks::Strategy> strategies;  // padded with kHonest
  std::uint64_t seed = 1;
  netsim::Tick min_delay = 1;
  netsim::Tick max_delay = 4;
  double byzantine_drop_rate = 0.0;
  int uploads = 6;
  int deletes = 2;
  int retrievals = 0;
  std::size_t record_len = 48;
  std::size_t max_batch = 4;
};

struct SubnetOutcome {
  bool finished = true;  // every client operation completed
  std::vector<client::Report> reports;
  // View changes observed by honest replicas during each write.
  std::vector<std::uint64_t> write_view_changes;
  std::vector<bool> consensus_honest;  // per replica
  std::vector<std::vector<smr::CommitRecord>> commits;
  std::vector<std::vector<smr::Block>> blocks;  // in application order
  std::vector<Digest> final_state;
  std::uint64_t forged_proposals = 0;
  std::uint64_t equivocations = 0;
};

SubnetOutcome RunSubnet(const SubnetSetup& setup);

// Replays `blocks` from the empty state and checks that every embedded proof
// is exactly the one an honest miner would publish at that point and that
// every proof-less entry really was unservable. Empty on success, else a
// description of the first bad entry.
std::string CheckCommittedBlocks(const std::vector<smr::Block>& blocks,
                                 std::string_view chain_id = "mpir");

}  // namespace pirdsn::testing

#endif  // PIRDSN_TESTS_SUPPORT_SUBNET_HARNESS_H_
