#pragma once

#include <span>
#include <utility>

#include "obscura/lsag.hpp"
#include "obscura/mixer_contract.hpp"

namespace obscura::client {

struct CommitmentRecord {
    GroupPoint point;
    Bytes64 encoded{};
    std::uint64_t deposit_index = 0;
    std::uint64_t round = 0;
};

// All recorded deposits in insertion order, recovered from committed receipts.
std::vector<CommitmentRecord> list_commitments(const avm::LedgerState& state);

struct DecoySelection {
    double lambda = 0.25;        // geometric decay per recency rank
    std::size_t recent_cap = 64; // only the newest records stay eligible
};

// Samples k distinct decoys, newest-biased: rank r carries weight (1-lambda)^r.
// The caller's own commitment is excluded. Throws InsufficientPool.
std::vector<CommitmentRecord> select_decoys(std::span<const CommitmentRecord> records,
                                            const GroupPoint& own, std::size_t k,
                                            const DecoySelection& config, RandomSource& rng);

// Fisher-Yates shuffle of decoys plus the caller's commitment; returns the
// ring and the resulting secret index.
std::pair<lsag::Ring, std::size_t> build_ring(const GroupPoint& own,
                                              std::span<const CommitmentRecord> decoys,
                                              RandomSource& rng);

// Ledger account derived from a commitment; the simulator analog of the
// user's funding address.
avm::Address account_address(const GroupPoint& commitment);

// [AppCall(Deposit, [P]), Payment(escrow, denomination)] with pooled fees.
std::vector<avm::Transaction> make_deposit(const lsag::KeyPair& keypair,
                                           const avm::Address& sender,
                                           const mixer::ContractConfig& config);

// Single Withdraw call: signs with m = recipient, packs the proof, references
// the nullifier and every ring commitment, and attaches fees for the outer
// call, the opup burst and the inner payment.
avm::Transaction make_withdraw(const lsag::KeyPair& keypair, const lsag::Ring& ring,
                               std::size_t pi, const avm::Address& recipient,
                               const avm::Address& sender, const mixer::ContractConfig& config,
                               RandomSource& rng);

// Keypair file: {"secret_x", "commitment", "key_image"}, hex encoded.
std::string keypair_to_json(const lsag::KeyPair& keypair);
lsag::KeyPair keypair_from_json(std::string_view doc);  // throws MalformedDocument

}  // namespace obscura::client
