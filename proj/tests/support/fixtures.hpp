#pragma once

#include <stdexcept>

#include "obscura/client.hpp"

namespace testutil {

using namespace obscura;

// A mixer deployment on a fresh ledger plus helpers for driving it.
// Helpers throw std::runtime_error on unexpected outcomes so they work both
// under doctest and in the acceptance harness.
struct MixerFixture {
    mixer::ContractConfig config{};
    avm::AppRegistry registry;
    avm::LedgerState state;
    SeededRandomSource rng{12345};

    MixerFixture() : registry(mixer::make_registry(config)), state(mixer::make_genesis(config)) {}
    explicit MixerFixture(const mixer::ContractConfig& cfg)
        : config(cfg), registry(mixer::make_registry(cfg)), state(mixer::make_genesis(cfg)) {}

    avm::Address new_funded(std::uint64_t amount = 50'000'000) {
        avm::Address addr{};
        rng.fill(addr);
        state.accounts[addr] = amount;
        return addr;
    }

    avm::SubmitResult submit(const std::vector<avm::Transaction>& group) {
        auto result = avm::submit_group(state, group, registry);
        if (auto* ok = std::get_if<avm::SubmitOk>(&result))
            state = ok->state;
        return result;
    }

    avm::Receipt must_commit(const std::vector<avm::Transaction>& group) {
        auto result = submit(group);
        if (auto* rej = std::get_if<avm::Rejection>(&result))
            throw std::runtime_error("group rejected: " +
                                     std::string(avm::reject_reason_name(rej->reason)) + " (" +
                                     rej->detail + ")");
        return std::get<avm::SubmitOk>(result).receipt;
    }

    avm::Rejection must_reject(const std::vector<avm::Transaction>& group,
                               avm::RejectReason reason) {
        auto before = avm::persist(state);
        auto result = submit(group);
        auto* rej = std::get_if<avm::Rejection>(&result);
        if (!rej)
            throw std::runtime_error("group committed but a rejection was expected");
        if (rej->reason != reason)
            throw std::runtime_error(
                    std::string("expected ") + std::string(avm::reject_reason_name(reason)) +
                    ", got " + std::string(avm::reject_reason_name(rej->reason)) + " (" +
                    rej->detail + ")");
        if (avm::persist(state) != before)
            throw std::runtime_error("state changed across a rejected group");
        return *rej;
    }

    lsag::KeyPair deposit_new() {
        lsag::KeyPair kp = lsag::keygen(rng);
        avm::Address sender = new_funded();
        must_commit(client::make_deposit(kp, sender, config));
        return kp;
    }

    // Deterministic ring: n-1 pool decoys with the signer placed at pi.
    std::pair<lsag::Ring, std::size_t> ring_with(const lsag::KeyPair& kp, std::size_t n,
                                                 std::size_t pi) {
        auto records = client::list_commitments(state);
        std::vector<GroupPoint> members;
        for (const auto& rec : records) {
            if (members.size() + 1 >= n)
                break;
            if (!(rec.point == kp.commitment))
                members.push_back(rec.point);
        }
        if (members.size() + 1 != n)
            throw std::runtime_error("pool too small for the requested ring");
        members.insert(members.begin() + static_cast<std::ptrdiff_t>(pi), kp.commitment);
        return {lsag::Ring(std::move(members)), pi};
    }

    avm::Transaction withdraw_txn(const lsag::KeyPair& kp, const lsag::Ring& ring, std::size_t pi,
                                  const avm::Address& recipient) {
        return client::make_withdraw(kp, ring, pi, recipient, new_funded(), config, rng);
    }

    avm::Address fresh_address() {
        avm::Address addr{};
        rng.fill(addr);
        return addr;
    }
};

inline std::uint64_t total_balances(const avm::LedgerState& state) {
    std::uint64_t sum = 0;
    for (const auto& [addr, bal] : state.accounts)
        sum += bal;
    return sum;
}

// Conserved quantity: balances + collected fees + locked storage deposits.
inline std::uint64_t conserved_total(const avm::LedgerState& state) {
    return total_balances(state) + state.fees_collected + state.locked_mbr;
}

}  // namespace testutil
