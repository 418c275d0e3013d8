#include <doctest.h>

#include "obscura/mixer_contract.hpp"
#include "obscura/proof_codec.hpp"
#include "support/fixtures.hpp"

using namespace obscura;
using namespace obscura::avm;
using testutil::MixerFixture;

TEST_CASE("compute_payout") {
    mixer::ContractConfig config;
    CHECK(mixer::compute_payout(config) == 899'000);

    mixer::ContractConfig big;
    big.denomination = 2'000'000;
    CHECK(mixer::compute_payout(big) == 1'899'000);
}

TEST_CASE("box key schema") {
    Bytes64 p{};
    for (std::size_t i = 0; i < 64; ++i)
        p[i] = static_cast<std::uint8_t>(i);
    BoxKey ck = mixer::commitment_box_key(p);
    REQUIRE(ck.size() == 33);
    CHECK(ck[0] == 'c');
    CHECK(std::equal(ck.begin() + 1, ck.end(), p.begin()));
    BoxKey nk = mixer::nullifier_box_key(p);
    CHECK(nk[0] == 'n');
    CHECK(nk.size() == 33);
}

TEST_CASE("deposit writes the commitment box and bumps the counter") {
    MixerFixture fix;
    lsag::KeyPair kp = lsag::keygen(fix.rng);
    Address sender = fix.new_funded();
    Receipt receipt = fix.must_commit(client::make_deposit(kp, sender, fix.config));

    Bytes64 encoded = serialize_point(kp.commitment);
    auto stored = box_lookup(fix.state, mixer::commitment_box_key(encoded));
    REQUIRE(stored.has_value());
    CHECK(std::equal(stored->begin(), stored->end(), encoded.begin(), encoded.end()));
    CHECK(fix.state.app_globals.deposit_counter == 1);
    REQUIRE(receipt.events.size() == 1);
    CHECK(std::get<DepositEvent>(receipt.events[0]).deposit_index == 0);
}

TEST_CASE("deposit counter equals the number of commitment boxes") {
    MixerFixture fix;
    for (int i = 0; i < 5; ++i)
        fix.deposit_new();
    std::size_t commitment_boxes = 0;
    for (const auto& [key, value] : fix.state.boxes)
        if (!key.empty() && key[0] == 'c')
            ++commitment_boxes;
    CHECK(fix.state.app_globals.deposit_counter == commitment_boxes);
    CHECK(commitment_boxes == 5);
}

TEST_CASE("deposit rejections") {
    MixerFixture fix;
    lsag::KeyPair kp = lsag::keygen(fix.rng);
    Address sender = fix.new_funded(10'000'000);

    SUBCASE("duplicate commitment") {
        fix.must_commit(client::make_deposit(kp, sender, fix.config));
        fix.must_reject(client::make_deposit(kp, sender, fix.config),
                        RejectReason::DuplicateCommitment);
    }
    SUBCASE("wrong amount") {
        auto group = client::make_deposit(kp, sender, fix.config);
        group[1].amount = 999'999;
        fix.must_reject(group, RejectReason::WrongAmount);
    }
    SUBCASE("wrong receiver") {
        auto group = client::make_deposit(kp, sender, fix.config);
        group[1].receiver = fix.fresh_address();
        fix.must_reject(group, RejectReason::WrongReceiver);
    }
    SUBCASE("swapped group order") {
        auto group = client::make_deposit(kp, sender, fix.config);
        std::swap(group[0], group[1]);
        fix.must_reject(group, RejectReason::WrongGroupShape);
    }
    SUBCASE("missing payment leg") {
        auto group = client::make_deposit(kp, sender, fix.config);
        group.pop_back();
        fix.must_reject(group, RejectReason::WrongGroupShape);
    }
    SUBCASE("malformed point") {
        auto group = client::make_deposit(kp, sender, fix.config);
        group[0].args[0][63] ^= 0x01;
        fix.must_reject(group, RejectReason::MalformedPoint);
    }
}

namespace {

struct WithdrawSetup {
    MixerFixture fix;
    std::vector<lsag::KeyPair> keypairs;

    explicit WithdrawSetup(std::size_t deposits = 6) {
        for (std::size_t i = 0; i < deposits; ++i)
            keypairs.push_back(fix.deposit_new());
    }
};

}  // namespace

TEST_CASE("withdraw pays out exactly the configured amount") {
    WithdrawSetup setup;
    auto& fix = setup.fix;

    for (std::size_t n = 2; n <= 5; ++n) {
        lsag::KeyPair kp = setup.keypairs[n - 2];
        auto [ring, pi] = fix.ring_with(kp, n, n / 2);
        Address recipient = fix.fresh_address();
        Receipt receipt = fix.must_commit({fix.withdraw_txn(kp, ring, pi, recipient)});

        CHECK(fix.state.balance(recipient) == 899'000);
        auto nullifier =
                box_lookup(fix.state, mixer::nullifier_box_key(serialize_point(kp.key_image)));
        REQUIRE(nullifier.has_value());

        // meter: fixed overhead plus the full per-index charge
        CHECK(receipt.meter.pooled == 700 * (1 + 20 * n));
        CHECK(receipt.meter.consumed ==
              fix.config.fixed_verify_overhead + fix.registry.costs.per_index_cost() * n);
        CHECK(receipt.inner_txns == 20 * n + 1);

        REQUIRE(receipt.events.size() == 1);
        const auto& ev = std::get<WithdrawEvent>(receipt.events[0]);
        CHECK(ev.payout == 899'000);
        CHECK(ev.ring.size() == n);
        CHECK(ev.recipient == recipient);
    }
}

TEST_CASE("withdraw replay is rejected before any loop charge") {
    WithdrawSetup setup;
    auto& fix = setup.fix;
    lsag::KeyPair kp = setup.keypairs[0];

    auto [ring, pi] = fix.ring_with(kp, 4, 1);
    fix.must_commit({fix.withdraw_txn(kp, ring, pi, fix.fresh_address())});

    // fresh decoys, same secret: the key image pins it down
    auto [ring2, pi2] = fix.ring_with(kp, 3, 2);
    Rejection rej = fix.must_reject({fix.withdraw_txn(kp, ring2, pi2, fix.fresh_address())},
                                    RejectReason::DoubleSpend);
    CHECK(rej.meter.consumed == fix.config.fixed_verify_overhead);
    CHECK(rej.meter.consumed < fix.registry.costs.per_index_cost());
}

TEST_CASE("withdraw rejects rings with unknown members") {
    WithdrawSetup setup;
    auto& fix = setup.fix;
    lsag::KeyPair kp = setup.keypairs[0];
    lsag::KeyPair outsider = lsag::keygen(fix.rng);  // never deposited

    std::vector<GroupPoint> members{kp.commitment, outsider.commitment,
                                    setup.keypairs[1].commitment};
    lsag::Ring ring(std::move(members));
    fix.must_reject({fix.withdraw_txn(kp, ring, 0, fix.fresh_address())},
                    RejectReason::UnknownRingMember);
}

TEST_CASE("withdraw enforces ring bounds") {
    WithdrawSetup setup(8);
    auto& fix = setup.fix;
    lsag::KeyPair kp = setup.keypairs[0];

    auto [big_ring, pi_big] = fix.ring_with(kp, 6, 0);
    fix.must_reject({fix.withdraw_txn(kp, big_ring, pi_big, fix.fresh_address())},
                    RejectReason::RingTooLarge);

    lsag::Ring solo({kp.commitment});
    fix.must_reject({fix.withdraw_txn(kp, solo, 0, fix.fresh_address())},
                    RejectReason::RingTooSmall);
}

TEST_CASE("withdraw requires complete box references") {
    WithdrawSetup setup;
    auto& fix = setup.fix;
    lsag::KeyPair kp = setup.keypairs[0];
    auto [ring, pi] = fix.ring_with(kp, 3, 1);

    Transaction txn = fix.withdraw_txn(kp, ring, pi, fix.fresh_address());
    SUBCASE("missing nullifier reference") {
        txn.box_refs.erase(txn.box_refs.begin());
        fix.must_reject({txn}, RejectReason::MissingBoxReference);
    }
    SUBCASE("missing commitment reference") {
        txn.box_refs.pop_back();
        fix.must_reject({txn}, RejectReason::MissingBoxReference);
    }
}

TEST_CASE("withdraw binds the recipient into the closure") {
    WithdrawSetup setup;
    auto& fix = setup.fix;
    lsag::KeyPair kp = setup.keypairs[0];
    auto [ring, pi] = fix.ring_with(kp, 5, 3);

    Transaction txn = fix.withdraw_txn(kp, ring, pi, fix.fresh_address());
    Address thief = fix.fresh_address();
    txn.args[2].assign(thief.begin(), thief.end());
    fix.must_reject({txn}, RejectReason::InvalidSignature);
    CHECK(fix.state.balance(thief) == 0);
}

TEST_CASE("withdraw rejects a tampered proof") {
    WithdrawSetup setup;
    auto& fix = setup.fix;
    lsag::KeyPair kp = setup.keypairs[0];
    auto [ring, pi] = fix.ring_with(kp, 3, 0);

    Transaction txn = fix.withdraw_txn(kp, ring, pi, fix.fresh_address());
    SUBCASE("flipped response byte") {
        txn.args[1][txn.args[1].size() - 1] ^= 0x01;
        fix.must_reject({txn}, RejectReason::InvalidSignature);
    }
    SUBCASE("truncated payload") {
        txn.args[1].pop_back();
        fix.must_reject({txn}, RejectReason::MalformedProof);
    }
    SUBCASE("duplicate ring member") {
        std::copy(txn.args[1].begin() + 1, txn.args[1].begin() + 1 + 64,
                  txn.args[1].begin() + 1 + 64);
        fix.must_reject({txn}, RejectReason::RingDuplicate);
    }
    SUBCASE("wrong key image") {
        lsag::KeyPair other = lsag::keygen(fix.rng);
        Bytes64 fake = serialize_point(other.key_image);
        txn.args[0].assign(fake.begin(), fake.end());
        txn.box_refs[0] = mixer::nullifier_box_key(fake);
        fix.must_reject({txn}, RejectReason::InvalidSignature);
    }
}

TEST_CASE("withdraw budget: 20n provisioning succeeds, one short fails") {
    for (std::size_t n = 2; n <= 5; ++n) {
        // generous provisioning
        {
            WithdrawSetup setup;
            auto& fix = setup.fix;
            lsag::KeyPair kp = setup.keypairs[0];
            auto [ring, pi] = fix.ring_with(kp, n, 0);
            fix.must_commit({fix.withdraw_txn(kp, ring, pi, fix.fresh_address())});
        }
        // forced under-provisioning: floor((11,000n + 400)/700) - 1 opups
        {
            mixer::ContractConfig config;
            std::uint64_t forced = (11'000 * n + 400) / 700 - 1;
            config.opup_override = forced;
            MixerFixture fix(config);
            std::vector<lsag::KeyPair> kps;
            for (std::size_t i = 0; i < n; ++i)
                kps.push_back(fix.deposit_new());
            auto [ring, pi] = fix.ring_with(kps[0], n, 0);
            Rejection rej = fix.must_reject(
                    {fix.withdraw_txn(kps[0], ring, pi, fix.fresh_address())},
                    RejectReason::BudgetExceeded);
            CHECK(rej.meter.pooled == 700 * (1 + forced));
        }
    }
}

TEST_CASE("withdraw with zero opups exhausts the base budget") {
    mixer::ContractConfig config;
    config.opup_override = 0;
    MixerFixture fix(config);
    std::vector<lsag::KeyPair> kps;
    for (int i = 0; i < 2; ++i)
        kps.push_back(fix.deposit_new());
    auto [ring, pi] = fix.ring_with(kps[0], 2, 0);
    fix.must_reject({fix.withdraw_txn(kps[0], ring, pi, fix.fresh_address())},
                    RejectReason::BudgetExceeded);
}

TEST_CASE("withdraw fee pooling covers the inner burst") {
    WithdrawSetup setup;
    auto& fix = setup.fix;
    lsag::KeyPair kp = setup.keypairs[0];
    auto [ring, pi] = fix.ring_with(kp, 3, 1);

    Transaction txn = fix.withdraw_txn(kp, ring, pi, fix.fresh_address());
    CHECK(txn.fee == (2 + 20 * 3) * MIN_FEE);
    txn.fee -= MIN_FEE;  // one transaction short
    fix.must_reject({txn}, RejectReason::InsufficientFee);
}

TEST_CASE("double spend fails for every choice of decoys") {
    WithdrawSetup setup(8);
    auto& fix = setup.fix;
    lsag::KeyPair kp = setup.keypairs[0];

    auto [ring, pi] = fix.ring_with(kp, 2, 0);
    fix.must_commit({fix.withdraw_txn(kp, ring, pi, fix.fresh_address())});

    auto records = client::list_commitments(fix.state);
    for (std::size_t start = 1; start + 1 < records.size(); ++start) {
        std::vector<GroupPoint> members{records[start].point, kp.commitment,
                                        records[start + 1].point};
        lsag::Ring retry(std::move(members));
        fix.must_reject({fix.withdraw_txn(kp, retry, 1, fix.fresh_address())},
                        RejectReason::DoubleSpend);
    }
}

TEST_CASE("escrow stays solvent for outstanding obligations") {
    WithdrawSetup setup(6);
    auto& fix = setup.fix;
    for (std::size_t i = 0; i < 3; ++i) {
        auto [ring, pi] = fix.ring_with(setup.keypairs[i], 4, i % 4);
        fix.must_commit({fix.withdraw_txn(setup.keypairs[i], ring, pi, fix.fresh_address())});

        std::uint64_t deposits = fix.state.app_globals.deposit_counter;
        std::uint64_t spends = i + 1;
        std::uint64_t unspent = deposits - spends;
        CHECK(fix.state.balance(fix.config.escrow) >=
              unspent * fix.config.payout + fix.state.locked_mbr);
    }
}

TEST_CASE("mixer config validation") {
    mixer::ContractConfig bad;
    bad.payout = 900'000;
    CHECK_THROWS_AS(mixer::make_registry(bad), std::invalid_argument);

    mixer::ContractConfig bounds;
    bounds.min_ring = 0;
    CHECK_THROWS_AS(mixer::make_registry(bounds), std::invalid_argument);
}
