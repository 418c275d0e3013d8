#include "obscura/mixer_contract.hpp"

#include <cstring>

#include "obscura/proof_codec.hpp"

namespace obscura::mixer {

using avm::LedgerError;
using avm::RejectReason;

avm::Address escrow_address(std::uint64_t app_id) {
    std::uint8_t buf[17 + 8];
    std::memcpy(buf, "Obscura/escrow/v1", 17);
    for (int i = 0; i < 8; ++i)
        buf[17 + i] = static_cast<std::uint8_t>(app_id >> (56 - 8 * i));
    return sha256(buf);
}

std::uint64_t compute_payout(const ContractConfig& config) {
    return config.denomination - avm::MIN_FEE - avm::BOX_MBR;
}

avm::BoxKey commitment_box_key(const Bytes64& commitment) {
    avm::BoxKey key;
    key.reserve(33);
    key.push_back('c');
    key.insert(key.end(), commitment.begin(), commitment.begin() + 32);
    return key;
}

avm::BoxKey nullifier_box_key(const Bytes64& key_image) {
    avm::BoxKey key;
    key.reserve(33);
    key.push_back('n');
    key.insert(key.end(), key_image.begin(), key_image.begin() + 32);
    return key;
}

namespace {

void handle_deposit(avm::GroupContext& ctx, const avm::Transaction& txn,
                    const ContractConfig& config) {
    const auto& group = ctx.group();
    if (group.size() != 2 || ctx.current_index() != 0 ||
        group[1].kind != avm::Transaction::Kind::Payment)
        throw LedgerError(RejectReason::WrongGroupShape,
                          "deposit must be [AppCall, Payment]");
    if (txn.args.size() != 1 || txn.args[0].size() != 64)
        throw LedgerError(RejectReason::MalformedPoint, "expected one 64-byte argument");

    GroupPoint commitment;
    try {
        commitment = deserialize_point(txn.args[0]);
    } catch (const Error& e) {
        throw LedgerError(RejectReason::MalformedPoint, e.what());
    }

    const avm::Transaction& payment = group[1];
    if (!(payment.receiver == config.escrow))
        throw LedgerError(RejectReason::WrongReceiver);
    if (payment.amount != config.denomination)
        throw LedgerError(RejectReason::WrongAmount,
                          std::to_string(payment.amount) + " != " +
                                  std::to_string(config.denomination));

    Bytes64 encoded = serialize_point(commitment);
    avm::BoxKey key = commitment_box_key(encoded);
    if (avm::box_lookup(ctx.state(), key))
        throw LedgerError(RejectReason::DuplicateCommitment);

    avm::box_write(ctx.state(), key, avm::BoxValue(encoded.begin(), encoded.end()),
                   config.escrow);
    std::uint64_t index = ctx.state().app_globals.deposit_counter++;
    ctx.log_event(avm::DepositEvent{encoded, index});
}

void handle_withdraw(avm::GroupContext& ctx, const avm::Transaction& txn,
                     const ContractConfig& config) {
    if (txn.args.size() != 3 || txn.args[0].size() != 64 || txn.args[2].size() != 32)
        throw LedgerError(RejectReason::MalformedProof,
                          "expected [key image, packed proof, recipient]");

    GroupPoint key_image;
    std::optional<std::pair<lsag::Ring, lsag::LsagSignature>> parsed;
    try {
        key_image = deserialize_point(txn.args[0]);
        parsed = codec::unpack(txn.args[1]);
    } catch (const Error& e) {
        if (e.code() == Errc::DuplicateMember)
            throw LedgerError(RejectReason::RingDuplicate, e.what());
        throw LedgerError(RejectReason::MalformedProof, e.what());
    }
    const lsag::Ring& ring = parsed->first;
    const lsag::LsagSignature& sig = parsed->second;

    const std::size_t n = ring.size();
    if (n > config.max_ring)
        throw LedgerError(RejectReason::RingTooLarge, std::to_string(n));
    if (n < config.min_ring)
        throw LedgerError(RejectReason::RingTooSmall, std::to_string(n));

    Bytes32 recipient_bytes{};
    std::memcpy(recipient_bytes.data(), txn.args[2].data(), 32);
    const avm::Address recipient = recipient_bytes;

    Bytes64 image_encoded = serialize_point(key_image);
    avm::BoxKey nullifier_key = nullifier_box_key(image_encoded);
    std::vector<Bytes64> ring_encoded;
    ring_encoded.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        ring_encoded.push_back(serialize_point(ring[i]));

    // Declared box references must cover everything the call touches.
    auto referenced = [&](const avm::BoxKey& key) {
        for (const auto& ref : txn.box_refs)
            if (ref == key)
                return true;
        return false;
    };
    if (!referenced(nullifier_key))
        throw LedgerError(RejectReason::MissingBoxReference, "nullifier box");
    for (std::size_t i = 0; i < n; ++i)
        if (!referenced(commitment_box_key(ring_encoded[i])))
            throw LedgerError(RejectReason::MissingBoxReference,
                              "commitment box for ring index " + std::to_string(i));

    // 1. budget provisioning
    std::uint64_t opups = config.opup_override.value_or(config.opup_factor * n);
    for (std::uint64_t i = 0; i < opups; ++i)
        ctx.opup(config.dummy_app_id);
    avm::charge(ctx.meter(), config.fixed_verify_overhead);

    // 2. double-spend assertion, ahead of any cryptographic charge
    if (avm::box_lookup(ctx.state(), nullifier_key))
        throw LedgerError(RejectReason::DoubleSpend);

    // 3. anonymity-set validation: every ring member is a recorded deposit
    for (std::size_t i = 0; i < n; ++i) {
        auto stored = avm::box_lookup(ctx.state(), commitment_box_key(ring_encoded[i]));
        if (!stored || !std::equal(stored->begin(), stored->end(), ring_encoded[i].begin(),
                                   ring_encoded[i].end()))
            throw LedgerError(RejectReason::UnknownRingMember, "ring index " + std::to_string(i));
    }

    // 4. metered verification loop
    const avm::CostTable& costs = ctx.costs();
    Challenge c = sig.c0;
    Bytes32 m = recipient_bytes;
    try {
        for (std::size_t i = 0; i < n; ++i) {
            avm::charge(ctx.meter(), costs.cost_scalar_mul);
            GroupPoint lg = point_mul(generator_g(), sig.s[i]);
            avm::charge(ctx.meter(), costs.cost_scalar_mul);
            GroupPoint lp = point_mul(ring[i], c);
            avm::charge(ctx.meter(), costs.cost_ec_add);
            GroupPoint l = point_add(lg, lp);
            avm::charge(ctx.meter(), costs.cost_scalar_mul);
            GroupPoint rh = point_mul(generator_h(), sig.s[i]);
            avm::charge(ctx.meter(), costs.cost_scalar_mul);
            GroupPoint ri = point_mul(key_image, c);
            avm::charge(ctx.meter(), costs.cost_ec_add);
            GroupPoint r = point_add(rh, ri);
            avm::charge(ctx.meter(), costs.cost_hash_iteration);
            c = hash_to_challenge(m, l, r);
        }
    } catch (const Error&) {
        // an unserializable intermediate point cannot close the ring
        throw LedgerError(RejectReason::InvalidSignature, "degenerate verification point");
    }

    // 5. closure and settlement
    if (!(c == sig.c0))
        throw LedgerError(RejectReason::InvalidSignature, "challenge chain does not close");

    avm::box_write(ctx.state(), nullifier_key,
                   avm::BoxValue(image_encoded.begin(), image_encoded.end()), config.escrow);
    ctx.inner_payment(config.escrow, recipient, config.payout);
    ctx.log_event(avm::WithdrawEvent{image_encoded, std::move(ring_encoded), recipient,
                                     config.payout});
}

}  // namespace

avm::AppRegistry make_registry(const ContractConfig& config) {
    if (config.payout != compute_payout(config))
        throw std::invalid_argument("mixer config: payout must equal denomination - fee - MBR");
    if (config.min_ring < 1 || config.max_ring > 255 || config.min_ring > config.max_ring)
        throw std::invalid_argument("mixer config: bad ring bounds");

    avm::AppRegistry registry;
    registry.handlers[config.app_id] = [config](avm::GroupContext& ctx,
                                                const avm::Transaction& txn) {
        switch (txn.method) {
            case avm::Method::Deposit:
                handle_deposit(ctx, txn, config);
                break;
            case avm::Method::Withdraw:
                handle_withdraw(ctx, txn, config);
                break;
            default:
                throw LedgerError(RejectReason::WrongGroupShape, "unsupported method");
        }
    };
    registry.handlers[config.dummy_app_id] = [](avm::GroupContext&, const avm::Transaction&) {
        // stateless opup target: approve and do nothing
    };
    return registry;
}

avm::LedgerState make_genesis(const ContractConfig& config, std::uint64_t escrow_float) {
    avm::LedgerState state;
    state.accounts[config.escrow] = escrow_float;
    return state;
}

}  // namespace obscura::mixer
