#include "obscura/client.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "obscura/proof_codec.hpp"

namespace obscura::client {

using nlohmann::json;

std::vector<CommitmentRecord> list_commitments(const avm::LedgerState& state) {
    std::vector<CommitmentRecord> records;
    for (const avm::Receipt& receipt : state.log) {
        for (const avm::LogEvent& ev : receipt.events) {
            const auto* dep = std::get_if<avm::DepositEvent>(&ev);
            if (!dep)
                continue;
            CommitmentRecord rec;
            rec.encoded = dep->commitment;
            rec.point = deserialize_point(dep->commitment);
            rec.deposit_index = dep->deposit_index;
            rec.round = receipt.round;
            records.push_back(rec);
        }
    }
    std::sort(records.begin(), records.end(),
              [](const auto& a, const auto& b) { return a.deposit_index < b.deposit_index; });
    return records;
}

std::vector<CommitmentRecord> select_decoys(std::span<const CommitmentRecord> records,
                                            const GroupPoint& own, std::size_t k,
                                            const DecoySelection& config, RandomSource& rng) {
    if (!(config.lambda > 0.0) || !(config.lambda < 1.0))
        throw std::invalid_argument("select_decoys: lambda must lie in (0, 1)");

    // Candidates newest-first; rank 0 is the most recent deposit.
    std::vector<CommitmentRecord> candidates;
    for (const auto& rec : records)
        if (!(rec.point == own))
            candidates.push_back(rec);
    std::sort(candidates.begin(), candidates.end(),
              [](const auto& a, const auto& b) { return a.deposit_index > b.deposit_index; });

    if (candidates.size() < k)
        throw Error(Errc::InsufficientPool, std::to_string(candidates.size()) + " candidates, " +
                                                    std::to_string(k) + " needed");

    // The recency cap never shrinks the pool below the request size.
    std::size_t eligible = std::min(candidates.size(), std::max(config.recent_cap, k));
    candidates.resize(eligible);

    std::vector<double> weights(eligible);
    for (std::size_t r = 0; r < eligible; ++r)
        weights[r] = std::pow(1.0 - config.lambda, static_cast<double>(r));

    std::vector<CommitmentRecord> chosen;
    chosen.reserve(k);
    for (std::size_t draw = 0; draw < k; ++draw) {
        double total = 0.0;
        for (double w : weights)
            total += w;
        double target = (static_cast<double>(rng.next_u64()) / 18446744073709551616.0) * total;
        std::size_t pick = eligible - 1;
        double acc = 0.0;
        for (std::size_t r = 0; r < eligible; ++r) {
            if (weights[r] <= 0.0)
                continue;
            acc += weights[r];
            if (target < acc) {
                pick = r;
                break;
            }
        }
        chosen.push_back(candidates[pick]);
        weights[pick] = 0.0;  // without replacement
    }
    return chosen;
}

std::pair<lsag::Ring, std::size_t> build_ring(const GroupPoint& own,
                                              std::span<const CommitmentRecord> decoys,
                                              RandomSource& rng) {
    std::vector<GroupPoint> members;
    members.reserve(decoys.size() + 1);
    for (const auto& rec : decoys)
        members.push_back(rec.point);
    members.push_back(own);

    for (std::size_t i = members.size() - 1; i > 0; --i) {
        std::size_t j = uniform_below(rng, i + 1);
        std::swap(members[i], members[j]);
    }

    std::size_t pi = 0;
    for (std::size_t i = 0; i < members.size(); ++i)
        if (members[i] == own)
            pi = i;
    return {lsag::Ring(std::move(members)), pi};
}

avm::Address account_address(const GroupPoint& commitment) {
    Bytes64 encoded = serialize_point(commitment);
    std::uint8_t buf[18 + 64];
    std::memcpy(buf, "Obscura/account/v1", 18);
    std::memcpy(buf + 18, encoded.data(), 64);
    return sha256(buf);
}

std::vector<avm::Transaction> make_deposit(const lsag::KeyPair& keypair,
                                           const avm::Address& sender,
                                           const mixer::ContractConfig& config) {
    Bytes64 encoded = serialize_point(keypair.commitment);
    avm::Transaction call = avm::Transaction::app_call(
            sender, config.app_id, avm::Method::Deposit,
            {std::vector<std::uint8_t>(encoded.begin(), encoded.end())},
            {mixer::commitment_box_key(encoded)}, avm::MIN_FEE);
    avm::Transaction payment =
            avm::Transaction::payment(sender, config.escrow, config.denomination, avm::MIN_FEE);
    return {std::move(call), std::move(payment)};
}

avm::Transaction make_withdraw(const lsag::KeyPair& keypair, const lsag::Ring& ring,
                               std::size_t pi, const avm::Address& recipient,
                               const avm::Address& sender, const mixer::ContractConfig& config,
                               RandomSource& rng) {
    Bytes32 m = recipient;
    lsag::LsagSignature sig = lsag::sign(keypair.x, ring, pi, m, rng);
    codec::PackedProof proof = codec::pack(ring, sig);

    Bytes64 image = serialize_point(keypair.key_image);
    std::vector<avm::BoxKey> refs;
    refs.push_back(mixer::nullifier_box_key(image));
    for (const GroupPoint& member : ring.members())
        refs.push_back(mixer::commitment_box_key(serialize_point(member)));

    std::uint64_t opups = config.opup_override.value_or(config.opup_factor * ring.size());
    std::uint64_t fee = (2 + opups) * avm::MIN_FEE;  // outer call + opups + inner payment

    return avm::Transaction::app_call(
            sender, config.app_id, avm::Method::Withdraw,
            {std::vector<std::uint8_t>(image.begin(), image.end()), std::move(proof.bytes),
             std::vector<std::uint8_t>(m.begin(), m.end())},
            std::move(refs), fee);
}

std::string keypair_to_json(const lsag::KeyPair& keypair) {
    json doc{{"secret_x", to_hex(keypair.x.to_bytes())},
             {"commitment", to_hex(serialize_point(keypair.commitment))},
             {"key_image", to_hex(serialize_point(keypair.key_image))}};
    return doc.dump(2);
}

lsag::KeyPair keypair_from_json(std::string_view doc) {
    try {
        json j = json::parse(doc);
        auto xb = from_hex_fixed<32>(j.at("secret_x").get<std::string>());
        auto pb = from_hex_fixed<64>(j.at("commitment").get<std::string>());
        auto ib = from_hex_fixed<64>(j.at("key_image").get<std::string>());
        if (!xb || !pb || !ib)
            throw Error(Errc::MalformedDocument, "bad hex in keypair file");
        auto x = Scalar::from_bytes_checked(*xb);
        if (!x || x->is_zero())
            throw Error(Errc::MalformedDocument, "secret out of range");
        lsag::KeyPair kp;
        kp.x = *x;
        kp.commitment = deserialize_point(*pb);
        kp.key_image = deserialize_point(*ib);
        if (!(point_mul(generator_g(), kp.x) == kp.commitment) ||
            !(point_mul(generator_h(), kp.x) == kp.key_image))
            throw Error(Errc::MalformedDocument, "keypair fields are inconsistent");
        return kp;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(Errc::MalformedDocument, e.what());
    }
}

}  // namespace obscura::client
