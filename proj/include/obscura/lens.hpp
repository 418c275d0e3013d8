#pragma once

#include <optional>
#include <span>

#include "obscura/json_io.hpp"

namespace obscura::lens {

// One committed withdrawal, extracted verbatim from the ledger log.
struct WithdrawalObservation {
    std::vector<Bytes64> ring;
    Bytes64 key_image{};
    std::uint64_t round = 0;
    avm::Address recipient{};
};

std::vector<WithdrawalObservation> extract_observations(const avm::LedgerState& state);

struct AttributionReport {
    std::map<Bytes64, Bytes64> attributions;             // key image -> spent commitment
    std::map<Bytes64, std::size_t> effective_anonymity;  // key image -> surviving candidates

    std::optional<Bytes64> attribution_for(const Bytes64& key_image) const {
        auto it = attributions.find(key_image);
        if (it == attributions.end())
            return std::nullopt;
        return it->second;
    }
};

// Fixpoint elimination: whenever a ring is left with exactly one member not
// already tied to a different key image, that member must be the spend.
AttributionReport chain_reaction(std::span<const WithdrawalObservation> observations);

struct AnonymityRow {
    std::uint64_t round = 0;
    std::size_t ring_size = 0;
    Bytes64 key_image{};
    avm::Address recipient{};
    std::vector<std::uint64_t> decoy_ages;  // rounds from member deposit to spend
    std::size_t effective_anonymity = 0;
    std::optional<Bytes64> attributed;
};

struct AnonymitySummary {
    std::vector<AnonymityRow> rows;
    std::uint64_t deposits = 0;
    std::uint64_t spends = 0;
    std::uint64_t unspent = 0;
};

AnonymitySummary anonymity_report(const avm::LedgerState& state);

nlohmann::json to_json(const AnonymitySummary& summary);

}  // namespace obscura::lens
