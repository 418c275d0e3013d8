#include "obscura/lens.hpp"

namespace obscura::lens {

using nlohmann::json;

std::vector<WithdrawalObservation> extract_observations(const avm::LedgerState& state) {
    std::vector<WithdrawalObservation> out;
    for (const avm::Receipt& receipt : state.log)
        for (const avm::LogEvent& ev : receipt.events)
            if (const auto* w = std::get_if<avm::WithdrawEvent>(&ev))
                out.push_back(WithdrawalObservation{w->ring, w->key_image, receipt.round,
                                                    w->recipient});
    return out;
}

AttributionReport chain_reaction(std::span<const WithdrawalObservation> observations) {
    AttributionReport report;
    std::map<Bytes64, Bytes64> owner;  // commitment -> key image it is pinned to

    auto candidates_of = [&](const WithdrawalObservation& w) {
        std::vector<Bytes64> cands;
        for (const Bytes64& member : w.ring) {
            auto it = owner.find(member);
            if (it == owner.end() || it->second == w.key_image)
                cands.push_back(member);
        }
        return cands;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& w : observations) {
            if (report.attributions.contains(w.key_image))
                continue;
            auto cands = candidates_of(w);
            if (cands.size() == 1) {
                report.attributions[w.key_image] = cands[0];
                owner[cands[0]] = w.key_image;
                changed = true;
            }
        }
    }

    for (const auto& w : observations) {
        std::size_t count = candidates_of(w).size();
        report.effective_anonymity[w.key_image] = count == 0 ? 1 : count;
    }
    return report;
}

AnonymitySummary anonymity_report(const avm::LedgerState& state) {
    std::map<Bytes64, std::uint64_t> deposit_round;
    for (const avm::Receipt& receipt : state.log)
        for (const avm::LogEvent& ev : receipt.events)
            if (const auto* d = std::get_if<avm::DepositEvent>(&ev))
                deposit_round[d->commitment] = receipt.round;

    std::vector<WithdrawalObservation> observations = extract_observations(state);
    AttributionReport reaction = chain_reaction(observations);

    AnonymitySummary summary;
    summary.deposits = state.app_globals.deposit_counter;
    summary.spends = observations.size();
    summary.unspent = summary.deposits - summary.spends;

    for (const auto& w : observations) {
        AnonymityRow row;
        row.round = w.round;
        row.ring_size = w.ring.size();
        row.key_image = w.key_image;
        row.recipient = w.recipient;
        for (const Bytes64& member : w.ring) {
            auto it = deposit_round.find(member);
            row.decoy_ages.push_back(it == deposit_round.end() ? 0 : w.round - it->second);
        }
        row.effective_anonymity = reaction.effective_anonymity[w.key_image];
        row.attributed = reaction.attribution_for(w.key_image);
        summary.rows.push_back(std::move(row));
    }
    return summary;
}

json to_json(const AnonymitySummary& summary) {
    json rows = json::array();
    for (const auto& row : summary.rows) {
        json r{{"round", row.round},
               {"ring_size", row.ring_size},
               {"key_image", to_hex(row.key_image)},
               {"recipient", to_hex(row.recipient)},
               {"decoy_ages", row.decoy_ages},
               {"effective_anonymity", row.effective_anonymity}};
        if (row.attributed)
            r["attributed"] = to_hex(*row.attributed);
        rows.push_back(std::move(r));
    }
    return json{{"withdrawals", rows},
                {"pool", json{{"deposits", summary.deposits},
                              {"spends", summary.spends},
                              {"unspent", summary.unspent}}}};
}

}  // namespace obscura::lens
