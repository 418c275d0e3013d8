#include "obscura/scenario.hpp"

#include <deque>

namespace obscura::scenario {

using nlohmann::json;

namespace {

struct Actor {
    avm::Address address{};
    std::deque<lsag::KeyPair> unspent;
    std::vector<lsag::KeyPair> spent;
};

[[noreturn]] void script_error(std::size_t index, const std::string& what) {
    throw Error(Errc::ScriptError, "action " + std::to_string(index) + ": " + what);
}

bool nonnegative_integer(const json& j) {
    return j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0);
}

std::uint64_t require_u64(const json& j, const char* field, std::size_t index) {
    if (!j.contains(field) || !nonnegative_integer(j.at(field)))
        script_error(index, std::string("missing or invalid '") + field + "'");
    return j.at(field).get<std::uint64_t>();
}

}  // namespace

ScenarioOutcome run_scenario(const json& script) {
    if (!script.is_object() || !script.contains("seed") || !nonnegative_integer(script.at("seed")))
        throw Error(Errc::ScriptError, "script requires an unsigned 'seed'");
    if (!script.contains("actions") || !script.at("actions").is_array())
        throw Error(Errc::ScriptError, "script requires an 'actions' array");

    const std::uint64_t seed = script.at("seed").get<std::uint64_t>();
    const json& actions = script.at("actions");

    SeededRandomSource rng(seed);
    mixer::ContractConfig config;
    avm::AppRegistry registry = mixer::make_registry(config);
    avm::LedgerState state = mixer::make_genesis(config);

    // Every named actor gets a funded account up front.
    std::map<std::string, Actor> actors;
    for (const json& action : actions) {
        for (const char* key : {"deposit", "withdraw"}) {
            if (action.is_object() && action.contains(key) && action.at(key).is_string()) {
                const std::string name = action.at(key).get<std::string>();
                if (!actors.contains(name)) {
                    Actor actor;
                    std::string tag = "Obscura/actor/v1/" + name;
                    actor.address = sha256({reinterpret_cast<const std::uint8_t*>(tag.data()),
                                            tag.size()});
                    actors.emplace(name, std::move(actor));
                }
            }
        }
    }
    for (auto& [name, actor] : actors)
        state.accounts[actor.address] = 100'000'000;

    ScenarioOutcome outcome;
    json transcript_actions = json::array();
    std::uint64_t meters_pooled = 0;
    std::uint64_t meters_consumed = 0;

    auto submit = [&](const std::vector<avm::Transaction>& group) -> avm::SubmitResult {
        auto result = avm::submit_group(state, group, registry);
        if (auto* ok = std::get_if<avm::SubmitOk>(&result))
            state = ok->state;
        return result;
    };

    for (std::size_t index = 0; index < actions.size(); ++index) {
        const json& action = actions[index];
        if (!action.is_object())
            script_error(index, "actions must be objects");
        json entry{{"index", index}, {"action", action}};

        if (action.contains("deposit")) {
            const std::string name = action.at("deposit").get<std::string>();
            Actor& actor = actors.at(name);
            lsag::KeyPair kp = lsag::keygen(rng);
            auto result = submit(client::make_deposit(kp, actor.address, config));
            if (auto* ok = std::get_if<avm::SubmitOk>(&result)) {
                actor.unspent.push_back(kp);
                entry["result"] = json{{"status", "committed"},
                                       {"receipt", avm::to_json(ok->receipt)}};
            } else {
                entry["result"] = json{{"status", "rejected"},
                                       {"rejection", avm::to_json(std::get<avm::Rejection>(result))}};
            }
        } else if (action.contains("withdraw")) {
            const std::string name = action.at("withdraw").get<std::string>();
            Actor& actor = actors.at(name);
            std::uint64_t ring_size =
                    action.contains("ring_size") ? require_u64(action, "ring_size", index) : 5;
            if (ring_size < 1 || ring_size > 255)
                script_error(index, "ring_size out of range");
            if (action.contains("delay_rounds"))
                avm::advance_rounds(state, require_u64(action, "delay_rounds", index));

            // No unspent deposit left: re-spend the most recent one, so the
            // transcript records the resulting DoubleSpend rejection.
            lsag::KeyPair kp;
            bool replay = actor.unspent.empty();
            if (replay) {
                if (actor.spent.empty())
                    script_error(index, "actor '" + name + "' has no deposit to withdraw");
                kp = actor.spent.back();
            } else {
                kp = actor.unspent.front();
            }

            auto records = client::list_commitments(state);
            std::vector<client::CommitmentRecord> decoys;
            try {
                decoys = client::select_decoys(records, kp.commitment, ring_size - 1, {}, rng);
            } catch (const Error& e) {
                script_error(index, e.what());
            }
            auto [ring, pi] = client::build_ring(kp.commitment, decoys, rng);

            avm::Address recipient{};
            rng.fill(recipient);
            avm::Transaction txn =
                    client::make_withdraw(kp, ring, pi, recipient, actor.address, config, rng);
            auto result = submit({txn});
            if (auto* ok = std::get_if<avm::SubmitOk>(&result)) {
                if (!replay) {
                    actor.spent.push_back(kp);
                    actor.unspent.pop_front();
                }
                outcome.ground_truth.push_back(GroundTruth{
                        serialize_point(kp.key_image), serialize_point(kp.commitment)});
                meters_pooled += ok->receipt.meter.pooled;
                meters_consumed += ok->receipt.meter.consumed;
                entry["result"] = json{{"status", "committed"},
                                       {"receipt", avm::to_json(ok->receipt)}};
            } else {
                entry["result"] = json{{"status", "rejected"},
                                       {"rejection", avm::to_json(std::get<avm::Rejection>(result))}};
            }
        } else if (action.contains("advance")) {
            avm::advance_rounds(state, require_u64(action, "advance", index));
            entry["result"] = json{{"status", "advanced"}, {"round", state.round}};
        } else {
            script_error(index, "unknown action");
        }
        transcript_actions.push_back(std::move(entry));
    }

    json balances = json::object();
    for (const auto& [addr, bal] : state.accounts)
        balances[to_hex(addr)] = bal;
    json ground_truth = json::object();
    for (const auto& gt : outcome.ground_truth)
        ground_truth[to_hex(gt.key_image)] = to_hex(gt.true_commitment);

    outcome.transcript = json{
            {"seed", seed},
            {"actions", std::move(transcript_actions)},
            {"final",
             json{{"round", state.round},
                  {"balances", std::move(balances)},
                  {"fees_collected", state.fees_collected},
                  {"locked_mbr", state.locked_mbr}}},
            {"meters", json{{"pooled", meters_pooled}, {"consumed", meters_consumed}}},
            {"anonymity", lens::to_json(lens::anonymity_report(state))},
            {"ground_truth", std::move(ground_truth)}};
    outcome.final_state = std::move(state);
    return outcome;
}

ScenarioOutcome run_scenario_text(std::string_view script) {
    json parsed = json::parse(script, nullptr, false);
    if (parsed.is_discarded())
        throw Error(Errc::ScriptError, "script is not valid JSON");
    return run_scenario(parsed);
}

}  // namespace obscura::scenario
