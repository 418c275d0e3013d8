#pragma once

#include "obscura/client.hpp"
#include "obscura/lens.hpp"

namespace obscura::scenario {

// Maps each committed withdrawal to the commitment that actually funded it;
// only the runner knows this, which is what makes analyzer soundness testable.
struct GroundTruth {
    Bytes64 key_image{};
    Bytes64 true_commitment{};
};

struct ScenarioOutcome {
    nlohmann::json transcript;
    avm::LedgerState final_state;
    std::vector<GroundTruth> ground_truth;
};

// Script: {"seed": u64, "actions": [{"deposit": actor} |
//          {"withdraw": actor, "ring_size": 2..5, "delay_rounds": k} |
//          {"advance": rounds}]}
// Runs against a fresh ledger; deterministic under a fixed seed.
ScenarioOutcome run_scenario(const nlohmann::json& script);   // throws Error(ScriptError)
ScenarioOutcome run_scenario_text(std::string_view script);

}  // namespace obscura::scenario
