#pragma once

#include <json.hpp>

#include "obscura/avm_ledger.hpp"

namespace obscura::avm {

nlohmann::json to_json(const BudgetMeter& meter);
nlohmann::json to_json(const LogEvent& event);
nlohmann::json to_json(const Receipt& receipt);
nlohmann::json to_json(const Rejection& rejection);

}  // namespace obscura::avm
