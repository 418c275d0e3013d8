#pragma once

#include <optional>

#include "obscura/avm_ledger.hpp"
#include "obscura/curve.hpp"

namespace obscura::mixer {

inline constexpr std::uint64_t MIXER_APP_ID = 1001;
inline constexpr std::uint64_t DUMMY_APP_ID = 1002;

// Application escrow address, derived from the app id.
avm::Address escrow_address(std::uint64_t app_id = MIXER_APP_ID);

struct ContractConfig {
    std::uint64_t denomination = 1'000'000;
    std::uint64_t payout = 899'000;  // denomination - MIN_FEE - BOX_MBR
    std::size_t max_ring = 5;
    std::size_t min_ring = 2;
    std::uint64_t opup_factor = 20;  // inner opup calls per ring member
    avm::Address escrow = escrow_address();
    std::uint64_t app_id = MIXER_APP_ID;
    std::uint64_t dummy_app_id = DUMMY_APP_ID;

    // Non-loop verification cost: payload parsing plus box assertions.
    std::uint64_t fixed_verify_overhead = 500;

    // Simulation knob: exact opup count, overriding opup_factor * n.
    std::optional<std::uint64_t> opup_override;
};

// denomination - MIN_FEE - BOX_MBR; independent of ring size.
std::uint64_t compute_payout(const ContractConfig& config);

avm::BoxKey commitment_box_key(const Bytes64& commitment);
avm::BoxKey nullifier_box_key(const Bytes64& key_image);

// Registers the mixer application and the stateless opup target.
avm::AppRegistry make_registry(const ContractConfig& config);

// Fresh ledger with a funded escrow. The escrow float backs box MBR locks
// and payouts; the protocol's own cashflow runs 99,000 micro-ALGO short per
// deposit/withdraw cycle under the flat MBR schedule.
avm::LedgerState make_genesis(const ContractConfig& config,
                              std::uint64_t escrow_float = 10'000'000'000ULL);

}  // namespace obscura::mixer
