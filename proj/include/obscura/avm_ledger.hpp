#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "obscura/bytes.hpp"

namespace obscura::avm {

using Address = Bytes32;
using BoxKey = std::vector<std::uint8_t>;
using BoxValue = std::vector<std::uint8_t>;

inline constexpr std::uint64_t MIN_FEE = 1'000;         // micro-ALGO per transaction
inline constexpr std::uint64_t BOX_MBR = 100'000;       // flat per-box lock, micro-ALGO
inline constexpr std::size_t MAX_BOX_KEY_LEN = 64;

struct CostTable {
    std::uint64_t base_budget = 700;
    std::uint64_t opup_contribution = 700;
    std::uint64_t cost_scalar_mul = 2'675;
    std::uint64_t cost_ec_add = 100;
    std::uint64_t cost_hash_iteration = 100;

    // 4 scalar muls + 2 additions + 1 hash = 11,000 units per ring index.
    std::uint64_t per_index_cost() const {
        return 4 * cost_scalar_mul + 2 * cost_ec_add + cost_hash_iteration;
    }
};

struct BudgetMeter {
    std::uint64_t pooled = 0;
    std::uint64_t consumed = 0;

    bool operator==(const BudgetMeter&) const = default;
};

enum class RejectReason {
    InsufficientFee,
    InsufficientBalance,
    BudgetExceeded,
    BoxAlreadyExists,
    KeyTooLong,
    UnknownApp,
    WrongGroupShape,
    WrongAmount,
    WrongReceiver,
    DuplicateCommitment,
    MalformedPoint,
    DoubleSpend,
    UnknownRingMember,
    RingTooLarge,
    RingTooSmall,
    RingDuplicate,
    InvalidSignature,
    MalformedProof,
    MissingBoxReference,
};

std::string_view reject_reason_name(RejectReason reason);

// Aborts the enclosing transaction group; submit_group converts it into a
// Rejection and discards the scratch state.
class LedgerError : public std::exception {
public:
    LedgerError(RejectReason reason, std::string detail)
        : reason_(reason), detail_(std::move(detail)),
          what_(std::string(reject_reason_name(reason_)) +
                (detail_.empty() ? "" : ": " + detail_)) {}
    explicit LedgerError(RejectReason reason) : LedgerError(reason, "") {}

    RejectReason reason() const { return reason_; }
    const std::string& detail() const { return detail_; }
    const char* what() const noexcept override { return what_.c_str(); }

private:
    RejectReason reason_;
    std::string detail_;
    std::string what_;
};

enum class Method { Deposit, Withdraw, OpUp };

struct Transaction {
    enum class Kind { Payment, AppCall };

    Kind kind = Kind::Payment;
    Address sender{};
    std::uint64_t fee = 0;

    // Payment
    Address receiver{};
    std::uint64_t amount = 0;

    // AppCall
    std::uint64_t app_id = 0;
    Method method = Method::OpUp;
    std::vector<std::vector<std::uint8_t>> args;
    std::vector<BoxKey> box_refs;

    static Transaction payment(const Address& sender, const Address& receiver,
                               std::uint64_t amount, std::uint64_t fee);
    static Transaction app_call(const Address& sender, std::uint64_t app_id, Method method,
                                std::vector<std::vector<std::uint8_t>> args,
                                std::vector<BoxKey> box_refs, std::uint64_t fee);
};

struct DepositEvent {
    Bytes64 commitment{};
    std::uint64_t deposit_index = 0;

    bool operator==(const DepositEvent&) const = default;
};

struct WithdrawEvent {
    Bytes64 key_image{};
    std::vector<Bytes64> ring;
    Address recipient{};
    std::uint64_t payout = 0;

    bool operator==(const WithdrawEvent&) const = default;
};

using LogEvent = std::variant<DepositEvent, WithdrawEvent>;

struct Receipt {
    std::uint64_t round = 0;
    std::uint64_t fees = 0;        // total fees collected from the group
    std::uint64_t mbr_locked = 0;  // MBR newly locked by the group
    std::uint32_t inner_txns = 0;
    BudgetMeter meter{};           // meter of the group's application call
    std::vector<LogEvent> events;

    bool operator==(const Receipt&) const = default;
};

struct Rejection {
    RejectReason reason{};
    std::string detail;
    BudgetMeter meter{};  // meter state at the point of failure
};

struct AppGlobals {
    std::uint64_t deposit_counter = 0;

    bool operator==(const AppGlobals&) const = default;
};

struct LedgerState {
    std::uint64_t round = 0;
    std::map<Address, std::uint64_t> accounts;
    std::map<BoxKey, BoxValue> boxes;
    AppGlobals app_globals;
    std::uint64_t fees_collected = 0;
    std::uint64_t locked_mbr = 0;
    std::vector<Receipt> log;

    bool operator==(const LedgerState&) const = default;

    std::uint64_t balance(const Address& a) const {
        auto it = accounts.find(a);
        return it == accounts.end() ? 0 : it->second;
    }
};

// --- box primitives ---------------------------------------------------------

// Creates a box and locks BOX_MBR from the responsible account.
void box_write(LedgerState& state, const BoxKey& key, BoxValue value, const Address& responsible);

std::optional<std::span<const std::uint8_t>> box_lookup(const LedgerState& state,
                                                        const BoxKey& key);

// --- budget -----------------------------------------------------------------

void charge(BudgetMeter& meter, std::uint64_t units);  // throws BudgetExceeded

// --- group execution --------------------------------------------------------

class GroupContext;
using AppHandler = std::function<void(GroupContext&, const Transaction&)>;

struct AppRegistry {
    std::map<std::uint64_t, AppHandler> handlers;
    CostTable costs{};
};

struct SubmitOk {
    LedgerState state;
    Receipt receipt;
};

using SubmitResult = std::variant<SubmitOk, Rejection>;

// Execution view handed to application handlers. All mutations go through the
// scratch state and are discarded if the group rejects.
class GroupContext {
public:
    GroupContext(LedgerState& scratch, const std::vector<Transaction>& group,
                 const AppRegistry& apps)
        : state_(scratch), group_(group), apps_(apps) {}

    LedgerState& state() { return state_; }
    const std::vector<Transaction>& group() const { return group_; }
    std::size_t current_index() const { return current_; }
    const CostTable& costs() const { return apps_.costs; }

    BudgetMeter& meter() { return meter_; }
    std::uint32_t inner_count() const { return inner_count_; }

    // Inner no-op application call; adds opup_contribution to the pool.
    void opup(std::uint64_t dummy_app_id);

    // Inner payment; debits the sender within the scratch state.
    void inner_payment(const Address& from, const Address& to, std::uint64_t amount);

    void log_event(LogEvent event) { events_.push_back(std::move(event)); }

    void transfer(const Address& from, const Address& to, std::uint64_t amount);

private:
    friend SubmitResult submit_group(const LedgerState&, const std::vector<Transaction>&,
                                     const AppRegistry&);

    LedgerState& state_;
    const std::vector<Transaction>& group_;
    const AppRegistry& apps_;
    BudgetMeter meter_{};
    std::uint32_t inner_count_ = 0;
    std::size_t current_ = 0;
    std::vector<LogEvent> events_;
};

// Executes the group against a scratch copy; commits only if every
// transaction succeeds, otherwise returns the untouched input state
// implicitly (caller keeps it) plus the rejection.
SubmitResult submit_group(const LedgerState& state, const std::vector<Transaction>& group,
                          const AppRegistry& apps);

// Simulates empty rounds.
void advance_rounds(LedgerState& state, std::uint64_t rounds);

// --- persistence ------------------------------------------------------------

std::string persist(const LedgerState& state);
LedgerState load(std::string_view document);  // throws Error(MalformedDocument)

}  // namespace obscura::avm
