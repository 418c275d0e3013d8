#include "obscura/avm_ledger.hpp"

#include "obscura/json_io.hpp"

#include <stdexcept>

#include "obscura/errors.hpp"

namespace obscura::avm {

using nlohmann::json;

std::string_view reject_reason_name(RejectReason reason) {
    switch (reason) {
        case RejectReason::InsufficientFee: return "InsufficientFee";
        case RejectReason::InsufficientBalance: return "InsufficientBalance";
        case RejectReason::BudgetExceeded: return "BudgetExceeded";
        case RejectReason::BoxAlreadyExists: return "BoxAlreadyExists";
        case RejectReason::KeyTooLong: return "KeyTooLong";
        case RejectReason::UnknownApp: return "UnknownApp";
        case RejectReason::WrongGroupShape: return "WrongGroupShape";
        case RejectReason::WrongAmount: return "WrongAmount";
        case RejectReason::WrongReceiver: return "WrongReceiver";
        case RejectReason::DuplicateCommitment: return "DuplicateCommitment";
        case RejectReason::MalformedPoint: return "MalformedPoint";
        case RejectReason::DoubleSpend: return "DoubleSpend";
        case RejectReason::UnknownRingMember: return "UnknownRingMember";
        case RejectReason::RingTooLarge: return "RingTooLarge";
        case RejectReason::RingTooSmall: return "RingTooSmall";
        case RejectReason::RingDuplicate: return "RingDuplicate";
        case RejectReason::InvalidSignature: return "InvalidSignature";
        case RejectReason::MalformedProof: return "MalformedProof";
        case RejectReason::MissingBoxReference: return "MissingBoxReference";
    }
    return "Unknown";
}

Transaction Transaction::payment(const Address& sender, const Address& receiver,
                                 std::uint64_t amount, std::uint64_t fee) {
    Transaction t;
    t.kind = Kind::Payment;
    t.sender = sender;
    t.receiver = receiver;
    t.amount = amount;
    t.fee = fee;
    return t;
}

Transaction Transaction::app_call(const Address& sender, std::uint64_t app_id, Method method,
                                  std::vector<std::vector<std::uint8_t>> args,
                                  std::vector<BoxKey> box_refs, std::uint64_t fee) {
    Transaction t;
    t.kind = Kind::AppCall;
    t.sender = sender;
    t.app_id = app_id;
    t.method = method;
    t.args = std::move(args);
    t.box_refs = std::move(box_refs);
    t.fee = fee;
    return t;
}

void box_write(LedgerState& state, const BoxKey& key, BoxValue value,
               const Address& responsible) {
    if (key.empty() || key.size() > MAX_BOX_KEY_LEN)
        throw LedgerError(RejectReason::KeyTooLong,
                          "box key must be 1.." + std::to_string(MAX_BOX_KEY_LEN) + " bytes");
    if (state.boxes.contains(key))
        throw LedgerError(RejectReason::BoxAlreadyExists);
    auto it = state.accounts.find(responsible);
    if (it == state.accounts.end() || it->second < BOX_MBR)
        throw LedgerError(RejectReason::InsufficientBalance, "box MBR");
    it->second -= BOX_MBR;
    state.locked_mbr += BOX_MBR;
    state.boxes.emplace(key, std::move(value));
}

std::optional<std::span<const std::uint8_t>> box_lookup(const LedgerState& state,
                                                        const BoxKey& key) {
    auto it = state.boxes.find(key);
    if (it == state.boxes.end())
        return std::nullopt;
    return std::span<const std::uint8_t>(it->second);
}

void charge(BudgetMeter& meter, std::uint64_t units) {
    if (units == 0)
        throw std::invalid_argument("charge: zero units");
    if (meter.consumed + units > meter.pooled)
        throw LedgerError(RejectReason::BudgetExceeded,
                          std::to_string(meter.consumed) + " + " + std::to_string(units) +
                                  " > " + std::to_string(meter.pooled));
    meter.consumed += units;
}

void GroupContext::transfer(const Address& from, const Address& to, std::uint64_t amount) {
    if (amount == 0)
        return;
    auto it = state_.accounts.find(from);
    if (it == state_.accounts.end() || it->second < amount)
        throw LedgerError(RejectReason::InsufficientBalance,
                          "needs " + std::to_string(amount));
    it->second -= amount;
    state_.accounts[to] += amount;
}

void GroupContext::opup(std::uint64_t dummy_app_id) {
    auto it = apps_.handlers.find(dummy_app_id);
    if (it == apps_.handlers.end())
        throw LedgerError(RejectReason::UnknownApp, "dummy app " + std::to_string(dummy_app_id));
    ++inner_count_;
    meter_.pooled += apps_.costs.opup_contribution;
    Transaction inner = Transaction::app_call(Address{}, dummy_app_id, Method::OpUp, {}, {}, 0);
    it->second(*this, inner);  // no-op by construction; consumes 0 units
}

void GroupContext::inner_payment(const Address& from, const Address& to, std::uint64_t amount) {
    ++inner_count_;
    transfer(from, to, amount);
}

SubmitResult submit_group(const LedgerState& state, const std::vector<Transaction>& group,
                          const AppRegistry& apps) {
    if (group.empty())
        throw std::invalid_argument("submit_group: empty group");

    LedgerState scratch = state;
    GroupContext ctx(scratch, group, apps);
    BudgetMeter app_meter{};
    bool saw_app_call = false;

    std::uint64_t fee_total = 0;
    for (const Transaction& t : group)
        fee_total += t.fee;

    try {
        // Outer-count minimum first; the pooled check including inner
        // transactions runs again after execution.
        if (fee_total < MIN_FEE * group.size())
            throw LedgerError(RejectReason::InsufficientFee,
                              std::to_string(fee_total) + " < " +
                                      std::to_string(MIN_FEE * group.size()));

        for (const Transaction& t : group) {
            if (t.fee == 0)
                continue;
            auto it = scratch.accounts.find(t.sender);
            if (it == scratch.accounts.end() || it->second < t.fee)
                throw LedgerError(RejectReason::InsufficientBalance, "fee");
            it->second -= t.fee;
        }

        for (std::size_t i = 0; i < group.size(); ++i) {
            const Transaction& t = group[i];
            ctx.current_ = i;
            if (t.kind == Transaction::Kind::Payment) {
                ctx.transfer(t.sender, t.receiver, t.amount);
            } else {
                auto it = apps.handlers.find(t.app_id);
                if (it == apps.handlers.end())
                    throw LedgerError(RejectReason::UnknownApp,
                                      "app " + std::to_string(t.app_id));
                ctx.meter_ = BudgetMeter{apps.costs.base_budget, 0};
                it->second(ctx, t);
                app_meter = ctx.meter_;
                saw_app_call = true;
            }
        }

        std::uint64_t owed = MIN_FEE * (group.size() + ctx.inner_count());
        if (fee_total < owed)
            throw LedgerError(RejectReason::InsufficientFee,
                              std::to_string(fee_total) + " < " + std::to_string(owed) +
                                      " (pooled across " +
                                      std::to_string(group.size() + ctx.inner_count()) +
                                      " transactions)");
    } catch (const LedgerError& e) {
        return Rejection{e.reason(), e.detail(), ctx.meter()};
    }

    scratch.round += 1;
    scratch.fees_collected += fee_total;

    Receipt receipt;
    receipt.round = scratch.round;
    receipt.fees = fee_total;
    receipt.mbr_locked = scratch.locked_mbr - state.locked_mbr;
    receipt.inner_txns = ctx.inner_count();
    receipt.meter = saw_app_call ? app_meter : BudgetMeter{};
    receipt.events = std::move(ctx.events_);
    scratch.log.push_back(receipt);

    return SubmitOk{std::move(scratch), std::move(receipt)};
}

void advance_rounds(LedgerState& state, std::uint64_t rounds) {
    state.round += rounds;
}

json to_json(const BudgetMeter& m) {
    return json{{"pooled", m.pooled}, {"consumed", m.consumed}};
}

json to_json(const LogEvent& ev) {
    if (const auto* d = std::get_if<DepositEvent>(&ev)) {
        return json{{"type", "deposit"},
                    {"commitment", to_hex(d->commitment)},
                    {"index", d->deposit_index}};
    }
    const auto& w = std::get<WithdrawEvent>(ev);
    json ring = json::array();
    for (const auto& r : w.ring)
        ring.push_back(to_hex(r));
    return json{{"type", "withdraw"},
                {"key_image", to_hex(w.key_image)},
                {"ring", ring},
                {"recipient", to_hex(w.recipient)},
                {"payout", w.payout}};
}

json to_json(const Receipt& r) {
    json events = json::array();
    for (const auto& ev : r.events)
        events.push_back(to_json(ev));
    return json{{"round", r.round},       {"fees", r.fees},
                {"mbr_locked", r.mbr_locked}, {"inner_txns", r.inner_txns},
                {"meter", to_json(r.meter)}, {"events", events}};
}

json to_json(const Rejection& rej) {
    return json{{"reason", std::string(reject_reason_name(rej.reason))},
                {"detail", rej.detail},
                {"meter", to_json(rej.meter)}};
}

namespace {

template <std::size_t N>
std::array<std::uint8_t, N> parse_hex_exact(const json& j) {
    auto v = from_hex_fixed<N>(j.get<std::string>());
    if (!v)
        throw Error(Errc::MalformedDocument, "bad hex field");
    return *v;
}

std::uint64_t parse_u64(const json& j) {
    if (!j.is_number_unsigned())
        throw Error(Errc::MalformedDocument, "expected unsigned integer");
    return j.get<std::uint64_t>();
}

BudgetMeter meter_from_json(const json& j) {
    return BudgetMeter{parse_u64(j.at("pooled")), parse_u64(j.at("consumed"))};
}

LogEvent event_from_json(const json& j) {
    std::string type = j.at("type").get<std::string>();
    if (type == "deposit") {
        DepositEvent d;
        d.commitment = parse_hex_exact<64>(j.at("commitment"));
        d.deposit_index = parse_u64(j.at("index"));
        return d;
    }
    if (type == "withdraw") {
        WithdrawEvent w;
        w.key_image = parse_hex_exact<64>(j.at("key_image"));
        for (const auto& r : j.at("ring"))
            w.ring.push_back(parse_hex_exact<64>(r));
        w.recipient = parse_hex_exact<32>(j.at("recipient"));
        w.payout = parse_u64(j.at("payout"));
        return w;
    }
    throw Error(Errc::MalformedDocument, "unknown event type " + type);
}

Receipt receipt_from_json(const json& j) {
    Receipt r;
    r.round = parse_u64(j.at("round"));
    r.fees = parse_u64(j.at("fees"));
    r.mbr_locked = parse_u64(j.at("mbr_locked"));
    r.inner_txns = static_cast<std::uint32_t>(parse_u64(j.at("inner_txns")));
    r.meter = meter_from_json(j.at("meter"));
    for (const auto& ev : j.at("events"))
        r.events.push_back(event_from_json(ev));
    return r;
}

}  // namespace

std::string persist(const LedgerState& state) {
    json accounts = json::object();
    for (const auto& [addr, bal] : state.accounts)
        accounts[to_hex(addr)] = bal;
    json boxes = json::object();
    for (const auto& [key, value] : state.boxes)
        boxes[to_hex(key)] = to_hex(value);
    json log = json::array();
    for (const auto& r : state.log)
        log.push_back(to_json(r));

    json doc{{"round", state.round},
             {"accounts", accounts},
             {"boxes", boxes},
             {"app_globals", json{{"deposit_counter", state.app_globals.deposit_counter}}},
             {"fees_collected", state.fees_collected},
             {"locked_mbr", state.locked_mbr},
             {"log", log}};
    return doc.dump(2);
}

LedgerState load(std::string_view document) {
    try {
        json doc = json::parse(document);
        LedgerState state;
        state.round = parse_u64(doc.at("round"));
        for (const auto& [key, value] : doc.at("accounts").items()) {
            auto addr = from_hex_fixed<32>(key);
            if (!addr)
                throw Error(Errc::MalformedDocument, "bad account address");
            state.accounts[*addr] = parse_u64(value);
        }
        for (const auto& [key, value] : doc.at("boxes").items()) {
            auto k = from_hex(key);
            auto v = from_hex(value.get<std::string>());
            if (!k || !v || k->empty() || k->size() > MAX_BOX_KEY_LEN)
                throw Error(Errc::MalformedDocument, "bad box entry");
            state.boxes[*k] = *v;
        }
        state.app_globals.deposit_counter =
                parse_u64(doc.at("app_globals").at("deposit_counter"));
        state.fees_collected = parse_u64(doc.at("fees_collected"));
        state.locked_mbr = parse_u64(doc.at("locked_mbr"));
        for (const auto& r : doc.at("log"))
            state.log.push_back(receipt_from_json(r));
        return state;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(Errc::MalformedDocument, e.what());
    }
}

}  // namespace obscura::avm
