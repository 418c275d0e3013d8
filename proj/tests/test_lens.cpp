#include <doctest.h>

#include <algorithm>

#include "obscura/lens.hpp"
#include "obscura/scenario.hpp"
#include "support/fixtures.hpp"

using namespace obscura;
using namespace obscura::lens;
using testutil::MixerFixture;

namespace {

Bytes64 tag64(std::uint8_t v) {
    Bytes64 b{};
    b.fill(v);
    return b;
}

WithdrawalObservation obs(std::uint8_t image_tag, std::initializer_list<std::uint8_t> members) {
    WithdrawalObservation w;
    w.key_image = tag64(image_tag);
    for (std::uint8_t m : members)
        w.ring.push_back(tag64(m));
    return w;
}

}  // namespace

TEST_CASE("chain_reaction fully attributes a singleton ring") {
    std::vector<WithdrawalObservation> observations{obs(0xa0, {1})};
    AttributionReport report = chain_reaction(observations);
    REQUIRE(report.attributions.size() == 1);
    CHECK(report.attributions.at(tag64(0xa0)) == tag64(1));
    CHECK(report.effective_anonymity.at(tag64(0xa0)) == 1);
}

TEST_CASE("chain_reaction leaves disjoint rings untouched") {
    std::vector<WithdrawalObservation> observations{obs(0xa0, {1, 2, 3, 4, 5}),
                                                    obs(0xa1, {6, 7, 8, 9, 10})};
    AttributionReport report = chain_reaction(observations);
    CHECK(report.attributions.empty());
    CHECK(report.effective_anonymity.at(tag64(0xa0)) == 5);
    CHECK(report.effective_anonymity.at(tag64(0xa1)) == 5);
}

TEST_CASE("chain_reaction cascades eliminations") {
    // ring A = {p1}; ring B = {p1, p2}: once A pins p1, B must have spent p2
    std::vector<WithdrawalObservation> observations{obs(0xa0, {1}), obs(0xa1, {1, 2})};
    AttributionReport report = chain_reaction(observations);
    REQUIRE(report.attributions.size() == 2);
    CHECK(report.attributions.at(tag64(0xa0)) == tag64(1));
    CHECK(report.attributions.at(tag64(0xa1)) == tag64(2));
    CHECK(report.effective_anonymity.at(tag64(0xa1)) == 1);
}

TEST_CASE("chain_reaction deep cascade and order insensitivity") {
    std::vector<WithdrawalObservation> observations{
            obs(0xa0, {1}), obs(0xa1, {1, 2}), obs(0xa2, {1, 2, 3}), obs(0xa3, {2, 3, 4}),
            obs(0xa4, {5, 6, 7})};
    AttributionReport expected = chain_reaction(observations);
    CHECK(expected.attributions.size() == 4);
    CHECK(expected.attributions.at(tag64(0xa3)) == tag64(4));
    CHECK(expected.effective_anonymity.at(tag64(0xa4)) == 3);

    std::sort(observations.begin(), observations.end(),
              [](const auto& a, const auto& b) { return a.key_image > b.key_image; });
    AttributionReport permuted = chain_reaction(observations);
    CHECK(permuted.attributions == expected.attributions);
    CHECK(permuted.effective_anonymity == expected.effective_anonymity);
}

TEST_CASE("anonymity_report on a fresh ledger") {
    MixerFixture fix;
    AnonymitySummary summary = anonymity_report(fix.state);
    CHECK(summary.rows.empty());
    CHECK(summary.deposits == 0);
    CHECK(summary.unspent == 0);
}

TEST_CASE("anonymity_report tracks rings, ages and pool totals") {
    MixerFixture fix;
    std::vector<lsag::KeyPair> kps;
    for (int i = 0; i < 6; ++i)
        kps.push_back(fix.deposit_new());
    avm::advance_rounds(fix.state, 4);

    for (std::size_t i = 0; i < 2; ++i) {
        auto [ring, pi] = fix.ring_with(kps[i], 4, i);
        fix.must_commit({fix.withdraw_txn(kps[i], ring, pi, fix.fresh_address())});
    }

    AnonymitySummary summary = anonymity_report(fix.state);
    REQUIRE(summary.rows.size() == 2);
    CHECK(summary.deposits == 6);
    CHECK(summary.spends == 2);
    CHECK(summary.unspent == 4);
    for (const auto& row : summary.rows) {
        CHECK(row.ring_size == 4);
        CHECK(row.decoy_ages.size() == 4);
        for (std::uint64_t age : row.decoy_ages)
            CHECK(age >= 4);  // all deposits predate the round gap
        CHECK(row.effective_anonymity >= 1);
    }

    nlohmann::json j = to_json(summary);
    CHECK(j.at("pool").at("unspent") == 4);
    CHECK(j.at("withdrawals").size() == 2);
}

TEST_CASE("scenario: deposits then one withdrawal pays out") {
    auto outcome = scenario::run_scenario_text(R"({
        "seed": 7,
        "actions": [
            {"deposit": "alice"},
            {"deposit": "bob"},
            {"deposit": "carol"},
            {"deposit": "dave"},
            {"deposit": "erin"},
            {"withdraw": "alice", "ring_size": 5, "delay_rounds": 2}
        ]
    })");

    REQUIRE(outcome.ground_truth.size() == 1);
    const auto& actions = outcome.transcript.at("actions");
    REQUIRE(actions.size() == 6);
    CHECK(actions[5].at("result").at("status") == "committed");

    // the recipient holds exactly the payout
    const auto& receipt = actions[5].at("result").at("receipt");
    CHECK(receipt.at("events")[0].at("payout") == 899'000);
    std::string recipient_hex = receipt.at("events")[0].at("recipient");
    CHECK(outcome.transcript.at("final").at("balances").at(recipient_hex) == 899'000);
}

TEST_CASE("scenario: ten deposits, three n = 5 withdrawals") {
    auto outcome = scenario::run_scenario_text(R"({
        "seed": 31,
        "actions": [
            {"deposit": "a"}, {"deposit": "b"}, {"deposit": "c"}, {"deposit": "d"},
            {"deposit": "e"}, {"deposit": "a"}, {"deposit": "b"}, {"deposit": "c"},
            {"deposit": "d"}, {"deposit": "e"},
            {"advance": 3},
            {"withdraw": "a", "ring_size": 5},
            {"withdraw": "b", "ring_size": 5},
            {"withdraw": "c", "ring_size": 5, "delay_rounds": 2}
        ]
    })");
    AnonymitySummary summary = anonymity_report(outcome.final_state);
    REQUIRE(summary.rows.size() == 3);
    CHECK(summary.deposits == 10);
    CHECK(summary.unspent == 7);
    for (const auto& row : summary.rows)
        CHECK(row.ring_size == 5);
}

TEST_CASE("all-spent pool reports zero unspent") {
    // spent commitments stay in the box store, so they remain usable decoys
    auto outcome = scenario::run_scenario_text(R"({
        "seed": 32,
        "actions": [
            {"deposit": "a"}, {"deposit": "b"}, {"deposit": "c"},
            {"withdraw": "a", "ring_size": 2},
            {"withdraw": "b", "ring_size": 2},
            {"withdraw": "c", "ring_size": 3}
        ]
    })");
    AnonymitySummary summary = anonymity_report(outcome.final_state);
    CHECK(summary.deposits == 3);
    CHECK(summary.spends == 3);
    CHECK(summary.unspent == 0);
}

TEST_CASE("scenario: replayed withdraw records a DoubleSpend rejection") {
    auto outcome = scenario::run_scenario_text(R"({
        "seed": 11,
        "actions": [
            {"deposit": "alice"},
            {"deposit": "bob"},
            {"deposit": "carol"},
            {"withdraw": "alice", "ring_size": 2},
            {"withdraw": "alice", "ring_size": 3}
        ]
    })");
    const auto& actions = outcome.transcript.at("actions");
    CHECK(actions[3].at("result").at("status") == "committed");
    CHECK(actions[4].at("result").at("status") == "rejected");
    CHECK(actions[4].at("result").at("rejection").at("reason") == "DoubleSpend");
}

TEST_CASE("scenario is deterministic under a fixed seed") {
    const char* script = R"({
        "seed": 99,
        "actions": [
            {"deposit": "a"},
            {"deposit": "b"},
            {"deposit": "c"},
            {"advance": 3},
            {"withdraw": "b", "ring_size": 3},
            {"deposit": "d"},
            {"withdraw": "c", "ring_size": 2, "delay_rounds": 1}
        ]
    })";
    auto a = scenario::run_scenario_text(script);
    auto b = scenario::run_scenario_text(script);
    CHECK(a.transcript == b.transcript);
    CHECK(avm::persist(a.final_state) == avm::persist(b.final_state));
}

TEST_CASE("scenario script errors carry the action index") {
    try {
        scenario::run_scenario_text(
                R"({"seed": 1, "actions": [{"withdraw": "ghost", "ring_size": 2}]})");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ScriptError);
        CHECK(std::string(e.what()).find("action 0") != std::string::npos);
    }

    CHECK_THROWS_AS(scenario::run_scenario_text(R"({"actions": []})"), Error);
    CHECK_THROWS_AS(scenario::run_scenario_text("not json"), Error);

    // a one-deposit pool cannot seed a five-member ring
    CHECK_THROWS_AS(scenario::run_scenario_text(
                            R"({"seed": 2, "actions": [{"deposit": "a"},
                                {"withdraw": "a", "ring_size": 5}]})"),
                    Error);
}

TEST_CASE("scenario ground truth matches the analyzer's view") {
    auto outcome = scenario::run_scenario_text(R"({
        "seed": 21,
        "actions": [
            {"deposit": "a"},
            {"deposit": "b"},
            {"deposit": "c"},
            {"deposit": "d"},
            {"withdraw": "a", "ring_size": 3},
            {"withdraw": "b", "ring_size": 3}
        ]
    })");
    auto observations = extract_observations(outcome.final_state);
    REQUIRE(observations.size() == 2);

    AttributionReport report = chain_reaction(observations);
    for (const auto& [image, commitment] : report.attributions) {
        auto gt = std::find_if(outcome.ground_truth.begin(), outcome.ground_truth.end(),
                               [&](const auto& g) { return g.key_image == image; });
        REQUIRE(gt != outcome.ground_truth.end());
        CHECK(gt->true_commitment == commitment);
    }
}
