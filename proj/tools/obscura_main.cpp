#include <CLI11.hpp>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include "obscura/client.hpp"
#include "obscura/lens.hpp"
#include "obscura/proof_codec.hpp"
#include "obscura/scenario.hpp"

using namespace obscura;
using nlohmann::json;

namespace {

// Genesis float for the faucet that seeds participant accounts in the
// simulated ledger. Purely a sandbox convenience.
constexpr std::uint64_t FAUCET_FLOAT = 1'000'000'000'000ULL;

avm::Address faucet_address() {
    static const std::string tag = "Obscura/faucet/v1";
    return sha256({reinterpret_cast<const std::uint8_t*>(tag.data()), tag.size()});
}

// Exclusive lock on the ledger file for the duration of a mutating command.
class FileLock {
public:
    explicit FileLock(const std::string& path) {
        fd_ = ::open((path + ".lock").c_str(), O_CREAT | O_RDWR, 0644);
        if (fd_ >= 0)
            ::flock(fd_, LOCK_EX);
    }
    ~FileLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }

private:
    int fd_ = -1;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << content;
}

bool file_exists(const std::string& path) {
    return ::access(path.c_str(), F_OK) == 0;
}

struct LedgerFile {
    std::string path;
    mixer::ContractConfig config;
    avm::AppRegistry registry = mixer::make_registry(config);
    avm::LedgerState state;

    explicit LedgerFile(std::string p, bool create_if_missing) : path(std::move(p)) {
        if (file_exists(path)) {
            state = avm::load(read_file(path));
        } else if (create_if_missing) {
            state = mixer::make_genesis(config);
            state.accounts[faucet_address()] = FAUCET_FLOAT;
        } else {
            throw std::runtime_error("no ledger at " + path);
        }
    }

    void save() const { write_file(path, avm::persist(state)); }

    avm::SubmitResult submit(const std::vector<avm::Transaction>& group) {
        auto result = avm::submit_group(state, group, registry);
        if (auto* ok = std::get_if<avm::SubmitOk>(&result))
            state = ok->state;
        return result;
    }

    // Seeds a participant account from the faucet when it cannot cover the
    // requested spend; recorded on the ledger like any other payment group.
    void ensure_funded(const avm::Address& account, std::uint64_t required) {
        std::uint64_t have = state.balance(account);
        if (have >= required)
            return;
        std::uint64_t top_up = required - have + avm::MIN_FEE;
        auto payment = avm::Transaction::payment(faucet_address(), account, top_up, avm::MIN_FEE);
        auto result = submit({payment});
        if (std::holds_alternative<avm::Rejection>(result))
            throw std::runtime_error("faucet top-up failed");
    }
};

std::unique_ptr<RandomSource> pick_rng(bool seeded, std::uint64_t seed) {
    if (seeded)
        return std::make_unique<SeededRandomSource>(seed);
    return std::make_unique<SystemRandomSource>();
}

void emit(const json& doc, bool pretty) {
    std::cout << doc.dump(pretty ? 2 : -1) << "\n";
}

json receipt_result(const avm::SubmitResult& result) {
    if (const auto* ok = std::get_if<avm::SubmitOk>(&result))
        return json{{"status", "committed"}, {"receipt", avm::to_json(ok->receipt)}};
    return json{{"status", "rejected"},
                {"rejection", avm::to_json(std::get<avm::Rejection>(result))}};
}

avm::Address parse_address(const std::string& hex) {
    auto addr = from_hex_fixed<32>(hex);
    if (!addr)
        throw std::runtime_error("expected a 32-byte hex address");
    return *addr;
}

int run(int argc, char** argv) {
    CLI::App app{"Obscura privacy-pool simulator"};
    app.require_subcommand(1);
    // let --pretty and friends appear after the subcommand name
    std::function<void(CLI::App*)> enable_fallthrough = [&](CLI::App* cmd) {
        cmd->fallthrough();
        for (CLI::App* sub : cmd->get_subcommands({}))
            enable_fallthrough(sub);
    };

    std::string ledger_path = "ledger.json";
    std::string key_path;
    std::string recipient_hex;
    std::string proof_hex;
    std::string key_image_hex;
    std::string script_path;
    std::size_t ring_size = 5;
    double lambda = 0.25;
    std::uint64_t seed = 0;
    bool seeded = false;
    bool pretty = false;

    app.add_flag("--pretty", pretty, "human-friendly indented output");

    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "deterministic randomness (test/scenario only)")
                ->each([&](const std::string&) { seeded = true; });
    };

    auto* keygen_cmd = app.add_subcommand("keygen", "generate a keypair file");
    keygen_cmd->add_option("--key", key_path, "output path")->required();
    add_seed(keygen_cmd);

    auto* deposit_cmd = app.add_subcommand("deposit", "register a commitment and fund the pool");
    deposit_cmd->add_option("--ledger", ledger_path, "ledger state file");
    deposit_cmd->add_option("--key", key_path, "keypair file")->required();

    auto* withdraw_cmd = app.add_subcommand("withdraw", "spend a deposit to a fresh recipient");
    withdraw_cmd->add_option("--ledger", ledger_path, "ledger state file");
    withdraw_cmd->add_option("--key", key_path, "keypair file")->required();
    withdraw_cmd->add_option("--recipient", recipient_hex, "32-byte hex recipient")->required();
    withdraw_cmd->add_option("--ring-size", ring_size, "anonymity set size (2..5)");
    withdraw_cmd->add_option("--lambda", lambda, "decoy recency decay in (0,1)");
    add_seed(withdraw_cmd);

    auto* verify_cmd = app.add_subcommand("verify-proof", "check a packed proof off-chain");
    verify_cmd->add_option("--proof", proof_hex, "packed proof hex (or @file)")->required();
    verify_cmd->add_option("--key-image", key_image_hex, "64-byte hex key image")->required();
    verify_cmd->add_option("--recipient", recipient_hex, "32-byte hex message")->required();

    auto* audit_cmd = app.add_subcommand("audit", "check a disclosed secret against P and I");
    audit_cmd->add_option("--key", key_path, "keypair file")->required();
    audit_cmd->add_option("--commitment", proof_hex, "override commitment (64-byte hex)");
    audit_cmd->add_option("--key-image", key_image_hex, "override key image (64-byte hex)");

    auto* inspect_cmd = app.add_subcommand("inspect", "summarize the ledger state");
    inspect_cmd->add_option("--ledger", ledger_path, "ledger state file");

    auto* lens_cmd = app.add_subcommand("lens", "anonymity analysis");
    auto* lens_report = lens_cmd->add_subcommand("report", "per-withdrawal anonymity report");
    lens_report->add_option("--ledger", ledger_path, "ledger state file");

    auto* scenario_cmd = app.add_subcommand("scenario", "scripted runs");
    auto* scenario_run = scenario_cmd->add_subcommand("run", "execute a scenario script");
    scenario_run->add_option("--script", script_path, "scenario JSON file")->required();
    scenario_run->add_option("--ledger", ledger_path, "write the final state here");
    bool save_ledger = false;
    scenario_run->add_flag("--save-ledger", save_ledger, "persist the final scenario state");

    enable_fallthrough(&app);
    CLI11_PARSE(app, argc, argv);

    if (keygen_cmd->parsed()) {
        auto rng = pick_rng(seeded, seed);
        lsag::KeyPair kp = lsag::keygen(*rng);
        write_file(key_path, client::keypair_to_json(kp));
        emit(json{{"key_file", key_path},
                  {"commitment", to_hex(serialize_point(kp.commitment))},
                  {"account", to_hex(client::account_address(kp.commitment))}},
             pretty);
        return 0;
    }

    if (deposit_cmd->parsed()) {
        FileLock lock(ledger_path);
        LedgerFile ledger(ledger_path, true);
        lsag::KeyPair kp = client::keypair_from_json(read_file(key_path));
        avm::Address sender = client::account_address(kp.commitment);
        ledger.ensure_funded(sender, ledger.config.denomination + 2 * avm::MIN_FEE);
        auto result = ledger.submit(client::make_deposit(kp, sender, ledger.config));
        ledger.save();
        emit(receipt_result(result), pretty);
        return std::holds_alternative<avm::SubmitOk>(result) ? 0 : 1;
    }

    if (withdraw_cmd->parsed()) {
        FileLock lock(ledger_path);
        LedgerFile ledger(ledger_path, true);
        lsag::KeyPair kp = client::keypair_from_json(read_file(key_path));
        avm::Address recipient = parse_address(recipient_hex);
        if (ring_size < ledger.config.min_ring || ring_size > ledger.config.max_ring)
            throw std::runtime_error("ring size outside the contract bounds");

        auto rng = pick_rng(seeded, seed);
        auto records = client::list_commitments(ledger.state);
        client::DecoySelection selection;
        selection.lambda = lambda;
        auto decoys = client::select_decoys(records, kp.commitment, ring_size - 1, selection, *rng);
        auto [ring, pi] = client::build_ring(kp.commitment, decoys, *rng);

        avm::Address sender = client::account_address(kp.commitment);
        std::uint64_t fee = (2 + ledger.config.opup_factor * ring.size()) * avm::MIN_FEE;
        ledger.ensure_funded(sender, fee);
        auto txn = client::make_withdraw(kp, ring, pi, recipient, sender, ledger.config, *rng);
        auto result = ledger.submit({txn});
        ledger.save();
        json out = receipt_result(result);
        out["proof"] = to_hex(txn.args[1]);  // on-chain payload, useful for verify-proof
        out["key_image"] = to_hex(txn.args[0]);
        emit(out, pretty);
        return std::holds_alternative<avm::SubmitOk>(result) ? 0 : 1;
    }

    if (verify_cmd->parsed()) {
        std::string hex = proof_hex;
        if (!hex.empty() && hex[0] == '@')
            hex = read_file(hex.substr(1));
        while (!hex.empty() && (hex.back() == '\n' || hex.back() == '\r'))
            hex.pop_back();
        auto payload = from_hex(hex);
        if (!payload)
            throw std::runtime_error("proof is not valid hex");
        auto image_bytes = from_hex_fixed<64>(key_image_hex);
        if (!image_bytes)
            throw std::runtime_error("expected a 64-byte hex key image");
        avm::Address m = parse_address(recipient_hex);

        bool valid = false;
        std::string reason;
        try {
            auto [ring, sig] = codec::unpack(*payload);
            GroupPoint image = deserialize_point(*image_bytes);
            valid = lsag::verify(ring, image, m, sig);
            if (!valid)
                reason = "closure failed";
        } catch (const Error& e) {
            reason = e.what();
        }
        emit(json{{"valid", valid}, {"reason", reason}}, pretty);
        return valid ? 0 : 1;
    }

    if (audit_cmd->parsed()) {
        json key_doc = json::parse(read_file(key_path));
        auto xb = from_hex_fixed<32>(key_doc.at("secret_x").get<std::string>());
        if (!xb)
            throw std::runtime_error("bad secret in key file");
        auto x = Scalar::from_bytes_checked(*xb);
        if (!x || x->is_zero())
            throw std::runtime_error("secret out of range");

        std::string commitment_hex =
                proof_hex.empty() ? key_doc.at("commitment").get<std::string>() : proof_hex;
        std::string image_hex =
                key_image_hex.empty() ? key_doc.at("key_image").get<std::string>() : key_image_hex;
        auto pb = from_hex_fixed<64>(commitment_hex);
        auto ib = from_hex_fixed<64>(image_hex);
        if (!pb || !ib)
            throw std::runtime_error("expected 64-byte hex points");

        bool consistent = lsag::audit_disclosure(*x, deserialize_point(*pb),
                                                 deserialize_point(*ib));
        emit(json{{"consistent", consistent}}, pretty);
        return 0;
    }

    if (inspect_cmd->parsed()) {
        LedgerFile ledger(ledger_path, false);
        const auto& st = ledger.state;
        std::uint64_t nullifiers = 0;
        for (const auto& [key, value] : st.boxes)
            if (!key.empty() && key[0] == 'n')
                ++nullifiers;
        emit(json{{"round", st.round},
                  {"deposits", st.app_globals.deposit_counter},
                  {"spent", nullifiers},
                  {"unspent", st.app_globals.deposit_counter - nullifiers},
                  {"boxes", st.boxes.size()},
                  {"escrow_balance", st.balance(ledger.config.escrow)},
                  {"locked_mbr", st.locked_mbr},
                  {"fees_collected", st.fees_collected},
                  {"log_entries", st.log.size()}},
             pretty);
        return 0;
    }

    if (lens_report->parsed()) {
        LedgerFile ledger(ledger_path, false);
        emit(lens::to_json(lens::anonymity_report(ledger.state)), pretty);
        return 0;
    }

    if (scenario_run->parsed()) {
        auto outcome = scenario::run_scenario_text(read_file(script_path));
        if (save_ledger) {
            FileLock lock(ledger_path);
            write_file(ledger_path, avm::persist(outcome.final_state));
        }
        emit(outcome.transcript, pretty);
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        std::cout << json{{"error", e.what()}}.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cout << json{{"error", e.what()}}.dump() << "\n";
        return 1;
    }
}
