// harness.hpp
// Scenario runners behind the qcheque command-line tool. Every command
// returns a JSON report whose bytes depend only on the configuration.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qcheque/adversary.hpp"
#include "qcheque/protocol.hpp"
#include "qcheque/snapshot.hpp"
#include "qcheque/stats.hpp"
#include "qcheque/teleport.hpp"

#ifndef QCHEQUE_VERSION
#define QCHEQUE_VERSION "0.0.0"
#endif

namespace qcheque {

inline constexpr std::string_view kToolName = "qcheque";
inline constexpr std::string_view kVersion = QCHEQUE_VERSION;

struct RunConfig {
    SchemeParams params;
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    std::optional<AttackStrategy> strategy;
    std::string out;
    std::string snapshot;
    AttackOptions attack;

    void validate() const {
        params.validate();
        if (trials < 1) throw InvalidArgument("trials must be at least 1");
    }
};

struct Report {
    Json doc;
    bool pass = true;

    std::string dump() const { return doc.dump(2) + "\n"; }
};

inline Json config_to_json(const RunConfig& c) {
    Json j{{"l", c.params.l},
           {"n", c.params.n},
           {"key_bits", c.params.key_bits},
           {"serial_bits", c.params.serial_bits},
           {"signature", c.params.signature->id()},
           {"signature_bits", c.params.signature_bits},
           {"policy", to_string(c.params.policy.mode)},
           {"kappa1", c.params.policy.kappa1},
           {"kappa2", c.params.policy.kappa2},
           {"trials", c.trials},
           {"seed", c.seed}};
    if (c.strategy) j["strategy"] = to_string(*c.strategy);
    return j;
}

inline Report make_report(std::string_view command, const RunConfig& c, Json results, bool pass) {
    Json doc{{"tool", kToolName},
             {"version", kVersion},
             {"command", command},
             {"config", config_to_json(c)},
             {"results", std::move(results)},
             {"status", pass ? "PASS" : "FAIL"}};
    return {std::move(doc), pass};
}

struct HonestTally {
    std::size_t trials = 0;
    std::size_t accepted = 0;
    std::size_t transcript_mismatches = 0;  // hadamard-outcome count != l
    std::size_t leftover_qubits = 0;        // cheque handles alive after Verify
    std::map<std::string, std::size_t> histogram;
};

// One Gen -> Sign -> Verify run in a fresh world.
inline VerifyResult honest_trial(const SchemeParams& params, std::uint64_t seed, HonestTally& tally,
                                 std::uint64_t amount = 100) {
    World world(seed);
    Bank bank;
    auto [book, rec] = gen_account(world, bank, "alice", params);
    const QuantumCheque chi = sign_cheque(world, book, amount, params);
    hand_over(world, chi, Owner::Payee);
    Transcript tx;
    const VerifyResult r = verify_cheque(world, bank, chi, params, &tx);
    ++tally.trials;
    tally.accepted += r.accepted ? 1 : 0;
    ++tally.histogram[std::string(to_string(r.reason))];
    if (tx.count("hadamard-outcome") != params.l) ++tally.transcript_mismatches;
    for (const auto& q : chi.qubits()) tally.leftover_qubits += world.contains(q) ? 1 : 0;
    return r;
}

inline Report cmd_run_honest(const RunConfig& c) {
    c.validate();
    HonestTally t;
    for (std::size_t i = 0; i < c.trials; ++i) honest_trial(c.params, trial_seed(c.seed, i), t);
    const double rate = static_cast<double>(t.accepted) / static_cast<double>(t.trials);
    const auto ci = stats::wilson(t.accepted, t.trials);
    Json results{{"trials", t.trials},
                 {"accepted", t.accepted},
                 {"acceptance_rate", rate},
                 {"predicted_rate", 1.0},
                 {"wilson95", Json::array({ci.low, ci.high})},
                 {"reasons", t.histogram},
                 {"transcript_mismatches", t.transcript_mismatches},
                 {"leftover_qubits", t.leftover_qubits}};
    const bool pass = t.accepted == t.trials && t.transcript_mismatches == 0 && t.leftover_qubits == 0;
    return make_report("run-honest", c, std::move(results), pass);
}

inline Json attack_stats_to_json(const AttackStats& s, const SchemeParams& params) {
    Json j{{"strategy", to_string(s.strategy)},
           {"trials", s.trials},
           {"successes", s.successes},
           {"success_rate", s.rate()},
           {"wilson95", Json::array({s.wilson.low, s.wilson.high})},
           {"reasons", s.histogram},
           {"second_deposit_accepts", s.second_deposit_accepts}};
    if (s.expected_successes) {
        j["predicted_rate"] = *s.expected_successes / static_cast<double>(s.trials);
        j["predicted_successes"] = *s.expected_successes;
        j["predicted_sigma"] = *s.expected_sigma;
        j["within_4sigma"] = *s.within_4sigma;
    }
    if (s.strategy == AttackStrategy::ForgeFreshKeyGuess) {
        const double p = std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(params.key_bits, 1000)));
        const double expected = p * static_cast<double>(s.trials);
        j["key_hits"] = s.key_hits;
        j["predicted_key_hits"] = expected;
        j["key_hits_within_4sigma"] =
            stats::within_sigmas(static_cast<double>(s.key_hits), expected, stats::binomial_sigma(p, s.trials));
    }
    return j;
}

inline bool attack_passes(const Json& j) {
    bool ok = j.at("second_deposit_accepts").get<std::size_t>() == 0;
    if (j.contains("within_4sigma")) ok = ok && j["within_4sigma"].get<bool>();
    if (j.contains("key_hits_within_4sigma")) ok = ok && j["key_hits_within_4sigma"].get<bool>();
    return ok;
}

inline Report cmd_attack(const RunConfig& c) {
    c.validate();
    if (!c.strategy) throw InvalidArgument("attack needs a strategy");
    const AttackStats s = run_attack(*c.strategy, c.params, c.trials, c.seed, c.attack);
    Json results = attack_stats_to_json(s, c.params);
    const bool pass = attack_passes(results);
    return make_report("attack", c, std::move(results), pass);
}

// Gen + Sign for one account, saved with the cheque still outstanding.
inline Snapshot make_session_snapshot(const RunConfig& c) {
    World world(c.seed);
    Bank bank;
    auto [book, rec] = gen_account(world, bank, "alice", c.params);
    const QuantumCheque chi = sign_cheque(world, book, c.attack.amount, c.params);
    hand_over(world, chi, Owner::Payee);
    return capture(c.params, world, bank, {chi});
}

inline Report cmd_snapshot(const RunConfig& c) {
    c.validate();
    if (c.snapshot.empty()) throw InvalidArgument("snapshot needs --snapshot PATH");
    const Snapshot s = make_session_snapshot(c);
    const std::string text = dump_snapshot(s);
    write_file(c.snapshot, text);
    Json results{{"path", c.snapshot},
                 {"bytes", text.size()},
                 {"qubits", s.world.owners.size()},
                 {"groups", s.world.groups.size()},
                 {"bank_records", s.bank.size()},
                 {"cheques", s.cheques.size()}};
    return make_report("snapshot", c, std::move(results), true);
}

// Loads a snapshot, checks that it re-serializes to the same bytes, then
// verifies every outstanding cheque.
inline Report cmd_restore(const RunConfig& c) {
    if (c.snapshot.empty()) throw InvalidArgument("restore needs --snapshot PATH");
    const std::string text = read_file(c.snapshot);
    const Snapshot s = parse_snapshot(text);
    const bool identical = dump_snapshot(s) == text;

    World world = World::from_state(s.world);
    Bank bank = restore_bank(s);
    Json verdicts = Json::array();
    bool all_ok = true;
    for (const auto& chi : s.cheques) {
        Transcript tx;
        const VerifyResult r = verify_cheque(world, bank, chi, s.params, &tx);
        all_ok = all_ok && r.accepted;
        verdicts.push_back({{"serial", chi.serial.to_hex()}, {"accepted", r.accepted}, {"reason", to_string(r.reason)}});
    }
    Json results{{"path", c.snapshot},
                 {"roundtrip_identical", identical},
                 {"qubits", s.world.owners.size()},
                 {"bank_records", s.bank.size()},
                 {"verdicts", std::move(verdicts)}};
    return make_report("restore", c, std::move(results), identical && all_ok);
}

// A fast battery of end-to-end checks with small parameters.
inline Report selftest(const RunConfig& c) {
    Json checks = Json::array();
    bool all = true;
    auto record = [&](std::string_view name, bool ok) {
        checks.push_back({{"check", name}, {"pass", ok}});
        all = all && ok;
    };

    {
        World w(c.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double worst = 1.0;
        for (int i = 0; i < 50; ++i) {
            const double theta = std::acos(std::sqrt(unit(w.rng())));
            const double phi = 2 * std::numbers::pi * unit(w.rng());
            const QubitHandle psi = w.allocate(Owner::Alice, std::cos(theta), std::polar(std::sin(theta), phi));
            GhzTriple t = prepare_ghz(w, 1);
            encode_qubit(w, psi, t);
            const auto rr = recover_qubit(w, t.b, t.a2);
            worst = std::min(worst, w.fidelity(std::span(&rr.qubit, 1), bloch_state(theta, phi)));
            w.discard(rr.qubit);
        }
        record("teleport-identity", worst >= 1.0 - 1e-10);
    }

    SchemeParams small = c.params;
    small.l = 2;
    small.n = 2;
    HonestTally t;
    for (std::uint64_t i = 0; i < 5; ++i) honest_trial(small, trial_seed(c.seed, i), t);
    record("honest-completeness", t.accepted == t.trials && t.transcript_mismatches == 0 && t.leftover_qubits == 0);

    const AttackStats replay = run_attack(AttackStrategy::Replay, small, 5, c.seed);
    record("replay-rejected", replay.successes == 0 && replay.second_deposit_accepts == 0);

    record("clone-fidelity", std::abs(clone_fidelity() - 5.0 / 6.0) < 1e-9);

    RunConfig sc = c;
    sc.params = small;
    const Snapshot s = make_session_snapshot(sc);
    const std::string text = dump_snapshot(s);
    record("snapshot-roundtrip", dump_snapshot(parse_snapshot(text)) == text);

    return make_report("selftest", c, Json{{"checks", std::move(checks)}}, all);
}

}  // namespace qcheque
