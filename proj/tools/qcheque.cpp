// qcheque command-line tool.
//
//   qcheque run-honest [--trials N] [--seed S] [scheme flags]
//   qcheque attack --strategy NAME [--trials N] [--seed S] [scheme flags]
//   qcheque snapshot --snapshot PATH [--seed S] [scheme flags]
//   qcheque restore --snapshot PATH
//   qcheque selftest
//
// Reports go to --out (or stdout). Exit codes: 0 ok, 1 scenario FAIL,
// 2 usage error, 3 I/O or snapshot error.

#include <chrono>
#include <iostream>
#include <ios>

#include "CLI11.hpp"
#include "qcheque/harness.hpp"

namespace {

enum Exit { kOk = 0, kFail = 1, kUsage = 2, kIo = 3 };

void add_scheme_flags(CLI::App& cmd, qcheque::RunConfig& cfg, std::string& policy) {
    auto& p = cfg.params;
    cmd.add_option("--l", p.l, "amount qubits (GHZ triples) per cheque")->capture_default_str();
    cmd.add_option("--n", p.n, "qubits in the signature state")->capture_default_str();
    cmd.add_option("--key-bits", p.key_bits, "shared key length L")->capture_default_str();
    cmd.add_option("--serial-bits", p.serial_bits, "serial number length")->capture_default_str();
    cmd.add_option("--kappa1", p.policy.kappa1, "threshold for the signature-state test")->capture_default_str();
    cmd.add_option("--kappa2", p.policy.kappa2, "minimum pass fraction of amount tests")->capture_default_str();
    cmd.add_option("--policy", policy, "strict or threshold")
        ->check(CLI::IsMember({"strict", "threshold"}))
        ->capture_default_str();
    cmd.add_flag("--allow-weak-keys", p.allow_weak_keys, "permit key lengths below 64 bits");
    cmd.add_option("--trials", cfg.trials, "number of trials")->capture_default_str();
    cmd.add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
    cmd.add_option("--out", cfg.out, "write the report here instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum cheque simulator and attack harness"};
    app.set_version_flag("--version", std::string(qcheque::kVersion));
    app.require_subcommand(1);

    qcheque::RunConfig cfg;
    std::string policy = "strict";
    std::string strategy;

    auto* honest = app.add_subcommand("run-honest", "repeated Gen -> Sign -> Verify");
    add_scheme_flags(*honest, cfg, policy);

    auto* attack = app.add_subcommand("attack", "run a counterfeiting strategy");
    add_scheme_flags(*attack, cfg, policy);
    attack->add_option("--strategy", strategy, "clone | replay | tamper-amount | forge-key-guess | local-unitary")
        ->required();

    auto* snap = app.add_subcommand("snapshot", "issue one cheque and save world + bank");
    add_scheme_flags(*snap, cfg, policy);
    snap->add_option("--snapshot", cfg.snapshot, "snapshot file to write")->required();

    auto* restore = app.add_subcommand("restore", "load a snapshot and verify its cheques");
    restore->add_option("--snapshot", cfg.snapshot, "snapshot file to read")->required();
    restore->add_option("--out", cfg.out, "write the report here instead of stdout");

    auto* self = app.add_subcommand("selftest", "quick end-to-end checks");
    self->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
    self->add_option("--out", cfg.out, "write the report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    const auto start = std::chrono::steady_clock::now();
    qcheque::Report report;
    try {
        cfg.params.policy.mode = qcheque::policy_mode_from_string(policy);
        if (*attack) cfg.strategy = qcheque::strategy_from_string(strategy);
        if (*honest)
            report = qcheque::cmd_run_honest(cfg);
        else if (*attack)
            report = qcheque::cmd_attack(cfg);
        else if (*snap)
            report = qcheque::cmd_snapshot(cfg);
        else if (*restore)
            report = qcheque::cmd_restore(cfg);
        else
            report = qcheque::selftest(cfg);

        const std::string text = report.dump();
        if (cfg.out.empty())
            std::cout << text;
        else
            qcheque::write_file(cfg.out, text);
    } catch (const qcheque::SnapshotError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const qcheque::InvalidArgument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFail;
    }

    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    std::cerr << "status " << (report.pass ? "PASS" : "FAIL") << " in " << took.count() << " s\n";
    return report.pass ? kOk : kFail;
}
