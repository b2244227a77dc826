// adversary.hpp
// Counterfeiting experiments. Each trial runs in a fresh World: honest Gen
// (and Sign when the strategy intercepts a real cheque), a manipulation done
// through an AdversaryWorld that only exposes qubits the adversary holds,
// then submission to verify_cheque. A success is an accepted cheque that was
// not legitimately issued. After the primary submission every strategy
// resubmits the original cheque to exercise the spent ledger.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qcheque/comparator.hpp"
#include "qcheque/protocol.hpp"
#include "qcheque/qowf.hpp"
#include "qcheque/qsim.hpp"
#include "qcheque/stats.hpp"

namespace qcheque {

// ---- universal 1 -> 2 cloner -----------------------------------------------

// 8x8 unitary on (input, blank, machine), MSB-first. With the blank and the
// machine qubit starting in |0>:
//   |0>|00> -> sqrt(2/3)|00>|0> + sqrt(1/6)(|01> + |10>)|1>
//   |1>|00> -> sqrt(2/3)|11>|1> + sqrt(1/6)(|01> + |10>)|0>
// The other six columns complete the isometry by Gram-Schmidt.
inline Gate cloner_unitary() {
    const double big = std::sqrt(2.0 / 3.0);
    const double small = std::sqrt(1.0 / 6.0);
    Gate u = Gate::Zero(8, 8);
    u(0, 0) = big;
    u(3, 0) = small;
    u(5, 0) = small;
    u(7, 4) = big;
    u(2, 4) = small;
    u(4, 4) = small;

    std::vector<int> fixed{0, 4};
    const std::array<int, 6> free_cols{1, 2, 3, 5, 6, 7};
    std::size_t next = 0;
    for (int e = 0; e < 8 && next < free_cols.size(); ++e) {
        StateVector v = StateVector::Unit(8, e);
        for (const int c : fixed) v -= u.col(c) * (u.col(c).adjoint() * v)(0, 0);
        if (v.norm() < 1e-6) continue;
        const int c = free_cols[next++];
        u.col(c) = v / v.norm();
        fixed.push_back(c);
    }
    return u;
}

struct CloneOutput {
    QubitHandle first;    // the input qubit, now one of the two copies
    QubitHandle second;   // the former blank
    QubitHandle machine;  // cloner ancilla, entangled with both copies
};

inline CloneOutput bh_clone_qubit(World& world, QubitHandle q, Owner owner = Owner::Adversary) {
    static const Gate u = cloner_unitary();
    if (!world.contains(q)) throw UnknownHandle("unknown qubit handle " + std::to_string(q.id));
    const QubitHandle blank = world.allocate(owner);
    const QubitHandle machine = world.allocate(owner);
    const std::array<QubitHandle, 3> t{q, blank, machine};
    world.apply_unitary(u, t);
    return {q, blank, machine};
}

// ---- custody ----------------------------------------------------------------

// What the adversary is allowed to know about an account.
struct PublicInfo {
    std::string id;
    BitString serial;
    PublicKey pk;
};

// A view of a World restricted to the qubits the adversary holds. Anything
// else (Bank b qubits, Alice's A1) raises CustodyViolation.
class AdversaryWorld {
public:
    AdversaryWorld(World& world, std::span<const QubitHandle> granted) : world_(world) {
        for (const auto& q : granted) take(q);
    }

    bool holds(QubitHandle q) const { return held_.contains(q.id) && world_.contains(q); }

    QubitHandle allocate(Amplitude a0 = 1.0, Amplitude a1 = 0.0) {
        const QubitHandle q = world_.allocate(Owner::Adversary, a0, a1);
        held_.insert(q.id);
        return q;
    }

    Register prepare(const AngleList& angles) {
        Register r = prepare_product(world_, angles, Owner::Adversary);
        for (const auto& q : r) held_.insert(q.id);
        return r;
    }

    void apply(const Gate& u, std::span<const QubitHandle> targets) {
        for (const auto& q : targets) require(q);
        world_.apply_unitary(u, targets);
    }

    void apply(const Gate& u, QubitHandle q) { apply(u, std::span(&q, 1)); }

    CloneOutput clone(QubitHandle q) {
        require(q);
        const CloneOutput out = bh_clone_qubit(world_, q, Owner::Adversary);
        held_.insert(out.second.id);
        held_.insert(out.machine.id);
        return out;
    }

    int measure(QubitHandle q) {
        require(q);
        return world_.measure_computational(q);
    }

    void discard(QubitHandle q) {
        require(q);
        world_.discard(q);
        held_.erase(q.id);
    }

    DensityMatrix reduced_density(std::span<const QubitHandle> subset) const {
        for (const auto& q : subset) require(q);
        return world_.reduced_density(subset);
    }

    std::mt19937_64& rng() { return world_.rng(); }

private:
    void take(QubitHandle q) {
        if (!world_.contains(q)) throw UnknownHandle("unknown qubit handle " + std::to_string(q.id));
        if (world_.owner(q) == Owner::Bank) throw CustodyViolation("qubit " + std::to_string(q.id) + " belongs to the Bank");
        world_.set_owner(q, Owner::Adversary);
        held_.insert(q.id);
    }

    void require(QubitHandle q) const {
        if (!holds(q)) throw CustodyViolation("adversary does not hold qubit " + std::to_string(q.id));
    }

    World& world_;
    std::set<std::uint64_t> held_;
};

struct LocalOp {
    QubitHandle target;
    Gate unitary;
};

// Applies single-qubit unitaries to A2 qubits of an intercepted cheque. The
// classical fields are passed through unchanged.
inline QuantumCheque local_tamper(AdversaryWorld& adv, const QuantumCheque& chi, std::span<const LocalOp> ops) {
    for (const auto& op : ops) {
        if (std::find(chi.a2.begin(), chi.a2.end(), op.target) == chi.a2.end())
            throw CustodyViolation("local_tamper may only touch A2 qubits of the cheque");
        if (op.unitary.rows() != 2) throw InvalidArgument("local_tamper takes single-qubit unitaries");
    }
    for (const auto& op : ops) adv.apply(op.unitary, op.target);
    return chi;
}

// ---- strategies ---------------------------------------------------------------

enum class AttackStrategy { CloneAndDoubleSpend, Replay, TamperAmount, ForgeFreshKeyGuess, LocalUnitaryTamper };

inline constexpr std::array<AttackStrategy, 5> kAllStrategies{
    AttackStrategy::CloneAndDoubleSpend, AttackStrategy::Replay, AttackStrategy::TamperAmount,
    AttackStrategy::ForgeFreshKeyGuess, AttackStrategy::LocalUnitaryTamper};

inline std::string_view to_string(AttackStrategy s) {
    switch (s) {
        case AttackStrategy::CloneAndDoubleSpend: return "clone";
        case AttackStrategy::Replay: return "replay";
        case AttackStrategy::TamperAmount: return "tamper-amount";
        case AttackStrategy::ForgeFreshKeyGuess: return "forge-key-guess";
        case AttackStrategy::LocalUnitaryTamper: return "local-unitary";
    }
    return "?";
}

inline AttackStrategy strategy_from_string(std::string_view s) {
    for (const auto st : kAllStrategies)
        if (to_string(st) == s) return st;
    throw InvalidArgument("unknown strategy '" + std::string(s) + "'");
}

struct AttackOptions {
    std::uint64_t amount = 100;
    std::uint64_t tampered_amount = 1000000;
    Gate unitary = gates::pauli_x();  // for LocalUnitaryTamper
};

struct AttackStats {
    AttackStrategy strategy = AttackStrategy::Replay;
    std::size_t trials = 0;
    std::size_t successes = 0;
    std::map<std::string, std::size_t> histogram;  // verdicts of the primary submission
    stats::Interval wilson;
    std::size_t second_deposit_accepts = 0;
    // Sum over trials of the analytic success probability, and the standard
    // deviation of the success count under that model.
    std::optional<double> expected_successes;
    std::optional<double> expected_sigma;
    std::size_t key_hits = 0;  // ForgeFreshKeyGuess: guessed key equals k
    std::optional<bool> within_4sigma;

    double rate() const { return trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0; }
};

// Seed of trial t: both words of `seed` and of t through std::seed_seq.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (std::uint64_t{out[0]} << 32) | out[1];
}

// <psi| rho |psi> for each output of the cloner on input |0>. The cloner is
// covariant, so this holds for every input.
inline double clone_fidelity() {
    World w(0);
    const QubitHandle q = w.allocate(Owner::Adversary);
    const auto out = bh_clone_qubit(w, q);
    return w.fidelity(std::span(&out.second, 1), bloch_state(0.0, 0.0));
}

// Acceptance probability for independent g-state tests and one psi_alice test.
inline double verdict_probability(std::span<const double> g_pass, double psi_pass, const AcceptancePolicy& policy) {
    return acceptance_probability(g_pass, policy) * psi_pass;
}

namespace detail {

struct Trial {
    bool success = false;
    bool second_accepted = false;
    VerifyReason reason = VerifyReason::Ok;
    std::optional<double> predicted;
    bool key_hit = false;
};

inline constexpr std::string_view kVictimId = "alice";

// The adversary intercepts chi, clones every qubit, keeps the clones and
// measures out its own remnants and the cloner ancillas.
inline QuantumCheque clone_cheque(AdversaryWorld& adv, const QuantumCheque& chi) {
    QuantumCheque forged = chi;
    auto clone_one = [&](QubitHandle q) {
        const CloneOutput out = adv.clone(q);
        adv.discard(out.machine);
        adv.discard(out.first);
        return out.second;
    };
    for (auto& q : forged.a2) q = clone_one(q);
    for (auto& q : forged.psi_alice) q = clone_one(q);
    return forged;
}

inline QuantumCheque forge_fresh(AdversaryWorld& adv, const PublicInfo& info, const SchemeParams& params,
                                 std::uint64_t amount, BitString& guessed_key) {
    auto& rng = adv.rng();
    guessed_key = BitString::random(rng, params.key_bits);
    QuantumCheque forged;
    forged.id = info.id;
    forged.serial = info.serial;
    forged.amount = amount;
    forged.nonce = BitString::random(rng, params.key_bits);
    const BitString m = encode_amount(amount);
    forged.psi_alice = adv.prepare(derive_angles(f_input(guessed_key, encode_id(info.id), forged.nonce, m), params.n));
    for (std::size_t i = 1; i <= params.l; ++i)
        forged.a2.push_back(adv.prepare(derive_angles(g_input(forged.nonce, m, i), 1)).front());
    // Without sk the best the adversary can do is a well-formed guess.
    const auto sig_bytes = std::size_t{info.pk.security_parameter} * (info.pk.security_parameter / 8);
    forged.signature.scheme = info.pk.scheme;
    forged.signature.payload.resize(sig_bytes);
    for (auto& b : forged.signature.payload) b = static_cast<std::uint8_t>(rng());
    return forged;
}

inline StateVector g_state(const BitString& nonce, const BitString& m, std::size_t i) {
    return angles_to_state(derive_angles(g_input(nonce, m, i), 1).front());
}

inline double local_unitary_pass(const StateVector& g, const Gate& u) {
    const Gate z = gates::pauli_z();
    double p = 0.0;
    for (int m = 0; m < 2; ++m) {
        const Gate eff = m ? Gate(z * u * z) : u;
        const double d = std::abs((g.adjoint() * eff * g)(0, 0));
        p += 0.5 * swap_pass_probability(d);
    }
    return p;
}

// Overlaps of the states the Bank expects against what an amount-tampered
// cheque delivers, computed on a scratch world.
inline double tamper_prediction(const BankRecord& rec, const QuantumCheque& chi, std::uint64_t new_amount,
                                const SchemeParams& params) {
    World scratch(0);
    const BitString m0 = encode_amount(chi.amount);
    const BitString m1 = encode_amount(new_amount);
    const BitString id = encode_id(chi.id);
    const std::size_t l = chi.a2.size();
    std::vector<double> g_pass;
    for (std::size_t i = 1; i <= l; ++i) {
        const QubitHandle a = eval_g(scratch, chi.nonce, m0, i, l, Owner::Bank);
        const QubitHandle b = eval_g(scratch, chi.nonce, m1, i, l, Owner::Bank);
        g_pass.push_back(swap_pass_probability(scratch.overlap(std::span(&a, 1), std::span(&b, 1))));
        scratch.discard(a);
        scratch.discard(b);
    }
    const Register fa = eval_f(scratch, rec.key, id, chi.nonce, m0, params.n, Owner::Bank);
    const Register fb = eval_f(scratch, rec.key, id, chi.nonce, m1, params.n, Owner::Bank);
    const double psi_pass = swap_pass_probability(scratch.overlap(fa, fb));
    return verdict_probability(g_pass, psi_pass, params.policy);
}

inline Trial run_trial(AttackStrategy strategy, const SchemeParams& params, std::uint64_t seed,
                       const AttackOptions& opt, double clone_f) {
    World world(seed);
    Bank bank;
    auto [book, rec] = gen_account(world, bank, std::string(kVictimId), params);
    const PublicInfo info{book.id, book.serial, book.pk};
    Trial t;

    QuantumCheque original;
    QuantumCheque submitted;
    if (strategy == AttackStrategy::ForgeFreshKeyGuess) {
        AdversaryWorld adv(world, {});
        BitString guess;
        submitted = forge_fresh(adv, info, params, opt.amount, guess);
        t.key_hit = guess == book.key;
        original = submitted;
        t.predicted = 0.0;
    } else {
        original = sign_cheque(world, book, opt.amount, params);
        AdversaryWorld adv(world, original.qubits());
        switch (strategy) {
            case AttackStrategy::Replay:
                submitted = original;
                t.predicted = 0.0;
                break;
            case AttackStrategy::CloneAndDoubleSpend: {
                submitted = clone_cheque(adv, original);
                const std::vector<double> g_pass(params.l, swap_pass_probability(std::sqrt(clone_f)));
                const double psi_f = std::pow(clone_f, static_cast<double>(params.n));
                t.predicted = verdict_probability(g_pass, (1.0 + psi_f) / 2.0, params.policy);
                break;
            }
            case AttackStrategy::TamperAmount:
                t.predicted = tamper_prediction(rec, original, opt.tampered_amount, params);
                submitted = original;
                submitted.amount = opt.tampered_amount;
                break;
            case AttackStrategy::LocalUnitaryTamper: {
                std::vector<LocalOp> ops;
                std::vector<double> g_pass;
                const BitString m = encode_amount(original.amount);
                for (std::size_t i = 0; i < original.a2.size(); ++i) {
                    ops.push_back({original.a2[i], opt.unitary});
                    g_pass.push_back(local_unitary_pass(g_state(original.nonce, m, i + 1), opt.unitary));
                }
                submitted = local_tamper(adv, original, ops);
                t.predicted = verdict_probability(g_pass, 1.0, params.policy);
                break;
            }
            case AttackStrategy::ForgeFreshKeyGuess: break;
        }
    }

    hand_over(world, submitted, Owner::Payee);
    const VerifyResult first = verify_cheque(world, bank, submitted, params);
    t.reason = first.reason;
    // A replayed legitimate cheque is an honest first deposit, not a counterfeit.
    t.success = first.accepted && strategy != AttackStrategy::Replay;

    hand_over(world, original, Owner::Payee);
    const VerifyResult second = verify_cheque(world, bank, original, params);
    t.second_accepted = second.accepted;
    if (strategy == AttackStrategy::Replay) t.success = second.accepted;
    return t;
}

}  // namespace detail

inline AttackStats run_attack(AttackStrategy strategy, const SchemeParams& params, std::size_t trials,
                              std::uint64_t seed, const AttackOptions& options = {}) {
    params.validate();
    if (trials < 1) throw InvalidArgument("trials must be at least 1");
    if (strategy == AttackStrategy::TamperAmount && options.tampered_amount == options.amount)
        throw InvalidArgument("tampered amount must differ from the issued amount");
    if (!is_unitary(options.unitary) || options.unitary.rows() != 2)
        throw InvalidArgument("local unitary must be a 2x2 unitary");

    const double clone_f = clone_fidelity();
    AttackStats s;
    s.strategy = strategy;
    s.trials = trials;
    std::vector<double> ps;
    for (std::size_t i = 0; i < trials; ++i) {
        const auto t = detail::run_trial(strategy, params, trial_seed(seed, i), options, clone_f);
        s.successes += t.success ? 1 : 0;
        s.second_deposit_accepts += t.second_accepted ? 1 : 0;
        s.key_hits += t.key_hit ? 1 : 0;
        ++s.histogram[std::string(to_string(t.reason))];
        if (t.predicted) ps.push_back(*t.predicted);
    }
    s.wilson = stats::wilson(s.successes, s.trials);
    if (ps.size() == trials) {
        double sum = 0.0;
        for (const double p : ps) sum += p;
        s.expected_successes = sum;
        s.expected_sigma = stats::poisson_binomial_sigma(ps);
        s.within_4sigma = stats::within_sigmas(static_cast<double>(s.successes), sum, *s.expected_sigma);
    }
    return s;
}

}  // namespace qcheque
