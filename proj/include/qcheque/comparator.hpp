// comparator.hpp
// Swap tests: an ancilla in |+>, one Fredkin gate per aligned qubit pair
// (all sharing the ancilla as control), a Hadamard on the ancilla, and a
// computational measurement. Outcome 0 is a pass. For pure registers the
// pass probability is (1 + |<A|B>|^2) / 2, and (1 + Tr(rho_A rho_B)) / 2 in
// general. The registers keep their post-measurement state.

#pragma once

#include <cmath>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "qcheque/qsim.hpp"

namespace qcheque {

struct SwapOutcome {
    bool passed = false;
    int ancilla_bit = 1;  // passed <=> ancilla_bit == 0
};

inline double swap_pass_probability(double overlap) { return (1.0 + overlap * overlap) / 2.0; }

inline SwapOutcome swap_test(World& world, std::span<const QubitHandle> a, std::span<const QubitHandle> b,
                             Owner ancilla_owner = Owner::Bank) {
    if (a.size() != b.size() || a.empty()) throw InvalidArgument("swap test registers must have equal nonzero length");
    std::vector<QubitHandle> all(a.begin(), a.end());
    all.insert(all.end(), b.begin(), b.end());
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (!world.contains(all[i])) throw UnknownHandle("unknown qubit handle " + std::to_string(all[i].id));
        for (std::size_t j = i + 1; j < all.size(); ++j)
            if (all[i] == all[j]) throw InvalidArgument("swap test registers overlap");
    }

    const Gate h = gates::hadamard();
    const QubitHandle ancilla = world.allocate(ancilla_owner);
    world.apply_gate(h, ancilla);
    for (std::size_t j = 0; j < a.size(); ++j) world.apply_cswap(ancilla, a[j], b[j]);
    world.apply_gate(h, ancilla);
    const int bit = world.measure_computational(ancilla);
    world.discard(ancilla);
    return {bit == 0, bit};
}

inline SwapOutcome swap_test(World& world, QubitHandle a, QubitHandle b, Owner ancilla_owner = Owner::Bank) {
    return swap_test(world, std::span(&a, 1), std::span(&b, 1), ancilla_owner);
}

// How the Bank turns a batch of single-shot swap tests into a verdict.
//
// Strict: every test must pass. Threshold: the fraction of passing amount
// (g-state) tests must reach kappa2, and the signature-state test is gated by
// kappa1; a single test passes either 0% or 100% of the time, so with
// kappa1 > 0.5 it must pass.
struct AcceptancePolicy {
    enum class Mode { Strict, Threshold };

    Mode mode = Mode::Strict;
    double kappa1 = 0.91;
    double kappa2 = 0.91;

    void validate() const {
        auto ok = [](double k) { return k > 0.5 && k <= 1.0; };
        if (!ok(kappa1) || !ok(kappa2)) throw InvalidArgument("kappa values must lie in (0.5, 1]");
    }

    bool accepts(std::size_t passed, std::size_t total, double kappa) const {
        if (total == 0) return true;
        if (mode == Mode::Strict) return passed == total;
        return static_cast<double>(passed) >= kappa * static_cast<double>(total) - 1e-12;
    }

    // Smallest pass count out of `total` that satisfies the policy.
    std::size_t min_passes(std::size_t total, double kappa) const {
        for (std::size_t k = 0; k <= total; ++k)
            if (accepts(k, total, kappa)) return k;
        return total;
    }
};

inline std::string_view to_string(AcceptancePolicy::Mode m) {
    return m == AcceptancePolicy::Mode::Strict ? "strict" : "threshold";
}

inline AcceptancePolicy::Mode policy_mode_from_string(std::string_view s) {
    if (s == "strict") return AcceptancePolicy::Mode::Strict;
    if (s == "threshold") return AcceptancePolicy::Mode::Threshold;
    throw InvalidArgument("unknown policy '" + std::string(s) + "'");
}

struct RegisterPair {
    Register a;
    Register b;
};

struct RepeatedSwapResult {
    bool accepted = false;
    std::vector<SwapOutcome> outcomes;
};

// Runs one swap test per pair in order and applies the kappa2 rule.
inline RepeatedSwapResult repeated_swap_test(World& world, std::span<const RegisterPair> pairs,
                                             const AcceptancePolicy& policy, Owner ancilla_owner = Owner::Bank) {
    std::vector<QubitHandle> all;
    for (const auto& p : pairs) {
        all.insert(all.end(), p.a.begin(), p.a.end());
        all.insert(all.end(), p.b.begin(), p.b.end());
    }
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j)
            if (all[i] == all[j]) throw InvalidArgument("swap test pairs must be disjoint");

    RepeatedSwapResult r;
    std::size_t passed = 0;
    for (const auto& p : pairs) {
        r.outcomes.push_back(swap_test(world, p.a, p.b, ancilla_owner));
        passed += r.outcomes.back().passed ? 1 : 0;
    }
    r.accepted = policy.accepts(passed, pairs.size(), policy.kappa2);
    return r;
}

// Probability that a policy accepts independent tests with the given pass
// probabilities (Poisson-binomial tail).
inline double acceptance_probability(std::span<const double> pass_probs, const AcceptancePolicy& policy) {
    const std::size_t total = pass_probs.size();
    std::vector<double> dist(total + 1, 0.0);
    dist[0] = 1.0;
    for (std::size_t i = 0; i < total; ++i)
        for (std::size_t k = i + 2; k-- > 0;) {
            dist[k] *= 1.0 - pass_probs[i];
            if (k > 0) dist[k] += dist[k - 1] * pass_probs[i];
        }
    double p = 0.0;
    for (std::size_t k = policy.min_passes(total, policy.kappa2); k <= total; ++k) p += dist[k];
    return p;
}

}  // namespace qcheque
