#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "qcheque/teleport.hpp"

using namespace qcheque;

namespace {

StateVector random_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return bloch_state(std::acos(std::sqrt(u(rng))), 2 * std::numbers::pi * u(rng));
}

// |<want|have>|^2 for 4-dim (A2, B) state vectors.
double fidelity4(const StateVector& have, const StateVector& want) { return std::norm(want.dot(have)); }

StateVector pair_state(Amplitude c00, Amplitude c01, Amplitude c10, Amplitude c11) {
    StateVector v(4);
    v << c00, c01, c10, c11;
    return v;
}

}  // namespace

TEST(Teleport, GhzPreparation) {
    World w(1);
    const auto t = prepare_ghz(w, 3);
    EXPECT_EQ(t.index, 3u);
    EXPECT_EQ(w.owner(t.a1), Owner::Alice);
    EXPECT_EQ(w.owner(t.b), Owner::Bank);
    const auto& g = w.group_of(t.a1);
    EXPECT_NEAR(std::norm(g.amplitudes[0]), 0.5, 1e-12);
    EXPECT_NEAR(std::norm(g.amplitudes[7]), 0.5, 1e-12);
}

TEST(Teleport, CorrectionTables) {
    EXPECT_EQ(sign_correction(BellOutcome::PsiPlus), Pauli::I);
    EXPECT_EQ(sign_correction(BellOutcome::PsiMinus), Pauli::Z);
    EXPECT_EQ(sign_correction(BellOutcome::PhiPlus), Pauli::X);
    EXPECT_EQ(sign_correction(BellOutcome::PhiMinus), Pauli::Y);
    EXPECT_EQ(verify_correction(PlusMinus::Plus), Pauli::I);
    EXPECT_EQ(verify_correction(PlusMinus::Minus), Pauli::Z);
}

TEST(Teleport, PostEncodePairStates) {
    // Psi outcomes leave (A2, B) in a|00> + b|11>; Phi outcomes, after the
    // X or Y fix on A2 alone, leave a|01> + b|10>.
    std::mt19937_64 rng(99);
    std::array<int, 4> seen{};
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
        World w(seed);
        const StateVector psi = random_state(rng);
        const auto q = w.allocate(Owner::Alice, psi[0], psi[1]);
        GhzTriple t = prepare_ghz(w, 1);
        const auto rec = encode_qubit(w, q, t);
        ++seen[static_cast<int>(rec.outcome)];
        const std::array<QubitHandle, 2> pair{t.a2, t.b};
        const DensityMatrix rho = w.reduced_density(pair);
        const bool psi_family = rec.outcome == BellOutcome::PsiPlus || rec.outcome == BellOutcome::PsiMinus;
        const StateVector want = psi_family ? pair_state(psi[0], 0, 0, psi[1]) : pair_state(0, psi[0], psi[1], 0);
        EXPECT_NEAR((want.adjoint() * rho * want)(0, 0).real(), 1.0, 1e-10);
    }
    for (int k = 0; k < 4; ++k) EXPECT_GT(seen[k], 50);
}

TEST(Teleport, RecoveryRestoresState) {
    std::mt19937_64 rng(5);
    World w(77);
    for (int i = 0; i < 300; ++i) {
        const StateVector psi = random_state(rng);
        const auto q = w.allocate(Owner::Alice, psi[0], psi[1]);
        GhzTriple t = prepare_ghz(w, 1);
        encode_qubit(w, q, t);
        const auto rr = recover_qubit(w, t.b, t.a2);
        EXPECT_FALSE(w.contains(t.b));
        EXPECT_NEAR(w.fidelity(std::span(&rr.qubit, 1), psi), 1.0, 1e-10);
        w.discard(rr.qubit);
    }
    EXPECT_EQ(w.qubit_count(), 0u);
}

TEST(Teleport, BankMarginalBeforeAndAfter) {
    std::mt19937_64 rng(8);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        World w(seed);
        GhzTriple t = prepare_ghz(w, 1);
        const DensityMatrix before = w.reduced_density(std::span(&t.b, 1));
        EXPECT_LT((before - DensityMatrix::Identity(2, 2) * 0.5).cwiseAbs().maxCoeff(), 1e-12);

        const StateVector psi = random_state(rng);
        const auto q = w.allocate(Owner::Alice, psi[0], psi[1]);
        const auto rec = encode_qubit(w, q, t);
        const DensityMatrix after = w.reduced_density(std::span(&t.b, 1));
        const bool psi_family = rec.outcome == BellOutcome::PsiPlus || rec.outcome == BellOutcome::PsiMinus;
        const double p0 = psi_family ? std::norm(psi[0]) : std::norm(psi[1]);
        EXPECT_NEAR(after(0, 0).real(), p0, 1e-10);
        EXPECT_NEAR(after(1, 1).real(), 1 - p0, 1e-10);
        EXPECT_NEAR(std::abs(after(0, 1)), 0.0, 1e-10);
    }
}

TEST(Teleport, TripleUsedOnce) {
    World w(1);
    GhzTriple t = prepare_ghz(w, 1);
    encode_qubit(w, w.allocate(Owner::Alice), t);
    EXPECT_THROW(encode_qubit(w, w.allocate(Owner::Alice), t), ProtocolError);
}

TEST(Teleport, EntangledInputRejected) {
    World w(1);
    GhzTriple t = prepare_ghz(w, 1);
    const auto a = w.allocate(Owner::Alice);
    const auto b = w.allocate(Owner::Alice);
    w.apply_gate(gates::hadamard(), a);
    w.apply_gate(gates::cnot(), a, b);
    EXPECT_THROW(encode_qubit(w, a, t), InvalidArgument);
}

TEST(Teleport, RecoverWithoutEncodingIsUnchecked) {
    // Nothing stops the Bank from recovering an un-encoded pair; the result
    // is just a random qubit.
    World w(1);
    GhzTriple t = prepare_ghz(w, 1);
    EXPECT_NO_THROW(recover_qubit(w, t.b, t.a2));
}
