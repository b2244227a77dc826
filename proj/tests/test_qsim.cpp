#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "qcheque/qsim.hpp"

using namespace qcheque;

namespace {

constexpr double kTol = 1e-12;

double max_abs(const DensityMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(World, AllocateIsProductGroup) {
    World w(1);
    const auto a = w.allocate(Owner::Alice);
    const auto b = w.allocate(Owner::Bank, 0.0, 1.0);
    EXPECT_EQ(w.group_count(), 2u);
    EXPECT_EQ(w.owner(a), Owner::Alice);
    EXPECT_EQ(w.owner(b), Owner::Bank);
    w.check_invariants();
}

TEST(World, RejectsUnnormalizedInput) {
    World w(1);
    EXPECT_THROW(w.allocate(Owner::Alice, 1.0, 1.0), InvalidArgument);
}

TEST(World, UnknownHandleThrows) {
    World w(1);
    EXPECT_THROW(w.owner(QubitHandle{42}), UnknownHandle);
    EXPECT_THROW(w.apply_gate(gates::hadamard(), QubitHandle{42}), UnknownHandle);
}

TEST(World, BellPairAmplitudesMsbFirst) {
    World w(7);
    const auto q0 = w.allocate(Owner::Alice);
    const auto q1 = w.allocate(Owner::Alice);
    w.apply_gate(gates::hadamard(), q0);
    w.apply_gate(gates::cnot(), q0, q1);
    const auto& g = w.group_of(q0);
    ASSERT_EQ(g.qubits.size(), 2u);
    EXPECT_EQ(g.qubits[0], q0);
    const double h = 1 / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(g.amplitudes[0] - h), 0.0, kTol);
    EXPECT_NEAR(std::abs(g.amplitudes[3] - h), 0.0, kTol);
    EXPECT_NEAR(std::abs(g.amplitudes[1]), 0.0, kTol);
    EXPECT_NEAR(std::abs(g.amplitudes[2]), 0.0, kTol);
}

TEST(World, XOnSecondQubitFlipsLowBit) {
    World w(7);
    const auto q0 = w.allocate(Owner::Alice);
    const auto q1 = w.allocate(Owner::Alice);
    const std::array<QubitHandle, 2> t{q0, q1};
    Gate xi = Gate::Zero(4, 4);
    xi.block(0, 0, 2, 2) = gates::pauli_x();
    xi.block(2, 2, 2, 2) = gates::pauli_x();
    w.apply_unitary(xi, t);
    EXPECT_NEAR(std::abs(w.group_of(q0).amplitudes[1]), 1.0, kTol);
}

TEST(World, NonUnitaryGateRejected) {
    World w(1);
    const auto q = w.allocate(Owner::Alice);
    Gate g = Gate::Identity(2, 2) * 2.0;
    EXPECT_THROW(w.apply_gate(g, q), InvalidArgument);
}

TEST(World, CeilingEnforced) {
    World w(1, 3);
    std::array<QubitHandle, 4> q{};
    for (auto& h : q) h = w.allocate(Owner::Alice);
    w.apply_gate(gates::cnot(), q[0], q[1]);
    w.apply_gate(gates::cnot(), q[1], q[2]);
    EXPECT_THROW(w.apply_gate(gates::cnot(), q[2], q[3]), CapacityError);
}

TEST(World, MeasurementSplitsQubit) {
    World w(3);
    const auto a = w.allocate(Owner::Alice);
    const auto b = w.allocate(Owner::Alice);
    w.apply_gate(gates::hadamard(), a);
    w.apply_gate(gates::cnot(), a, b);
    const int bit = w.measure_computational(a);
    EXPECT_EQ(w.group_of(a).size(), 1u);
    EXPECT_EQ(w.group_of(b).size(), 1u);
    const auto& gb = w.group_of(b);
    EXPECT_NEAR(std::norm(gb.amplitudes[static_cast<std::size_t>(bit)]), 1.0, kTol);
    w.check_invariants();
}

TEST(World, MeasurementFrequencies) {
    World w(11);
    int ones = 0;
    const int trials = 20000;
    for (int i = 0; i < trials; ++i) {
        const auto q = w.allocate(Owner::Alice, std::sqrt(0.3), std::sqrt(0.7));
        ones += w.measure_computational(q);
        w.discard(q);
    }
    const double sigma = std::sqrt(trials * 0.7 * 0.3);
    EXPECT_NEAR(ones, 0.7 * trials, 4 * sigma);
}

TEST(World, HadamardMeasurementOfPlusIsPlus) {
    World w(5);
    const double h = 1 / std::sqrt(2.0);
    for (int i = 0; i < 50; ++i) {
        const auto q = w.allocate(Owner::Bank, h, h);
        EXPECT_EQ(w.measure_hadamard(q), PlusMinus::Plus);
        w.discard(q);
    }
}

TEST(World, BellMeasurementOnBellStates) {
    for (int k = 0; k < 4; ++k) {
        World w(9);
        const auto bv = bell_vector(static_cast<BellOutcome>(k));
        const std::array<Owner, 2> owners{Owner::Alice, Owner::Alice};
        const auto r = w.allocate_register(owners, {bv.begin(), bv.end()});
        EXPECT_EQ(w.measure_bell(r[0], r[1]), static_cast<BellOutcome>(k));
        EXPECT_FALSE(w.contains(r[0]));
        EXPECT_EQ(w.qubit_count(), 0u);
    }
}

TEST(World, ReducedDensityOfBellPairIsMixed) {
    World w(1);
    const auto a = w.allocate(Owner::Alice);
    const auto b = w.allocate(Owner::Bank);
    w.apply_gate(gates::hadamard(), a);
    w.apply_gate(gates::cnot(), a, b);
    const auto rho = w.reduced_density(std::span(&b, 1));
    DensityMatrix expect = DensityMatrix::Identity(2, 2) * 0.5;
    EXPECT_LT(max_abs(rho - expect), kTol);
}

TEST(World, ReducedDensityAcrossGroupsIsTensorProduct) {
    World w(1);
    const auto a = w.allocate(Owner::Alice);
    const auto b = w.allocate(Owner::Alice, 0.0, 1.0);
    const std::array<QubitHandle, 2> ab{a, b};
    const auto rho = w.reduced_density(ab);
    EXPECT_NEAR(rho(1, 1).real(), 1.0, kTol);
    EXPECT_NEAR(rho.trace().real(), 1.0, kTol);
}

TEST(World, OverlapOfBlochStates) {
    World w(1);
    const auto s1 = bloch_state(0.3, 1.1);
    const auto s2 = bloch_state(0.9, -0.4);
    const auto a = w.allocate(Owner::Alice, s1[0], s1[1]);
    const auto b = w.allocate(Owner::Alice, s2[0], s2[1]);
    const double expect = std::abs(s1.dot(s2));
    EXPECT_NEAR(w.overlap(std::span(&a, 1), std::span(&b, 1)), expect, 1e-10);
}

TEST(World, OverlapRejectsEntangledRegister) {
    World w(1);
    const auto a = w.allocate(Owner::Alice);
    const auto b = w.allocate(Owner::Bank);
    const auto c = w.allocate(Owner::Bank);
    w.apply_gate(gates::hadamard(), a);
    w.apply_gate(gates::cnot(), a, b);
    EXPECT_THROW(w.overlap(std::span(&a, 1), std::span(&c, 1)), EntangledRegister);
}

TEST(World, CswapSwapsOnControlOne) {
    World w(1);
    const auto c = w.allocate(Owner::Bank, 0.0, 1.0);
    const auto a = w.allocate(Owner::Alice, 0.0, 1.0);
    const auto b = w.allocate(Owner::Alice);
    w.apply_cswap(c, a, b);
    EXPECT_NEAR(w.fidelity(std::span(&a, 1), bloch_state(0, 0)), 1.0, kTol);
    EXPECT_NEAR(w.fidelity(std::span(&b, 1), bloch_state(std::numbers::pi / 2, 0)), 1.0, kTol);
}

TEST(World, StateRoundTrip) {
    World w(21);
    const auto a = w.allocate(Owner::Alice);
    const auto b = w.allocate(Owner::Bank);
    w.apply_gate(gates::hadamard(), a);
    w.apply_gate(gates::cnot(), a, b);
    World copy = World::from_state(w.state());
    EXPECT_EQ(copy.qubit_count(), 2u);
    EXPECT_EQ(copy.rng()(), w.rng()());
    EXPECT_EQ(copy.owner(b), Owner::Bank);
}

TEST(World, DiscardRemovesHandle) {
    World w(2);
    const auto a = w.allocate(Owner::Alice);
    const auto b = w.allocate(Owner::Alice);
    w.apply_gate(gates::hadamard(), a);
    w.apply_gate(gates::cnot(), a, b);
    w.discard(a);
    EXPECT_FALSE(w.contains(a));
    EXPECT_TRUE(w.contains(b));
    w.check_invariants();
}

TEST(Gates, AllUnitary) {
    EXPECT_TRUE(is_unitary(gates::pauli_x()));
    EXPECT_TRUE(is_unitary(gates::pauli_y()));
    EXPECT_TRUE(is_unitary(gates::pauli_z()));
    EXPECT_TRUE(is_unitary(gates::hadamard()));
    EXPECT_TRUE(is_unitary(gates::cnot()));
    EXPECT_TRUE(is_unitary(gates::bloch_rotation(0.7, 2.1)));
}

TEST(Gates, BlochRotationPreparesBlochState) {
    const StateVector out = gates::bloch_rotation(0.7, 2.1) * bloch_state(0, 0);
    EXPECT_NEAR(std::abs(out.dot(bloch_state(0.7, 2.1))), 1.0, kTol);
}
