// teleport.hpp
// GHZ-based encoding of a single qubit into an (A2, B) pair and its recovery.
//
// With psi = a|0> + b|1> and the triple (A1, A2, B) in (|000> + |111>)/sqrt2,
// a Bell measurement on (psi, A1) leaves (A2, B) in
//     PsiPlus : a|00> + b|11>      PsiMinus: a|00> - b|11>
//     PhiPlus : b|00> + a|11>      PhiMinus: b|00> - a|11>   (up to phase)
// Alice then corrects A2 by the table below. For the Phi outcomes the pair
// ends up as a|01> + b|10>: the Bank's marginal on B cannot be changed by an
// operation on A2 alone. Either form decodes to psi once B is measured in the
// Hadamard basis and A2 is corrected by I (+) or Z (-).

#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "qcheque/qsim.hpp"

namespace qcheque {

enum class Pauli : std::uint8_t { I, X, Y, Z };

inline std::string_view to_string(Pauli p) {
    switch (p) {
        case Pauli::I: return "I";
        case Pauli::X: return "X";
        case Pauli::Y: return "Y";
        case Pauli::Z: return "Z";
    }
    return "?";
}

inline Gate pauli_matrix(Pauli p) {
    switch (p) {
        case Pauli::I: return gates::identity();
        case Pauli::X: return gates::pauli_x();
        case Pauli::Y: return gates::pauli_y();
        case Pauli::Z: return gates::pauli_z();
    }
    return gates::identity();
}

// Alice's correction on A2 for each Bell outcome.
inline Pauli sign_correction(BellOutcome b) {
    switch (b) {
        case BellOutcome::PsiPlus: return Pauli::I;
        case BellOutcome::PsiMinus: return Pauli::Z;
        case BellOutcome::PhiPlus: return Pauli::X;
        case BellOutcome::PhiMinus: return Pauli::Y;
    }
    return Pauli::I;
}

// The branch's correction on A2 for the Bank's Hadamard-basis outcome.
inline Pauli verify_correction(PlusMinus m) { return m == PlusMinus::Plus ? Pauli::I : Pauli::Z; }

struct GhzTriple {
    QubitHandle a1;
    QubitHandle a2;
    QubitHandle b;
    std::size_t index = 0;  // 1..l
    bool consumed = false;
};

struct EncodingRecord {
    std::size_t index = 0;
    BellOutcome outcome = BellOutcome::PsiPlus;
    Pauli correction = Pauli::I;
};

struct RecoveryRecord {
    QubitHandle qubit;
    PlusMinus outcome = PlusMinus::Plus;
    Pauli correction = Pauli::I;
};

inline GhzTriple prepare_ghz(World& world, std::size_t index) {
    const double h = 1.0 / std::sqrt(2.0);
    const std::array<Owner, 3> owners{Owner::Alice, Owner::Alice, Owner::Bank};
    std::vector<Amplitude> amps(8, 0.0);
    amps[0] = h;
    amps[7] = h;
    const Register r = world.allocate_register(owners, std::move(amps));
    return {r[0], r[1], r[2], index, false};
}

// Bell-measures (psi, a1) and applies the sign-time correction to a2.
// psi and a1 are consumed.
inline EncodingRecord encode_qubit(World& world, QubitHandle psi, GhzTriple& triple) {
    if (triple.consumed) throw ProtocolError("GHZ triple " + std::to_string(triple.index) + " already used");
    if (world.group_of(psi).size() != 1) throw InvalidArgument("encode_qubit expects an unentangled input qubit");
    const BellOutcome outcome = world.measure_bell(psi, triple.a1);
    triple.consumed = true;
    const Pauli fix = sign_correction(outcome);
    if (fix != Pauli::I) world.apply_gate(pauli_matrix(fix), triple.a2);
    return {triple.index, outcome, fix};
}

// Hadamard-measures b, discards it, and corrects a2, which then holds the
// encoded qubit up to global phase. Nothing checks that the pair was
// actually encoded.
inline RecoveryRecord recover_qubit(World& world, QubitHandle b, QubitHandle a2) {
    if (b == a2) throw InvalidArgument("recover_qubit needs two distinct qubits");
    if (!world.contains(a2)) throw UnknownHandle("unknown qubit handle " + std::to_string(a2.id));
    const PlusMinus m = world.measure_hadamard(b);
    world.discard(b);
    const Pauli fix = verify_correction(m);
    if (fix != Pauli::I) world.apply_gate(pauli_matrix(fix), a2);
    return {a2, m, fix};
}

}  // namespace qcheque
