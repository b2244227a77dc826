// qowf.hpp
// Classical input -> product-state quantum one-way functions.
//
// An input bit string is expanded through SHA-256 in counter mode into two
// uniform reals (u1, u2) per output qubit. Each qubit is prepared as
//     cos(theta)|0> + e^{i phi} sin(theta)|1>,
//     theta = arccos(sqrt(u1)),  phi = 2 pi u2,
// which is Haar-uniform on the Bloch sphere. Expansion block c is
//     SHA-256("qcheque/qowf/v1" || be32(c) || be64(bit length) || packed bits).
// tools/gen_qowf_vectors.py re-derives the same angles independently.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include "qcheque/bitstring.hpp"
#include "qcheque/qsim.hpp"
#include "qcheque/sha256.hpp"

namespace qcheque {

struct BlochAngles {
    double theta = 0.0;  // [0, pi/2] by construction
    double phi = 0.0;    // [0, 2 pi)
};

using AngleList = std::vector<BlochAngles>;

// Produces `length` pseudorandom bytes from `seed`.
using Expander = std::function<Bytes(std::span<const std::uint8_t> seed, std::size_t length)>;

inline Bytes sha256_counter_expand(std::span<const std::uint8_t> seed, std::size_t length) {
    static constexpr std::string_view tag = "qcheque/qowf/v1";
    Bytes out;
    out.reserve(length + 32);
    for (std::uint32_t counter = 0; out.size() < length; ++counter) {
        const std::array<std::uint8_t, 4> be{static_cast<std::uint8_t>(counter >> 24),
                                             static_cast<std::uint8_t>(counter >> 16),
                                             static_cast<std::uint8_t>(counter >> 8),
                                             static_cast<std::uint8_t>(counter)};
        const auto block = Sha256()
                               .update(std::span(reinterpret_cast<const std::uint8_t*>(tag.data()), tag.size()))
                               .update(be)
                               .update(seed)
                               .finish();
        out.insert(out.end(), block.begin(), block.end());
    }
    out.resize(length);
    return out;
}

namespace detail {

inline double unit_interval(std::span<const std::uint8_t> eight) {
    std::uint64_t w = 0;
    for (auto b : eight) w = (w << 8) | b;
    return static_cast<double>(w >> 11) * 0x1.0p-53;
}

}  // namespace detail

inline AngleList derive_angles(const BitString& input, std::size_t n, const Expander& expand = sha256_counter_expand) {
    if (n == 0) throw InvalidArgument("derive_angles needs n >= 1");
    if (input.empty()) throw InvalidArgument("derive_angles needs a nonempty input");
    const Bytes stream = expand(input.encode(), 16 * n);
    if (stream.size() != 16 * n) throw Error("expander returned the wrong number of bytes");
    AngleList out(n);
    const std::span<const std::uint8_t> s(stream);
    for (std::size_t j = 0; j < n; ++j) {
        const double u1 = detail::unit_interval(s.subspan(16 * j, 8));
        const double u2 = detail::unit_interval(s.subspan(16 * j + 8, 8));
        out[j] = {std::acos(std::sqrt(u1)), 2.0 * std::numbers::pi * u2};
    }
    return out;
}

inline StateVector angles_to_state(const BlochAngles& a) { return bloch_state(a.theta, a.phi); }

// Allocates one product qubit per angle pair.
inline Register prepare_product(World& world, const AngleList& angles, Owner owner) {
    Register reg;
    reg.reserve(angles.size());
    for (const auto& a : angles) {
        const StateVector v = angles_to_state(a);
        reg.push_back(world.allocate(owner, v[0], v[1]));
    }
    return reg;
}

// f(k || id || r || M): the n-qubit signature state bound to the whole cheque.
inline BitString f_input(const BitString& k, const BitString& id, const BitString& r, const BitString& m) {
    if (k.empty() || id.empty() || r.empty() || m.empty()) throw InvalidArgument("eval_f inputs must be nonempty");
    return frame({k, id, r, m});
}

// g(r || M || i): the single-qubit amount state for cheque position i.
inline BitString g_input(const BitString& r, const BitString& m, std::size_t i) {
    if (r.empty() || m.empty()) throw InvalidArgument("eval_g inputs must be nonempty");
    const BitString idx = encode_index(i);
    return frame({r, m, idx});
}

inline Register eval_f(World& world, const BitString& k, const BitString& id, const BitString& r, const BitString& m,
                       std::size_t n, Owner owner, const Expander& expand = sha256_counter_expand) {
    return prepare_product(world, derive_angles(f_input(k, id, r, m), n, expand), owner);
}

inline QubitHandle eval_g(World& world, const BitString& r, const BitString& m, std::size_t i, std::size_t l,
                          Owner owner, const Expander& expand = sha256_counter_expand) {
    if (i < 1 || i > l) throw InvalidArgument("eval_g index out of range 1..l");
    return prepare_product(world, derive_angles(g_input(r, m, i), 1, expand), owner).front();
}

}  // namespace qcheque
