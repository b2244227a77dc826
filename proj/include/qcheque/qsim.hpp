// qsim.hpp
// Group-factorized pure-state simulator.
//
// A World holds a set of StateGroups. Each group is a normalized amplitude
// vector over an ordered list of qubits; qubits in different groups are in a
// product state. Groups are merged lazily when a multi-qubit operation spans
// them and measured qubits are split back out.
//
// Ordering convention: inside a group of m qubits, qubits[p] owns bit
// (m - 1 - p) of the amplitude index, i.e. qubits[0] is the most significant.
// The same MSB-first convention applies to gate matrices (targets[0] is the
// most significant), to reduced density matrices, and to any state vector a
// caller passes in. Merging A with B therefore yields kron(A, B).

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qcheque/errors.hpp"

namespace qcheque {

using Amplitude = std::complex<double>;
using Gate = Eigen::MatrixXcd;
using DensityMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

enum class Owner : std::uint8_t { Alice, Bank, Payee, Adversary };

inline std::string_view to_string(Owner o) {
    switch (o) {
        case Owner::Alice: return "Alice";
        case Owner::Bank: return "Bank";
        case Owner::Payee: return "Payee";
        case Owner::Adversary: return "Adversary";
    }
    return "?";
}

inline Owner owner_from_string(std::string_view s) {
    if (s == "Alice") return Owner::Alice;
    if (s == "Bank") return Owner::Bank;
    if (s == "Payee") return Owner::Payee;
    if (s == "Adversary") return Owner::Adversary;
    throw InvalidArgument("unknown owner tag '" + std::string(s) + "'");
}

struct QubitHandle {
    std::uint64_t id = 0;
    friend auto operator<=>(const QubitHandle&, const QubitHandle&) = default;
};

using Register = std::vector<QubitHandle>;

enum class PlusMinus : std::uint8_t { Plus, Minus };

// Labels follow the branch algebra of the GHZ encoding, not the textbook
// naming: PsiPlus/PsiMinus span |00>,|11> and PhiPlus/PhiMinus span |01>,|10>.
//   PsiPlus  = (|00> + |11>)/sqrt2     PsiMinus = (|00> - |11>)/sqrt2
//   PhiPlus  = (|01> + |10>)/sqrt2     PhiMinus = (|01> - |10>)/sqrt2
enum class BellOutcome : std::uint8_t { PsiPlus, PsiMinus, PhiPlus, PhiMinus };

inline std::string_view to_string(BellOutcome b) {
    switch (b) {
        case BellOutcome::PsiPlus: return "PsiPlus";
        case BellOutcome::PsiMinus: return "PsiMinus";
        case BellOutcome::PhiPlus: return "PhiPlus";
        case BellOutcome::PhiMinus: return "PhiMinus";
    }
    return "?";
}

inline std::string_view to_string(PlusMinus p) { return p == PlusMinus::Plus ? "+" : "-"; }

// Bell vector over (q1, q2) in MSB-first order.
inline std::array<Amplitude, 4> bell_vector(BellOutcome b) {
    const double h = 1.0 / std::sqrt(2.0);
    switch (b) {
        case BellOutcome::PsiPlus: return {h, 0.0, 0.0, h};
        case BellOutcome::PsiMinus: return {h, 0.0, 0.0, -h};
        case BellOutcome::PhiPlus: return {0.0, h, h, 0.0};
        case BellOutcome::PhiMinus: return {0.0, h, -h, 0.0};
    }
    return {};
}

namespace gates {

inline Gate identity() { return Gate::Identity(2, 2); }

inline Gate pauli_x() {
    Gate g(2, 2);
    g << 0, 1, 1, 0;
    return g;
}

inline Gate pauli_y() {
    Gate g(2, 2);
    g << 0, Amplitude(0, -1), Amplitude(0, 1), 0;
    return g;
}

inline Gate pauli_z() {
    Gate g(2, 2);
    g << 1, 0, 0, -1;
    return g;
}

inline Gate hadamard() {
    const double h = 1.0 / std::sqrt(2.0);
    Gate g(2, 2);
    g << h, h, h, -h;
    return g;
}

// targets = (control, target)
inline Gate cnot() {
    Gate g = Gate::Zero(4, 4);
    g(0, 0) = g(1, 1) = g(2, 3) = g(3, 2) = 1;
    return g;
}

// Rotation taking |0> to cos(theta)|0> + e^{i phi} sin(theta)|1>.
inline Gate bloch_rotation(double theta, double phi) {
    const Amplitude e = std::polar(1.0, phi);
    Gate g(2, 2);
    g << std::cos(theta), -std::conj(e) * std::sin(theta), e * std::sin(theta), std::cos(theta);
    return g;
}

}  // namespace gates

inline bool is_unitary(const Gate& u, double tol = 1e-9) {
    if (u.rows() != u.cols() || u.rows() == 0) return false;
    const Gate d = u.adjoint() * u - Gate::Identity(u.rows(), u.cols());
    return d.cwiseAbs().maxCoeff() < tol;
}

struct StateGroup {
    std::vector<QubitHandle> qubits;
    std::vector<Amplitude> amplitudes;

    std::size_t size() const { return qubits.size(); }

    double norm() const {
        double s = 0.0;
        for (const auto& a : amplitudes) s += std::norm(a);
        return std::sqrt(s);
    }

    std::size_t position(QubitHandle q) const {
        for (std::size_t p = 0; p < qubits.size(); ++p)
            if (qubits[p] == q) return p;
        throw UnknownHandle("qubit " + std::to_string(q.id) + " not in group");
    }

    // Amplitude-index mask of the qubit at position p.
    std::uint64_t mask(std::size_t p) const { return std::uint64_t{1} << (qubits.size() - 1 - p); }
};

// Everything needed to rebuild a World bit for bit.
struct WorldState {
    std::size_t ceiling = 24;
    std::uint64_t next_qubit = 1;
    std::string rng_state;
    std::vector<StateGroup> groups;
    std::map<std::uint64_t, Owner> owners;
};

namespace detail {

inline std::uint64_t remove_bit(std::uint64_t idx, std::uint64_t b) {
    return ((idx >> 1) & ~(b - 1)) | (idx & (b - 1));
}

// Drops the index bits in `bits`, which must be single-bit masks sorted
// in descending order.
inline std::uint64_t remove_bits(std::uint64_t idx, std::span<const std::uint64_t> bits) {
    for (const auto b : bits) idx = remove_bit(idx, b);
    return idx;
}

inline std::vector<std::uint64_t> sorted_desc(std::span<const std::uint64_t> bits) {
    std::vector<std::uint64_t> v(bits.begin(), bits.end());
    std::sort(v.rbegin(), v.rend());
    return v;
}

}  // namespace detail

class World {
public:
    static constexpr std::size_t kDefaultCeiling = 24;

    explicit World(std::uint64_t seed, std::size_t ceiling = kDefaultCeiling)
        : ceiling_(ceiling), rng_(seed) {
        if (ceiling_ == 0 || ceiling_ > 30) throw InvalidArgument("qubit ceiling must be in 1..30");
    }

    // ---- allocation --------------------------------------------------------

    QubitHandle allocate(Owner owner, Amplitude a0 = 1.0, Amplitude a1 = 0.0) {
        const double n = std::sqrt(std::norm(a0) + std::norm(a1));
        if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-9)
            throw InvalidArgument("single-qubit state must be normalized");
        const QubitHandle q{next_qubit_++};
        add_group(StateGroup{{q}, {a0 / n, a1 / n}});
        owners_[q.id] = owner;
        return q;
    }

    // Allocates len(owners) fresh qubits in the joint state `amps` (MSB-first).
    Register allocate_register(std::span<const Owner> owners, std::vector<Amplitude> amps) {
        if (owners.empty()) throw InvalidArgument("empty register");
        if (owners.size() > ceiling_) throw CapacityError("register exceeds qubit ceiling");
        if (amps.size() != (std::size_t{1} << owners.size()))
            throw InvalidArgument("amplitude count must be 2^qubits");
        double s = 0.0;
        for (const auto& a : amps) s += std::norm(a);
        if (!std::isfinite(s) || std::abs(std::sqrt(s) - 1.0) > 1e-9)
            throw InvalidArgument("register state must be normalized");
        StateGroup g;
        for (const auto o : owners) {
            const QubitHandle q{next_qubit_++};
            g.qubits.push_back(q);
            owners_[q.id] = o;
        }
        for (auto& a : amps) a /= std::sqrt(s);
        g.amplitudes = std::move(amps);
        Register r = g.qubits;
        add_group(std::move(g));
        return r;
    }

    // Measures q out in the computational basis and forgets it.
    void discard(QubitHandle q) {
        const auto gid = group_id(q);
        if (groups_.at(gid).size() > 1) measure_computational(q);
        const auto solo = group_id(q);
        groups_.erase(solo);
        location_.erase(q.id);
        owners_.erase(q.id);
    }

    // ---- introspection -----------------------------------------------------

    bool contains(QubitHandle q) const { return location_.contains(q.id); }

    Owner owner(QubitHandle q) const {
        auto it = owners_.find(q.id);
        if (it == owners_.end()) throw UnknownHandle(unknown(q));
        return it->second;
    }

    void set_owner(QubitHandle q, Owner o) {
        auto it = owners_.find(q.id);
        if (it == owners_.end()) throw UnknownHandle(unknown(q));
        it->second = o;
    }

    const StateGroup& group_of(QubitHandle q) const { return groups_.at(group_id(q)); }
    std::size_t qubit_count() const { return location_.size(); }
    std::size_t group_count() const { return groups_.size(); }
    std::size_t ceiling() const { return ceiling_; }

    std::vector<QubitHandle> handles() const {
        std::vector<QubitHandle> out;
        out.reserve(location_.size());
        for (const auto& [id, g] : location_) out.push_back({id});
        return out;
    }

    std::mt19937_64& rng() { return rng_; }

    // Uniform double in [0, 1) built from the top 53 bits of one draw.
    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    // ---- gates -------------------------------------------------------------

    // Applies a 2x2 or 4x4 unitary to one or two targets.
    void apply_gate(const Gate& u, std::span<const QubitHandle> targets) {
        if (targets.size() != 1 && targets.size() != 2)
            throw InvalidArgument("apply_gate takes one or two targets");
        apply_unitary(u, targets);
    }

    void apply_gate(const Gate& u, QubitHandle q) { apply_unitary(u, std::span(&q, 1)); }

    void apply_gate(const Gate& u, QubitHandle q0, QubitHandle q1) {
        const std::array<QubitHandle, 2> t{q0, q1};
        apply_unitary(u, t);
    }

    // Any k-qubit unitary; the matrix dimension must be 2^k.
    void apply_unitary(const Gate& u, std::span<const QubitHandle> targets) {
        require_distinct(targets);
        if (u.rows() != (Eigen::Index{1} << targets.size()) || u.cols() != u.rows())
            throw InvalidArgument("gate dimension does not match target count");
        if (!is_unitary(u)) throw InvalidArgument("gate is not unitary within 1e-9");
        for (const auto& q : targets) group_id(q);

        StateGroup& g = groups_.at(merge(targets));
        if (targets.size() == 1) {
            apply_1q(g, g.mask(g.position(targets[0])), u);
            return;
        }
        const std::size_t k = targets.size();
        const std::size_t dim = std::size_t{1} << k;
        std::vector<std::uint64_t> offset(dim, 0);
        std::uint64_t all = 0;
        std::vector<std::uint64_t> masks(k);
        for (std::size_t t = 0; t < k; ++t) {
            masks[t] = g.mask(g.position(targets[t]));
            all |= masks[t];
        }
        for (std::size_t local = 0; local < dim; ++local)
            for (std::size_t t = 0; t < k; ++t)
                if (local & (std::size_t{1} << (k - 1 - t))) offset[local] |= masks[t];

        StateVector in(static_cast<Eigen::Index>(dim)), out;
        auto& amps = g.amplitudes;
        for (std::uint64_t base = 0; base < amps.size(); ++base) {
            if (base & all) continue;
            for (std::size_t l = 0; l < dim; ++l) in[static_cast<Eigen::Index>(l)] = amps[base | offset[l]];
            out.noalias() = u * in;
            for (std::size_t l = 0; l < dim; ++l) amps[base | offset[l]] = out[static_cast<Eigen::Index>(l)];
        }
    }

    // Fredkin gate: swaps a and b on the control=|1> subspace.
    void apply_cswap(QubitHandle control, QubitHandle a, QubitHandle b) {
        const std::array<QubitHandle, 3> t{control, a, b};
        require_distinct(t);
        for (const auto& q : t) group_id(q);
        StateGroup& g = groups_.at(merge(t));
        const auto mc = g.mask(g.position(control));
        const auto ma = g.mask(g.position(a));
        const auto mb = g.mask(g.position(b));
        auto& amps = g.amplitudes;
        for (std::uint64_t idx = 0; idx < amps.size(); ++idx)
            if ((idx & mc) && (idx & ma) && !(idx & mb)) std::swap(amps[idx], amps[idx ^ ma ^ mb]);
    }

    // ---- measurements ------------------------------------------------------

    // Samples a computational-basis outcome; q ends up alone in its own group.
    int measure_computational(QubitHandle q) {
        const auto gid = group_id(q);
        StateGroup& g = groups_.at(gid);
        const std::size_t p = g.position(q);
        const auto m = g.mask(p);
        double p1 = 0.0, total = 0.0;
        for (std::uint64_t idx = 0; idx < g.amplitudes.size(); ++idx) {
            const double w = std::norm(g.amplitudes[idx]);
            total += w;
            if (idx & m) p1 += w;
        }
        const int bit = uniform() < p1 / total ? 1 : 0;
        const double keep = bit ? p1 : total - p1;

        if (g.size() == 1) {
            g.amplitudes = bit ? std::vector<Amplitude>{0.0, 1.0} : std::vector<Amplitude>{1.0, 0.0};
            return bit;
        }
        const double scale = 1.0 / std::sqrt(keep);
        std::vector<Amplitude> rest(g.amplitudes.size() / 2);
        for (std::uint64_t idx = 0; idx < g.amplitudes.size(); ++idx)
            if (((idx & m) != 0) == (bit == 1)) rest[detail::remove_bit(idx, m)] = g.amplitudes[idx] * scale;
        g.amplitudes = std::move(rest);
        g.qubits.erase(g.qubits.begin() + static_cast<std::ptrdiff_t>(p));
        add_group(StateGroup{{q}, bit ? std::vector<Amplitude>{0.0, 1.0} : std::vector<Amplitude>{1.0, 0.0}});
        return bit;
    }

    // Measurement in {|+>, |->}; the qubit is left in the observed state.
    PlusMinus measure_hadamard(QubitHandle q) {
        const Gate h = gates::hadamard();
        apply_gate(h, q);
        const int bit = measure_computational(q);
        apply_gate(h, q);
        return bit ? PlusMinus::Minus : PlusMinus::Plus;
    }

    // Projects (q1, q2) onto the Bell basis; both qubits are consumed.
    BellOutcome measure_bell(QubitHandle q1, QubitHandle q2) {
        const std::array<QubitHandle, 2> t{q1, q2};
        require_distinct(t);
        group_id(q1);
        group_id(q2);
        const auto gid = merge(t);
        StateGroup& g = groups_.at(gid);
        const std::size_t p1 = g.position(q1), p2 = g.position(q2);
        const std::array<std::uint64_t, 2> masks{g.mask(p1), g.mask(p2)};
        const std::array<std::uint64_t, 4> offset{0, masks[1], masks[0], masks[0] | masks[1]};
        const std::size_t rest_dim = g.amplitudes.size() / 4;
        const auto removal = detail::sorted_desc(masks);

        std::array<std::vector<Amplitude>, 4> residual;
        std::array<double, 4> prob{};
        for (int k = 0; k < 4; ++k) {
            const auto bv = bell_vector(static_cast<BellOutcome>(k));
            auto& r = residual[k];
            r.assign(rest_dim, 0.0);
            for (std::uint64_t base = 0; base < g.amplitudes.size(); ++base) {
                if (base & (masks[0] | masks[1])) continue;
                Amplitude s = 0.0;
                for (int l = 0; l < 4; ++l)
                    if (bv[l] != 0.0) s += std::conj(bv[l]) * g.amplitudes[base | offset[l]];
                r[detail::remove_bits(base, removal)] = s;
            }
            for (const auto& a : r) prob[k] += std::norm(a);
        }
        const double total = prob[0] + prob[1] + prob[2] + prob[3];
        const double u = uniform() * total;
        int chosen = 3;
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) {
            acc += prob[k];
            if (u < acc) {
                chosen = k;
                break;
            }
        }
        while (prob[chosen] == 0.0) --chosen;  // u landed on a zero-width tail

        location_.erase(q1.id);
        location_.erase(q2.id);
        owners_.erase(q1.id);
        owners_.erase(q2.id);
        if (g.size() == 2) {
            groups_.erase(gid);
        } else {
            const double scale = 1.0 / std::sqrt(prob[chosen]);
            for (auto& a : residual[chosen]) a *= scale;
            g.amplitudes = std::move(residual[chosen]);
            std::erase_if(g.qubits, [&](QubitHandle h) { return h == q1 || h == q2; });
        }
        return static_cast<BellOutcome>(chosen);
    }

    // ---- density-matrix introspection -------------------------------------

    // Partial trace onto `subset` (MSB-first in subset order). Never mutates.
    DensityMatrix reduced_density(std::span<const QubitHandle> subset) const {
        require_distinct(subset);
        if (subset.empty()) throw InvalidArgument("empty subset");
        if (subset.size() > 14) throw CapacityError("reduced density limited to 14 qubits");

        // subset positions grouped by their enclosing StateGroup
        std::map<std::uint64_t, std::vector<std::size_t>> by_group;
        for (std::size_t j = 0; j < subset.size(); ++j) by_group[group_id(subset[j])].push_back(j);

        const std::size_t m = subset.size();
        const auto dim = static_cast<Eigen::Index>(std::size_t{1} << m);
        if (by_group.size() == 1) return partial_trace(groups_.at(by_group.begin()->first), subset);
        std::vector<DensityMatrix> parts;
        std::vector<std::vector<std::size_t>> part_bits;
        for (const auto& [gid, js] : by_group) {
            Register local;
            for (auto j : js) local.push_back(subset[j]);
            parts.push_back(partial_trace(groups_.at(gid), local));
            part_bits.push_back(js);
        }
        auto local_index = [&](std::size_t part, std::uint64_t i) {
            std::uint64_t loc = 0;
            for (auto j : part_bits[part]) loc = (loc << 1) | ((i >> (m - 1 - j)) & 1);
            return static_cast<Eigen::Index>(loc);
        };
        DensityMatrix rho(dim, dim);
        for (Eigen::Index i = 0; i < dim; ++i)
            for (Eigen::Index k = 0; k < dim; ++k) {
                Amplitude v = 1.0;
                for (std::size_t part = 0; part < parts.size() && v != 0.0; ++part)
                    v *= parts[part](local_index(part, static_cast<std::uint64_t>(i)),
                                     local_index(part, static_cast<std::uint64_t>(k)));
                rho(i, k) = v;
            }
        return rho;
    }

    // |<A|B>| for two registers that are each pure on their own.
    double overlap(std::span<const QubitHandle> a, std::span<const QubitHandle> b) const {
        if (a.size() != b.size() || a.empty()) throw InvalidArgument("registers must have equal nonzero length");
        std::vector<QubitHandle> both(a.begin(), a.end());
        both.insert(both.end(), b.begin(), b.end());
        require_distinct(both);
        const DensityMatrix ra = reduced_density(a);
        const DensityMatrix rb = reduced_density(b);
        require_pure(ra, "first");
        require_pure(rb, "second");
        const double t = (ra * rb).trace().real();
        return std::sqrt(std::clamp(t, 0.0, 1.0));
    }

    // <psi| rho_reg |psi>; psi is MSB-first over reg.
    double fidelity(std::span<const QubitHandle> reg, const StateVector& psi) const {
        const DensityMatrix rho = reduced_density(reg);
        if (psi.size() != rho.rows()) throw InvalidArgument("state dimension mismatch");
        return (psi.adjoint() * rho * psi)(0, 0).real();
    }

    // ---- invariants & persistence -----------------------------------------

    // Throws Error if a group is unnormalized or the handle partition is broken.
    void check_invariants(double tol = 1e-9) const {
        std::map<std::uint64_t, int> seen;
        for (const auto& [gid, g] : groups_) {
            if (g.qubits.empty() || g.size() > ceiling_) throw Error("group size out of range");
            if (g.amplitudes.size() != (std::size_t{1} << g.size())) throw Error("amplitude count mismatch");
            if (std::abs(g.norm() - 1.0) > tol) throw Error("group norm drifted from 1");
            for (const auto& q : g.qubits) {
                if (++seen[q.id] > 1) throw Error("qubit in two groups");
                auto it = location_.find(q.id);
                if (it == location_.end() || it->second != gid) throw Error("location index out of sync");
                if (!owners_.contains(q.id)) throw Error("qubit without owner");
            }
        }
        if (seen.size() != location_.size() || owners_.size() != location_.size())
            throw Error("orphan qubit handle");
    }

    WorldState state() const {
        WorldState s;
        s.ceiling = ceiling_;
        s.next_qubit = next_qubit_;
        std::ostringstream os;
        os << rng_;
        s.rng_state = os.str();
        for (const auto& [gid, g] : groups_) s.groups.push_back(g);
        s.owners = owners_;
        return s;
    }

    static World from_state(const WorldState& s) {
        World w(0, s.ceiling);
        std::istringstream is(s.rng_state);
        is >> w.rng_;
        if (!is) throw InvalidArgument("malformed rng state");
        w.next_qubit_ = s.next_qubit;
        for (const auto& g : s.groups) {
            for (const auto& q : g.qubits) {
                if (q.id == 0 || q.id >= s.next_qubit) throw InvalidArgument("qubit id out of range");
                if (w.location_.contains(q.id)) throw InvalidArgument("qubit listed twice");
                auto it = s.owners.find(q.id);
                if (it == s.owners.end()) throw InvalidArgument("qubit without owner");
                w.owners_[q.id] = it->second;
            }
            w.add_group(g);
        }
        if (w.owners_.size() != s.owners.size()) throw InvalidArgument("owner entry for unknown qubit");
        w.check_invariants();
        return w;
    }

private:
    static std::string unknown(QubitHandle q) { return "unknown qubit handle " + std::to_string(q.id); }

    std::uint64_t group_id(QubitHandle q) const {
        auto it = location_.find(q.id);
        if (it == location_.end()) throw UnknownHandle(unknown(q));
        return it->second;
    }

    static void require_distinct(std::span<const QubitHandle> qs) {
        for (std::size_t i = 0; i < qs.size(); ++i)
            for (std::size_t j = i + 1; j < qs.size(); ++j)
                if (qs[i] == qs[j]) throw InvalidArgument("duplicate qubit handle " + std::to_string(qs[i].id));
    }

    static void require_pure(const DensityMatrix& rho, const char* which) {
        const double purity = (rho * rho).trace().real();
        if (purity < 1.0 - 1e-9)
            throw EntangledRegister(std::string(which) + " register is entangled with qubits outside it");
    }

    void add_group(StateGroup g) {
        const auto gid = next_group_++;
        for (const auto& q : g.qubits) location_[q.id] = gid;
        groups_.emplace(gid, std::move(g));
    }

    // Tensors together every group touched by `qs`; returns the surviving id.
    std::uint64_t merge(std::span<const QubitHandle> qs) {
        std::vector<std::uint64_t> ids;
        for (const auto& q : qs) {
            const auto gid = group_id(q);
            if (std::find(ids.begin(), ids.end(), gid) == ids.end()) ids.push_back(gid);
        }
        std::size_t total = 0;
        for (auto gid : ids) total += groups_.at(gid).size();
        if (total > ceiling_)
            throw CapacityError("merge would create a " + std::to_string(total) + "-qubit group (ceiling " +
                                std::to_string(ceiling_) + ")");
        StateGroup& head = groups_.at(ids[0]);
        for (std::size_t k = 1; k < ids.size(); ++k) {
            StateGroup& tail = groups_.at(ids[k]);
            const std::size_t nb = tail.size();
            std::vector<Amplitude> amps(head.amplitudes.size() * tail.amplitudes.size());
            for (std::size_t ia = 0; ia < head.amplitudes.size(); ++ia)
                for (std::size_t ib = 0; ib < tail.amplitudes.size(); ++ib)
                    amps[(ia << nb) | ib] = head.amplitudes[ia] * tail.amplitudes[ib];
            head.amplitudes = std::move(amps);
            for (const auto& q : tail.qubits) {
                head.qubits.push_back(q);
                location_[q.id] = ids[0];
            }
            groups_.erase(ids[k]);
        }
        return ids[0];
    }

    static void apply_1q(StateGroup& g, std::uint64_t m, const Gate& u) {
        const Amplitude u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
        auto& amps = g.amplitudes;
        for (std::uint64_t idx = 0; idx < amps.size(); ++idx) {
            if (idx & m) continue;
            const Amplitude a0 = amps[idx], a1 = amps[idx | m];
            amps[idx] = u00 * a0 + u01 * a1;
            amps[idx | m] = u10 * a0 + u11 * a1;
        }
    }

    static DensityMatrix partial_trace(const StateGroup& g, std::span<const QubitHandle> keep) {
        const std::size_t k = keep.size();
        std::vector<std::uint64_t> masks(k);
        for (std::size_t t = 0; t < k; ++t) masks[t] = g.mask(g.position(keep[t]));
        const auto kept_dim = static_cast<Eigen::Index>(std::size_t{1} << k);
        const auto rest_dim = static_cast<Eigen::Index>(g.amplitudes.size() >> k);
        const auto removal = detail::sorted_desc(masks);
        Eigen::MatrixXcd m(rest_dim, kept_dim);
        for (std::uint64_t idx = 0; idx < g.amplitudes.size(); ++idx) {
            std::uint64_t kept = 0;
            for (std::size_t t = 0; t < k; ++t) kept = (kept << 1) | ((idx & masks[t]) ? 1 : 0);
            m(static_cast<Eigen::Index>(detail::remove_bits(idx, removal)), static_cast<Eigen::Index>(kept)) =
                g.amplitudes[idx];
        }
        return m.transpose() * m.conjugate();
    }

    std::map<std::uint64_t, StateGroup> groups_;
    std::map<std::uint64_t, std::uint64_t> location_;  // qubit id -> group id
    std::map<std::uint64_t, Owner> owners_;
    std::uint64_t next_qubit_ = 1;
    std::uint64_t next_group_ = 1;
    std::size_t ceiling_;
    std::mt19937_64 rng_;
};

// Pure single-qubit state cos(theta)|0> + e^{i phi} sin(theta)|1>.
inline StateVector bloch_state(double theta, double phi) {
    StateVector v(2);
    v << std::cos(theta), std::polar(std::sin(theta), phi);
    return v;
}

}  // namespace qcheque
