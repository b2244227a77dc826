// snapshot.hpp
// Textual snapshots of a World, the Bank database and outstanding cheques.
//
// {"format": "qcheque.snapshot", "version": 1,
//  "params": {"l", "n", "key_bits", "serial_bits", "signature", "signature_bits",
//             "policy", "kappa1", "kappa2", "allow_weak_keys"},
//  "world": {"ceiling", "next_qubit", "rng",
//            "groups": [{"qubits": [{"id", "owner"}], "amplitudes": [[re, im]]}]},
//  "bank": [{"id", "serial", "key", "pk", "b", "spent", "quarantined"}],
//  "cheques": [{"id", "serial", "nonce", "signature", "amount", "a2", "psi_alice"}]}
//
// Bit strings are {"bits", "hex"}; keys and signatures are hex of their
// binary serialization. Doubles are printed in shortest round-trip form, so
// save(load(save(x))) == save(x) byte for byte.

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcheque/errors.hpp"
#include "qcheque/protocol.hpp"
#include "qcheque/qsim.hpp"

namespace qcheque {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kSnapshotFormat = "qcheque.snapshot";
inline constexpr int kSnapshotVersion = 1;

struct Snapshot {
    SchemeParams params;
    WorldState world;
    std::vector<BankRecord> bank;
    std::vector<QuantumCheque> cheques;
};

namespace detail {

inline Json bits_to_json(const BitString& b) { return Json{{"bits", b.size()}, {"hex", b.to_hex()}}; }

inline BitString bits_from_json(const Json& j) {
    return BitString::from_hex(j.at("hex").get<std::string>(), j.at("bits").get<std::size_t>());
}

inline Json register_to_json(const Register& r) {
    Json a = Json::array();
    for (const auto& q : r) a.push_back(q.id);
    return a;
}

inline Register register_from_json(const Json& j) {
    Register r;
    for (const auto& v : j) r.push_back({v.get<std::uint64_t>()});
    return r;
}

inline Bytes hex_field(const Json& j) { return from_hex(j.get<std::string>()); }

}  // namespace detail

inline Json params_to_json(const SchemeParams& p) {
    return Json{{"l", p.l},
                {"n", p.n},
                {"key_bits", p.key_bits},
                {"serial_bits", p.serial_bits},
                {"signature", p.signature->id()},
                {"signature_bits", p.signature_bits},
                {"policy", to_string(p.policy.mode)},
                {"kappa1", p.policy.kappa1},
                {"kappa2", p.policy.kappa2},
                {"allow_weak_keys", p.allow_weak_keys}};
}

inline SchemeParams params_from_json(const Json& j) {
    SchemeParams p;
    p.l = j.at("l").get<std::size_t>();
    p.n = j.at("n").get<std::size_t>();
    p.key_bits = j.at("key_bits").get<std::size_t>();
    p.serial_bits = j.at("serial_bits").get<std::size_t>();
    if (j.at("signature").get<std::string>() != p.signature->id())
        throw InvalidArgument("unsupported signature scheme " + j["signature"].dump());
    p.signature_bits = j.at("signature_bits").get<std::uint32_t>();
    p.policy.mode = policy_mode_from_string(j.at("policy").get<std::string>());
    p.policy.kappa1 = j.at("kappa1").get<double>();
    p.policy.kappa2 = j.at("kappa2").get<double>();
    p.allow_weak_keys = j.at("allow_weak_keys").get<bool>();
    p.validate();
    return p;
}

inline Json world_to_json(const WorldState& s) {
    Json groups = Json::array();
    for (const auto& g : s.groups) {
        Json qubits = Json::array();
        for (const auto& q : g.qubits) qubits.push_back({{"id", q.id}, {"owner", to_string(s.owners.at(q.id))}});
        Json amps = Json::array();
        for (const auto& a : g.amplitudes) amps.push_back(Json::array({a.real(), a.imag()}));
        groups.push_back({{"qubits", std::move(qubits)}, {"amplitudes", std::move(amps)}});
    }
    return Json{{"ceiling", s.ceiling}, {"next_qubit", s.next_qubit}, {"rng", s.rng_state}, {"groups", std::move(groups)}};
}

inline WorldState world_from_json(const Json& j) {
    WorldState s;
    s.ceiling = j.at("ceiling").get<std::size_t>();
    s.next_qubit = j.at("next_qubit").get<std::uint64_t>();
    s.rng_state = j.at("rng").get<std::string>();
    for (const auto& gj : j.at("groups")) {
        StateGroup g;
        for (const auto& qj : gj.at("qubits")) {
            const QubitHandle q{qj.at("id").get<std::uint64_t>()};
            g.qubits.push_back(q);
            s.owners[q.id] = owner_from_string(qj.at("owner").get<std::string>());
        }
        for (const auto& aj : gj.at("amplitudes")) {
            if (aj.size() != 2) throw InvalidArgument("amplitude must be a [re, im] pair");
            g.amplitudes.emplace_back(aj.at(0).get<double>(), aj.at(1).get<double>());
        }
        s.groups.push_back(std::move(g));
    }
    return s;
}

inline Json bank_record_to_json(const BankRecord& r) {
    return Json{{"id", r.id},
                {"serial", detail::bits_to_json(r.serial)},
                {"key", detail::bits_to_json(r.key)},
                {"pk", to_hex(serialize(r.pk))},
                {"b", detail::register_to_json(r.b)},
                {"spent", r.spent},
                {"quarantined", r.quarantined}};
}

inline BankRecord bank_record_from_json(const Json& j) {
    BankRecord r;
    r.id = j.at("id").get<std::string>();
    r.serial = detail::bits_from_json(j.at("serial"));
    r.key = detail::bits_from_json(j.at("key"));
    r.pk = parse_public_key(detail::hex_field(j.at("pk")));
    r.b = detail::register_from_json(j.at("b"));
    r.spent = j.at("spent").get<bool>();
    r.quarantined = j.at("quarantined").get<bool>();
    return r;
}

inline Json cheque_to_json(const QuantumCheque& c) {
    return Json{{"id", c.id},
                {"serial", detail::bits_to_json(c.serial)},
                {"nonce", detail::bits_to_json(c.nonce)},
                {"signature", to_hex(serialize(c.signature))},
                {"amount", c.amount},
                {"a2", detail::register_to_json(c.a2)},
                {"psi_alice", detail::register_to_json(c.psi_alice)}};
}

inline QuantumCheque cheque_from_json(const Json& j) {
    QuantumCheque c;
    c.id = j.at("id").get<std::string>();
    c.serial = detail::bits_from_json(j.at("serial"));
    c.nonce = detail::bits_from_json(j.at("nonce"));
    c.signature = parse_signature(detail::hex_field(j.at("signature")));
    c.amount = j.at("amount").get<std::uint64_t>();
    c.a2 = detail::register_from_json(j.at("a2"));
    c.psi_alice = detail::register_from_json(j.at("psi_alice"));
    return c;
}

inline Json snapshot_to_json(const Snapshot& s) {
    Json bank = Json::array();
    for (const auto& r : s.bank) bank.push_back(bank_record_to_json(r));
    Json cheques = Json::array();
    for (const auto& c : s.cheques) cheques.push_back(cheque_to_json(c));
    return Json{{"format", kSnapshotFormat},
                {"version", kSnapshotVersion},
                {"params", params_to_json(s.params)},
                {"world", world_to_json(s.world)},
                {"bank", std::move(bank)},
                {"cheques", std::move(cheques)}};
}

inline std::string dump_snapshot(const Snapshot& s) { return snapshot_to_json(s).dump(2) + "\n"; }

inline Snapshot snapshot_from_json(const Json& j) {
    if (!j.is_object()) throw SnapshotError("top level must be an object", std::nullopt, "/");
    if (!j.contains("format") || j["format"] != kSnapshotFormat)
        throw SnapshotError("not a qcheque snapshot", std::nullopt, "/format");
    if (!j.contains("version") || j["version"] != kSnapshotVersion)
        throw SnapshotError("unsupported snapshot version " + (j.contains("version") ? j["version"].dump() : "(missing)") +
                                ", expected " + std::to_string(kSnapshotVersion),
                            std::nullopt, "/version");

    Snapshot s;
    std::string where = "/params";
    try {
        s.params = params_from_json(j.at("params"));
        where = "/world";
        s.world = world_from_json(j.at("world"));
        where = "/bank";
        for (const auto& r : j.at("bank")) s.bank.push_back(bank_record_from_json(r));
        where = "/cheques";
        for (const auto& c : j.at("cheques")) s.cheques.push_back(cheque_from_json(c));
        where = "/world";
        World::from_state(s.world);  // validates the partition and norms
    } catch (const nlohmann::json::exception& e) {
        throw SnapshotError(e.what(), std::nullopt, where);
    } catch (const SnapshotError&) {
        throw;
    } catch (const Error& e) {
        throw SnapshotError(e.what(), std::nullopt, where);
    }
    return s;
}

inline Snapshot parse_snapshot(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SnapshotError(e.what(), e.byte);
    }
    return snapshot_from_json(j);
}

inline Snapshot capture(const SchemeParams& params, const World& world, const Bank& bank,
                        std::vector<QuantumCheque> cheques = {}) {
    Snapshot s{params, world.state(), {}, std::move(cheques)};
    for (const auto& [key, rec] : bank.records()) s.bank.push_back(rec);
    return s;
}

inline Bank restore_bank(const Snapshot& s) {
    Bank bank;
    for (const auto& r : s.bank) bank.add(r);
    return bank;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void write_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::ios_base::failure("cannot write " + path);
    out << text;
    if (!out.flush()) throw std::ios_base::failure("write failed for " + path);
}

}  // namespace qcheque
