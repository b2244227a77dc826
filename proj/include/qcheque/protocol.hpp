// protocol.hpp
// Gen, Sign and Verify for quantum cheques, plus the Bank's private database.
//
// Gen:    the Bank prepares l GHZ triples; Alice keeps (A1, A2) of each, the
//         Bank keeps B. Alice and the Bank share a key k; Alice registers a
//         one-time signature key for the cheque's serial s.
// Sign:   Alice draws a nonce r, prepares psi_alice = f(k||id||r||M) and,
//         for each i, g(r||M||i) which she Bell-encodes into triple i. She
//         signs s and hands over chi = (id, s, r, sigma, M, {A2_i}, psi_alice).
// Verify: the branch checks (id, s), the spent ledger and sigma, then the
//         main branch Hadamard-measures each B_i and reports the outcome so
//         the branch can recover g-states from A2_i. The recovered states and
//         psi_alice are swap-tested against freshly computed copies.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qcheque/bitstring.hpp"
#include "qcheque/comparator.hpp"
#include "qcheque/qowf.hpp"
#include "qcheque/qsim.hpp"
#include "qcheque/teleport.hpp"
#include "qcheque/uss.hpp"

namespace qcheque {

struct SchemeParams {
    std::size_t l = 8;              // GHZ triples (amount qubits) per cheque
    std::size_t n = 8;              // qubits in psi_alice
    std::size_t key_bits = 256;     // L: shared key and nonce length
    std::size_t serial_bits = 128;  // serial number length
    std::uint32_t signature_bits = 128;
    AcceptancePolicy policy;
    // Lets key-guessing experiments use keys shorter than 64 bits.
    bool allow_weak_keys = false;
    std::shared_ptr<const SignatureScheme> signature = default_signature_scheme();

    void validate() const {
        if (l < 1) throw InvalidArgument("l must be at least 1");
        if (n < 1) throw InvalidArgument("n must be at least 1");
        if (key_bits < 1 || (key_bits < 64 && !allow_weak_keys)) throw InvalidArgument("key length must be at least 64 bits");
        if (serial_bits < 64) throw InvalidArgument("serial length must be at least 64 bits");
        if (!signature) throw InvalidArgument("no signature scheme configured");
        policy.validate();
    }
};

struct ChequeBook {
    std::string id;
    PublicKey pk;
    SecretKey sk;
    BitString key;
    BitString serial;
    std::vector<GhzTriple> triples;
    bool used = false;
    std::vector<EncodingRecord> encodings;  // filled in by sign_cheque
};

struct BankRecord {
    std::string id;
    PublicKey pk;
    BitString key;
    BitString serial;
    Register b;
    bool spent = false;        // monotone
    bool quarantined = false;  // a rejected cheque burns its serial
};

struct QuantumCheque {
    std::string id;
    BitString serial;
    BitString nonce;
    Signature signature;
    std::uint64_t amount = 0;
    Register a2;
    Register psi_alice;

    Register qubits() const {
        Register all = a2;
        all.insert(all.end(), psi_alice.begin(), psi_alice.end());
        return all;
    }
};

enum class VerifyReason { Ok, UnknownIdSerial, BadSignature, DoubleSpend, Malformed, PsiAliceFail, GStateFail };

inline std::string_view to_string(VerifyReason r) {
    switch (r) {
        case VerifyReason::Ok: return "Ok";
        case VerifyReason::UnknownIdSerial: return "UnknownIdSerial";
        case VerifyReason::BadSignature: return "BadSignature";
        case VerifyReason::DoubleSpend: return "DoubleSpend";
        case VerifyReason::Malformed: return "Malformed";
        case VerifyReason::PsiAliceFail: return "PsiAliceFail";
        case VerifyReason::GStateFail: return "GStateFail";
    }
    return "?";
}

struct VerifyResult {
    bool accepted = false;
    VerifyReason reason = VerifyReason::Malformed;
    std::vector<std::size_t> failed_g;  // 1-based indices of failed amount tests
    bool psi_alice_passed = false;
    bool quantum_checks_run = false;
};

class Bank {
public:
    static std::string key_of(const BitString& serial) { return std::to_string(serial.size()) + ":" + serial.to_hex(); }

    bool has_serial(const BitString& serial) const { return records_.contains(key_of(serial)); }

    void add(BankRecord rec) {
        auto k = key_of(rec.serial);
        if (records_.contains(k)) throw ProtocolError("duplicate serial");
        records_.emplace(std::move(k), std::move(rec));
    }

    const BankRecord* find(std::string_view id, const BitString& serial) const {
        auto it = records_.find(key_of(serial));
        if (it == records_.end() || it->second.id != id) return nullptr;
        return &it->second;
    }

    BankRecord* find(std::string_view id, const BitString& serial) {
        return const_cast<BankRecord*>(std::as_const(*this).find(id, serial));
    }

    bool spent(const BitString& serial) const {
        auto it = records_.find(key_of(serial));
        return it != records_.end() && it->second.spent;
    }

    bool quarantined(const BitString& serial) const {
        auto it = records_.find(key_of(serial));
        return it != records_.end() && it->second.quarantined;
    }

    void mark_spent(const BitString& serial) { records_.at(key_of(serial)).spent = true; }
    void quarantine(const BitString& serial) { records_.at(key_of(serial)).quarantined = true; }

    const std::map<std::string, BankRecord>& records() const { return records_; }

private:
    std::map<std::string, BankRecord> records_;
};

inline bool spent_ledger_check(const Bank& bank, const BitString& serial) { return bank.spent(serial); }

// ---- classical channel -----------------------------------------------------

enum class Party { Alice, Payee, Branch, MainBranch };

inline std::string_view to_string(Party p) {
    switch (p) {
        case Party::Alice: return "Alice";
        case Party::Payee: return "Payee";
        case Party::Branch: return "Branch";
        case Party::MainBranch: return "MainBranch";
    }
    return "?";
}

struct TranscriptEntry {
    Party sender;
    Party receiver;
    std::string type;
    std::string payload;
};

// Ordered log of classical messages exchanged during a session.
class Transcript {
public:
    void post(Party from, Party to, std::string type, std::string payload) {
        entries_.push_back({from, to, std::move(type), std::move(payload)});
    }

    const std::vector<TranscriptEntry>& entries() const { return entries_; }

    std::size_t count(std::string_view type) const {
        std::size_t c = 0;
        for (const auto& e : entries_) c += e.type == type ? 1 : 0;
        return c;
    }

private:
    std::vector<TranscriptEntry> entries_;
};

// ---- Gen / Sign / Verify ---------------------------------------------------

inline std::pair<ChequeBook, BankRecord> gen_account(World& world, Bank& bank, std::string id,
                                                     const SchemeParams& params) {
    params.validate();
    encode_id(id);
    auto& rng = world.rng();

    ChequeBook book;
    book.id = id;
    book.key = BitString::random(rng, params.key_bits);
    auto kp = params.signature->generate(rng, params.signature_bits);
    book.pk = std::move(kp.pk);
    book.sk = std::move(kp.sk);
    do {
        book.serial = BitString::random(rng, params.serial_bits);
    } while (bank.has_serial(book.serial));

    BankRecord rec{id, book.pk, book.key, book.serial, {}, false, false};
    for (std::size_t i = 1; i <= params.l; ++i) {
        book.triples.push_back(prepare_ghz(world, i));
        rec.b.push_back(book.triples.back().b);
    }
    bank.add(rec);
    return {std::move(book), std::move(rec)};
}

inline QuantumCheque sign_cheque(World& world, ChequeBook& book, std::uint64_t amount, const SchemeParams& params) {
    if (book.used) throw ProtocolError("cheque book already used");
    for (const auto& t : book.triples)
        if (t.consumed) throw ProtocolError("cheque book has consumed GHZ triples");
    auto& rng = world.rng();

    QuantumCheque chi;
    chi.id = book.id;
    chi.serial = book.serial;
    chi.amount = amount;
    chi.nonce = BitString::random(rng, params.key_bits);
    const BitString m = encode_amount(amount);
    const BitString id = encode_id(book.id);

    chi.psi_alice = eval_f(world, book.key, id, chi.nonce, m, params.n, Owner::Alice);
    const std::size_t l = book.triples.size();
    for (auto& triple : book.triples) {
        const QubitHandle g = eval_g(world, chi.nonce, m, triple.index, l, Owner::Alice);
        book.encodings.push_back(encode_qubit(world, g, triple));
        chi.a2.push_back(triple.a2);
    }
    chi.signature = params.signature->sign(book.sk, chi.serial);
    book.used = true;
    return chi;
}

// Transfers custody of every qubit of the cheque.
inline void hand_over(World& world, const QuantumCheque& chi, Owner to) {
    for (const auto& q : chi.qubits())
        if (world.contains(q)) world.set_owner(q, to);
}

inline void destroy(World& world, std::span<const QubitHandle> qubits) {
    for (const auto& q : qubits)
        if (world.contains(q)) world.discard(q);
}

inline VerifyResult verify_cheque(World& world, Bank& bank, const QuantumCheque& chi, const SchemeParams& params,
                                  Transcript* transcript = nullptr) {
    Transcript scratch;
    Transcript& tx = transcript ? *transcript : scratch;
    const Register cheque_qubits = chi.qubits();
    VerifyResult result;

    auto finish = [&](VerifyReason reason, BankRecord* rec) {
        destroy(world, cheque_qubits);
        result.reason = reason;
        result.accepted = reason == VerifyReason::Ok;
        if (rec && reason != VerifyReason::DoubleSpend) {
            destroy(world, rec->b);
            if (result.accepted)
                bank.mark_spent(rec->serial);
            else
                bank.quarantine(rec->serial);
        }
        tx.post(Party::Branch, Party::MainBranch, "verdict", std::string(to_string(reason)));
        return result;
    };

    tx.post(Party::Payee, Party::Branch, "cheque-presented", chi.id + " " + Bank::key_of(chi.serial) + " " + std::to_string(chi.amount));
    tx.post(Party::Branch, Party::MainBranch, "lookup", chi.id + " " + Bank::key_of(chi.serial));
    BankRecord* rec = bank.find(chi.id, chi.serial);
    if (!rec) {
        tx.post(Party::MainBranch, Party::Branch, "lookup-result", "unknown");
        return finish(VerifyReason::UnknownIdSerial, nullptr);
    }
    if (rec->spent || rec->quarantined) {
        tx.post(Party::MainBranch, Party::Branch, "lookup-result", "spent");
        return finish(VerifyReason::DoubleSpend, rec);
    }
    tx.post(Party::MainBranch, Party::Branch, "lookup-result", "registered");

    bool structural = chi.a2.size() == rec->b.size() && chi.psi_alice.size() == params.n && !chi.nonce.empty();
    for (std::size_t i = 0; structural && i < cheque_qubits.size(); ++i) {
        structural = world.contains(cheque_qubits[i]) && world.owner(cheque_qubits[i]) != Owner::Bank;
        for (std::size_t j = i + 1; structural && j < cheque_qubits.size(); ++j)
            structural = cheque_qubits[i] != cheque_qubits[j];
    }
    for (const auto& b : rec->b) structural = structural && world.contains(b);
    if (!structural) return finish(VerifyReason::Malformed, rec);

    const auto* scheme = params.signature.get();
    if (!scheme->verify(rec->pk, chi.serial, chi.signature)) return finish(VerifyReason::BadSignature, rec);

    result.quantum_checks_run = true;
    const BitString m = encode_amount(chi.amount);
    const std::size_t l = rec->b.size();
    std::vector<SwapOutcome> g_outcomes;
    Register scratch_qubits;
    for (std::size_t i = 1; i <= l; ++i) {
        const auto rr = recover_qubit(world, rec->b[i - 1], chi.a2[i - 1]);
        tx.post(Party::MainBranch, Party::Branch, "hadamard-outcome", std::to_string(i) + ":" + std::string(to_string(rr.outcome)));
        const QubitHandle ideal = eval_g(world, chi.nonce, m, i, l, Owner::Bank);
        scratch_qubits.push_back(ideal);
        g_outcomes.push_back(swap_test(world, rr.qubit, ideal));
        if (!g_outcomes.back().passed) result.failed_g.push_back(i);
    }
    rec->b.clear();  // consumed by the Hadamard measurements

    const Register ideal_alice = eval_f(world, rec->key, encode_id(chi.id), chi.nonce, m, params.n, Owner::Bank);
    scratch_qubits.insert(scratch_qubits.end(), ideal_alice.begin(), ideal_alice.end());
    result.psi_alice_passed = swap_test(world, chi.psi_alice, ideal_alice).passed;
    destroy(world, scratch_qubits);

    const bool g_ok = params.policy.accepts(l - result.failed_g.size(), l, params.policy.kappa2);
    VerifyReason reason = VerifyReason::Ok;
    if (!g_ok)
        reason = VerifyReason::GStateFail;
    else if (!result.psi_alice_passed)
        reason = VerifyReason::PsiAliceFail;
    return finish(reason, rec);
}

}  // namespace qcheque
