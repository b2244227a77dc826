#include <gtest/gtest.h>

#include "qcheque/protocol.hpp"

using namespace qcheque;

namespace {

SchemeParams small_params() {
    SchemeParams p;
    p.l = 3;
    p.n = 3;
    p.key_bits = 64;
    p.serial_bits = 64;
    return p;
}

struct Session {
    World world;
    Bank bank;
    SchemeParams params;
    ChequeBook book;
    QuantumCheque chi;

    explicit Session(std::uint64_t seed, SchemeParams p = small_params(), std::uint64_t amount = 250)
        : world(seed), params(std::move(p)) {
        book = gen_account(world, bank, "alice", params).first;
        chi = sign_cheque(world, book, amount, params);
        hand_over(world, chi, Owner::Payee);
    }
};

}  // namespace

TEST(Gen, RegistersAccount) {
    World w(1);
    Bank bank;
    const auto [book, rec] = gen_account(w, bank, "alice", small_params());
    EXPECT_EQ(book.triples.size(), 3u);
    EXPECT_EQ(rec.b.size(), 3u);
    EXPECT_EQ(book.key.size(), 64u);
    EXPECT_EQ(book.serial.size(), 64u);
    EXPECT_TRUE(bank.has_serial(book.serial));
    EXPECT_EQ(w.owner(rec.b[0]), Owner::Bank);
    EXPECT_NE(bank.find("alice", book.serial), nullptr);
    EXPECT_EQ(bank.find("bob", book.serial), nullptr);
}

TEST(Gen, RejectsBadParams) {
    World w(1);
    Bank bank;
    SchemeParams p = small_params();
    p.l = 0;
    EXPECT_THROW(gen_account(w, bank, "alice", p), InvalidArgument);
    p = small_params();
    p.key_bits = 16;
    EXPECT_THROW(gen_account(w, bank, "alice", p), InvalidArgument);
    p.allow_weak_keys = true;
    EXPECT_NO_THROW(gen_account(w, bank, "alice", p));
    EXPECT_THROW(gen_account(w, bank, "", small_params()), InvalidArgument);
}

TEST(Sign, ChequeShape) {
    Session s(2);
    EXPECT_EQ(s.chi.a2.size(), 3u);
    EXPECT_EQ(s.chi.psi_alice.size(), 3u);
    EXPECT_EQ(s.chi.nonce.size(), 64u);
    EXPECT_EQ(s.book.encodings.size(), 3u);
    for (const auto& t : s.book.triples) EXPECT_FALSE(s.world.contains(t.a1));
    EXPECT_EQ(s.world.owner(s.chi.a2[0]), Owner::Payee);
}

TEST(Sign, BookIsSingleUse) {
    Session s(3);
    EXPECT_THROW(sign_cheque(s.world, s.book, 1, s.params), ProtocolError);
}

TEST(Verify, HonestChequeAccepted) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Session s(seed);
        Transcript tx;
        const auto r = verify_cheque(s.world, s.bank, s.chi, s.params, &tx);
        EXPECT_TRUE(r.accepted) << to_string(r.reason);
        EXPECT_EQ(r.reason, VerifyReason::Ok);
        EXPECT_TRUE(r.psi_alice_passed);
        EXPECT_EQ(tx.count("hadamard-outcome"), s.params.l);
        EXPECT_EQ(tx.count("verdict"), 1u);
        for (const auto& q : s.chi.qubits()) EXPECT_FALSE(s.world.contains(q));
        for (const auto& t : s.book.triples) EXPECT_FALSE(s.world.contains(t.b));
        EXPECT_TRUE(spent_ledger_check(s.bank, s.chi.serial));
        s.world.check_invariants();
    }
}

TEST(Verify, TranscriptOrder) {
    Session s(4);
    Transcript tx;
    verify_cheque(s.world, s.bank, s.chi, s.params, &tx);
    const auto& e = tx.entries();
    ASSERT_GE(e.size(), 4u);
    EXPECT_EQ(e.front().type, "cheque-presented");
    EXPECT_EQ(e[1].type, "lookup");
    EXPECT_EQ(e[2].type, "lookup-result");
    EXPECT_EQ(e.back().type, "verdict");
    EXPECT_EQ(e.back().payload, "Ok");
    EXPECT_EQ(e[3].sender, Party::MainBranch);
}

TEST(Verify, SecondDepositIsDoubleSpend) {
    Session s(5);
    EXPECT_TRUE(verify_cheque(s.world, s.bank, s.chi, s.params).accepted);
    const auto again = verify_cheque(s.world, s.bank, s.chi, s.params);
    EXPECT_FALSE(again.accepted);
    EXPECT_EQ(again.reason, VerifyReason::DoubleSpend);
    EXPECT_TRUE(s.bank.spent(s.chi.serial));
}

TEST(Verify, UnknownSerial) {
    Session s(6);
    QuantumCheque forged = s.chi;
    forged.serial.flip(0);
    const auto r = verify_cheque(s.world, s.bank, forged, s.params);
    EXPECT_EQ(r.reason, VerifyReason::UnknownIdSerial);
    for (const auto& q : s.chi.qubits()) EXPECT_FALSE(s.world.contains(q));
}

TEST(Verify, WrongIdForSerial) {
    Session s(7);
    QuantumCheque forged = s.chi;
    forged.id = "mallory";
    EXPECT_EQ(verify_cheque(s.world, s.bank, forged, s.params).reason, VerifyReason::UnknownIdSerial);
}

TEST(Verify, BadSignatureQuarantines) {
    Session s(8);
    QuantumCheque forged = s.chi;
    forged.signature.payload[0] ^= 0xff;
    const auto r = verify_cheque(s.world, s.bank, forged, s.params);
    EXPECT_EQ(r.reason, VerifyReason::BadSignature);
    EXPECT_FALSE(r.quantum_checks_run);
    EXPECT_TRUE(s.bank.quarantined(s.chi.serial));
    EXPECT_FALSE(s.bank.spent(s.chi.serial));
    // The serial is burnt even though the ledger says unspent.
    EXPECT_EQ(verify_cheque(s.world, s.bank, s.chi, s.params).reason, VerifyReason::DoubleSpend);
}

TEST(Verify, MalformedHandleCount) {
    Session s(9);
    QuantumCheque forged = s.chi;
    forged.a2.pop_back();
    EXPECT_EQ(verify_cheque(s.world, s.bank, forged, s.params).reason, VerifyReason::Malformed);
}

TEST(Verify, MalformedBankHandleSubmitted) {
    Session s(10);
    QuantumCheque forged = s.chi;
    forged.a2[0] = s.book.triples[0].b;
    EXPECT_EQ(verify_cheque(s.world, s.bank, forged, s.params).reason, VerifyReason::Malformed);
}

TEST(Verify, TamperedAmountUsuallyFails) {
    int accepted = 0;
    const int trials = 60;
    for (int seed = 0; seed < trials; ++seed) {
        Session s(static_cast<std::uint64_t>(seed), [] {
            SchemeParams p = small_params();
            p.l = 6;
            p.n = 6;
            return p;
        }());
        QuantumCheque forged = s.chi;
        forged.amount = 999999;
        const auto r = verify_cheque(s.world, s.bank, forged, s.params);
        accepted += r.accepted ? 1 : 0;
        if (!r.accepted) EXPECT_TRUE(r.reason == VerifyReason::GStateFail || r.reason == VerifyReason::PsiAliceFail);
    }
    EXPECT_LT(accepted, trials / 4);
}

TEST(Verify, ThresholdPolicyAcceptsHonest) {
    SchemeParams p = small_params();
    p.policy = {AcceptancePolicy::Mode::Threshold, 0.91, 0.6};
    Session s(11, p);
    EXPECT_TRUE(verify_cheque(s.world, s.bank, s.chi, s.params).accepted);
}

TEST(Ledger, MonotoneAndKeyed) {
    Bank bank;
    BankRecord r;
    r.id = "a";
    r.serial = BitString::from_hex("0102030405060708", 64);
    bank.add(r);
    EXPECT_THROW(bank.add(r), ProtocolError);
    EXPECT_FALSE(spent_ledger_check(bank, r.serial));
    bank.mark_spent(r.serial);
    EXPECT_TRUE(spent_ledger_check(bank, r.serial));
    // Same hex, different bit length: a different serial.
    EXPECT_FALSE(bank.has_serial(BitString::from_hex("0102030405060708", 63)));
}
