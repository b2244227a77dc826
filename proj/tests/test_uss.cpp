#include <gtest/gtest.h>

#include <random>

#include "qcheque/uss.hpp"

using namespace qcheque;

namespace {

const BitString kSerial = BitString::from_hex("00112233445566778899aabbccddeeff", 128);

}  // namespace

TEST(Lamport, SizesAtK128) {
    std::mt19937_64 rng(1);
    auto kp = sig_gen(rng, 128);
    EXPECT_EQ(kp.sk.material.size(), 4096u);
    EXPECT_EQ(kp.pk.material.size(), 4096u);
    EXPECT_EQ(sig_sign(kp.sk, kSerial).payload.size(), 2048u);
}

TEST(Lamport, SignVerify) {
    std::mt19937_64 rng(2);
    auto kp = sig_gen(rng);
    const auto sig = sig_sign(kp.sk, kSerial);
    EXPECT_TRUE(sig_verify(kp.pk, kSerial, sig));
}

TEST(Lamport, RejectsOtherMessage) {
    std::mt19937_64 rng(3);
    auto kp = sig_gen(rng);
    const auto sig = sig_sign(kp.sk, kSerial);
    BitString other = kSerial;
    other.flip(0);
    EXPECT_FALSE(sig_verify(kp.pk, other, sig));
}

TEST(Lamport, RejectsFlippedSignatureBit) {
    std::mt19937_64 rng(4);
    auto kp = sig_gen(rng);
    auto sig = sig_sign(kp.sk, kSerial);
    sig.payload[100] ^= 0x01;
    EXPECT_FALSE(sig_verify(kp.pk, kSerial, sig));
}

TEST(Lamport, RejectsOtherKey) {
    std::mt19937_64 rng(5);
    auto a = sig_gen(rng);
    auto b = sig_gen(rng);
    EXPECT_FALSE(sig_verify(b.pk, kSerial, sig_sign(a.sk, kSerial)));
}

TEST(Lamport, OneTime) {
    std::mt19937_64 rng(6);
    auto kp = sig_gen(rng);
    sig_sign(kp.sk, kSerial);
    EXPECT_TRUE(kp.sk.used);
    EXPECT_THROW(sig_sign(kp.sk, kSerial), ProtocolError);
}

TEST(Lamport, MalformedInputsVerifyFalse) {
    std::mt19937_64 rng(7);
    auto kp = sig_gen(rng);
    auto sig = sig_sign(kp.sk, kSerial);
    Signature shortened = sig;
    shortened.payload.pop_back();
    EXPECT_FALSE(sig_verify(kp.pk, kSerial, shortened));
    Signature renamed = sig;
    renamed.scheme = "other";
    EXPECT_FALSE(sig_verify(kp.pk, kSerial, renamed));
    PublicKey empty;
    EXPECT_FALSE(sig_verify(empty, kSerial, sig));
}

TEST(Lamport, SecurityParameterRange) {
    std::mt19937_64 rng(8);
    EXPECT_THROW(sig_gen(rng, 32), InvalidArgument);
    EXPECT_THROW(sig_gen(rng, 100), InvalidArgument);
    auto kp = sig_gen(rng, 64);
    EXPECT_TRUE(sig_verify(kp.pk, kSerial, sig_sign(kp.sk, kSerial)));
}

TEST(Lamport, SeedDeterministic) {
    std::mt19937_64 a(9), b(9);
    EXPECT_EQ(sig_gen(a).pk, sig_gen(b).pk);
}

TEST(Serialization, RoundTrip) {
    std::mt19937_64 rng(10);
    auto kp = sig_gen(rng);
    const auto sig = sig_sign(kp.sk, kSerial);
    EXPECT_EQ(parse_public_key(serialize(kp.pk)), kp.pk);
    EXPECT_EQ(parse_secret_key(serialize(kp.sk)), kp.sk);
    EXPECT_EQ(parse_signature(serialize(sig)), sig);
}

TEST(Serialization, TruncatedAndWrongKind) {
    std::mt19937_64 rng(11);
    auto kp = sig_gen(rng);
    auto bytes = serialize(kp.pk);
    EXPECT_THROW(parse_signature(bytes), InvalidArgument);
    bytes.resize(bytes.size() - 1);
    EXPECT_THROW(parse_public_key(bytes), InvalidArgument);
    auto extra = serialize(kp.pk);
    extra.push_back(0);
    EXPECT_THROW(parse_public_key(extra), InvalidArgument);
}
