// uss.hpp
// Black-box signature interface and a Lamport one-time implementation.
//
// Lamport with security parameter k (64 <= k <= 256, multiple of 8):
//   element width w = k/8 bytes, H = SHA-256 truncated to w bytes
//   sk = 2k random elements, sk[2i + bit]
//   pk = H(sk[j]) for every j
//   digest d = first k bits of SHA-256(message.encode())
//   sig = sk[2i + d_i] for i in 0..k-1
// At k = 128: |sk| = |pk| = 4096 bytes, |sig| = 2048 bytes.

#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>

#include "qcheque/bitstring.hpp"
#include "qcheque/sha256.hpp"

namespace qcheque {

struct PublicKey {
    std::string scheme;
    std::uint32_t security_parameter = 0;
    Bytes material;
    friend bool operator==(const PublicKey&, const PublicKey&) = default;
};

struct SecretKey {
    std::string scheme;
    std::uint32_t security_parameter = 0;
    Bytes material;
    bool used = false;  // one-time schemes refuse a second signature
    friend bool operator==(const SecretKey&, const SecretKey&) = default;
};

struct SignatureKeyPair {
    PublicKey pk;
    SecretKey sk;
};

struct Signature {
    std::string scheme;
    Bytes payload;
    friend bool operator==(const Signature&, const Signature&) = default;
};

class SignatureScheme {
public:
    virtual ~SignatureScheme() = default;
    virtual std::string_view id() const = 0;
    virtual bool one_time() const = 0;
    virtual SignatureKeyPair generate(std::mt19937_64& rng, std::uint32_t security_parameter) const = 0;
    virtual Signature sign(SecretKey& sk, const BitString& message) const = 0;
    // Total: malformed keys or signatures verify as false.
    virtual bool verify(const PublicKey& pk, const BitString& message, const Signature& sig) const = 0;
};

class LamportScheme final : public SignatureScheme {
public:
    static constexpr std::string_view kId = "lamport-sha256";

    std::string_view id() const override { return kId; }
    bool one_time() const override { return true; }

    SignatureKeyPair generate(std::mt19937_64& rng, std::uint32_t k) const override {
        if (k < 64) throw InvalidArgument("security parameter must be at least 64");
        if (k > 256 || k % 8) throw InvalidArgument("security parameter must be a multiple of 8 up to 256");
        const std::size_t w = k / 8;
        SignatureKeyPair kp;
        kp.sk = {std::string(kId), k, Bytes(2 * k * w), false};
        kp.pk = {std::string(kId), k, Bytes(2 * k * w)};
        std::uint64_t word = 0;
        for (std::size_t i = 0; i < kp.sk.material.size(); ++i) {
            if (i % 8 == 0) word = rng();
            kp.sk.material[i] = static_cast<std::uint8_t>(word >> (56 - 8 * (i % 8)));
        }
        for (std::size_t j = 0; j < 2 * k; ++j) {
            const auto h = sha256(std::span(kp.sk.material).subspan(j * w, w));
            std::copy_n(h.begin(), w, kp.pk.material.begin() + static_cast<std::ptrdiff_t>(j * w));
        }
        return kp;
    }

    Signature sign(SecretKey& sk, const BitString& message) const override {
        if (sk.scheme != kId || !well_formed(sk.security_parameter, sk.material.size(), 2))
            throw InvalidArgument("secret key does not belong to " + std::string(kId));
        if (sk.used) throw ProtocolError("one-time signing key already used");
        const std::uint32_t k = sk.security_parameter;
        const std::size_t w = k / 8;
        const auto d = sha256(message.encode());
        Signature sig{std::string(kId), Bytes(k * w)};
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = 2 * i + digest_bit(d, i);
            std::copy_n(sk.material.begin() + static_cast<std::ptrdiff_t>(j * w), w,
                        sig.payload.begin() + static_cast<std::ptrdiff_t>(i * w));
        }
        sk.used = true;
        return sig;
    }

    bool verify(const PublicKey& pk, const BitString& message, const Signature& sig) const override {
        if (pk.scheme != kId || sig.scheme != kId) return false;
        const std::uint32_t k = pk.security_parameter;
        if (!well_formed(k, pk.material.size(), 2) || sig.payload.size() != std::size_t{k} * (k / 8)) return false;
        const std::size_t w = k / 8;
        const auto d = sha256(message.encode());
        const std::span<const std::uint8_t> s(sig.payload);
        for (std::size_t i = 0; i < k; ++i) {
            const auto h = sha256(s.subspan(i * w, w));
            const std::size_t j = 2 * i + digest_bit(d, i);
            if (!std::equal(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(w),
                            pk.material.begin() + static_cast<std::ptrdiff_t>(j * w)))
                return false;
        }
        return true;
    }

private:
    static bool well_formed(std::uint32_t k, std::size_t size, std::size_t factor) {
        return k >= 64 && k <= 256 && k % 8 == 0 && size == factor * k * (k / 8);
    }

    static std::size_t digest_bit(const Digest& d, std::size_t i) { return (d[i / 8] >> (7 - i % 8)) & 1; }
};

inline std::shared_ptr<const SignatureScheme> default_signature_scheme() {
    static const auto scheme = std::make_shared<const LamportScheme>();
    return scheme;
}

inline SignatureKeyPair sig_gen(std::mt19937_64& rng, std::uint32_t security_parameter = 128) {
    return default_signature_scheme()->generate(rng, security_parameter);
}

inline Signature sig_sign(SecretKey& sk, const BitString& message) {
    return default_signature_scheme()->sign(sk, message);
}

inline bool sig_verify(const PublicKey& pk, const BitString& message, const Signature& sig) {
    return default_signature_scheme()->verify(pk, message, sig);
}

// ---- serialization ---------------------------------------------------------
//
// Length-prefixed big-endian binary:
//   u8 kind ('P' public key, 'S' secret key, 'G' signature)
//   u16 scheme-id length, scheme-id bytes
//   u32 security parameter (zero for signatures)
//   u8 used flag (secret keys only)
//   u32 payload length, payload bytes

namespace detail {

inline void put_be(Bytes& out, std::uint64_t v, int width) {
    for (int i = width - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    std::uint64_t be(int width) {
        need(static_cast<std::size_t>(width));
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i) v = (v << 8) | in_[pos_++];
        return v;
    }

    Bytes take(std::size_t n) {
        need(n);
        Bytes out(in_.begin() + static_cast<std::ptrdiff_t>(pos_), in_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return out;
    }

    void finish() const {
        if (pos_ != in_.size()) throw InvalidArgument("trailing bytes after key material");
    }

private:
    void need(std::size_t n) const {
        if (in_.size() - pos_ < n) throw InvalidArgument("truncated key material at byte " + std::to_string(pos_));
    }

    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

inline Bytes serialize_common(char kind, const std::string& scheme, std::uint32_t k, const Bytes& payload,
                              int used_flag) {
    Bytes out;
    out.push_back(static_cast<std::uint8_t>(kind));
    put_be(out, scheme.size(), 2);
    out.insert(out.end(), scheme.begin(), scheme.end());
    put_be(out, k, 4);
    if (used_flag >= 0) out.push_back(static_cast<std::uint8_t>(used_flag));
    put_be(out, payload.size(), 4);
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

struct Parsed {
    std::string scheme;
    std::uint32_t k = 0;
    bool used = false;
    Bytes payload;
};

inline Parsed parse_common(std::span<const std::uint8_t> in, char kind) {
    Reader r(in);
    if (static_cast<char>(r.be(1)) != kind) throw InvalidArgument(std::string("expected record kind '") + kind + "'");
    Parsed p;
    const auto id = r.take(r.be(2));
    p.scheme.assign(id.begin(), id.end());
    p.k = static_cast<std::uint32_t>(r.be(4));
    if (kind == 'S') p.used = r.be(1) != 0;
    p.payload = r.take(r.be(4));
    r.finish();
    return p;
}

}  // namespace detail

inline Bytes serialize(const PublicKey& pk) {
    return detail::serialize_common('P', pk.scheme, pk.security_parameter, pk.material, -1);
}

inline Bytes serialize(const SecretKey& sk) {
    return detail::serialize_common('S', sk.scheme, sk.security_parameter, sk.material, sk.used ? 1 : 0);
}

inline Bytes serialize(const Signature& sig) { return detail::serialize_common('G', sig.scheme, 0, sig.payload, -1); }

inline PublicKey parse_public_key(std::span<const std::uint8_t> in) {
    auto p = detail::parse_common(in, 'P');
    return {std::move(p.scheme), p.k, std::move(p.payload)};
}

inline SecretKey parse_secret_key(std::span<const std::uint8_t> in) {
    auto p = detail::parse_common(in, 'S');
    return {std::move(p.scheme), p.k, std::move(p.payload), p.used};
}

inline Signature parse_signature(std::span<const std::uint8_t> in) {
    auto p = detail::parse_common(in, 'G');
    return {std::move(p.scheme), std::move(p.payload)};
}

}  // namespace qcheque
