// sha256.hpp
// Thin wrapper over OpenSSL's SHA-256.

#pragma once

#include <array>
#include <cstdint>
#include <span>

#include <openssl/evp.h>

#include "qcheque/errors.hpp"

namespace qcheque {

using Digest = std::array<std::uint8_t, 32>;

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw Error("SHA-256 init failed");
    }
    ~Sha256() { EVP_MD_CTX_free(ctx_); }
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    Sha256& update(std::span<const std::uint8_t> data) {
        if (EVP_DigestUpdate(ctx_, data.data(), data.size()) != 1) throw Error("SHA-256 update failed");
        return *this;
    }

    Digest finish() {
        Digest out{};
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx_, out.data(), &len) != 1 || len != out.size())
            throw Error("SHA-256 final failed");
        return out;
    }

private:
    EVP_MD_CTX* ctx_;
};

inline Digest sha256(std::span<const std::uint8_t> data) { return Sha256().update(data).finish(); }

}  // namespace qcheque
