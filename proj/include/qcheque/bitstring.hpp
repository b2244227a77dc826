// bitstring.hpp
// Classical bit strings: keys, identities, nonces, amounts and serials.

#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qcheque/errors.hpp"

namespace qcheque {

using Bytes = std::vector<std::uint8_t>;

inline std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

inline Bytes from_hex(std::string_view hex) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw InvalidArgument(std::string("invalid hex digit '") + c + "'");
    };
    if (hex.size() % 2) throw InvalidArgument("hex string has odd length");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
    return out;
}

// Bits are stored one per element, most significant first.
class BitString {
public:
    BitString() = default;

    static BitString from_bytes(std::span<const std::uint8_t> bytes, std::size_t bits) {
        if (bits > bytes.size() * 8) throw InvalidArgument("bit length exceeds byte buffer");
        BitString s;
        s.bits_.resize(bits);
        for (std::size_t i = 0; i < bits; ++i) s.bits_[i] = (bytes[i / 8] >> (7 - i % 8)) & 1;
        return s;
    }

    static BitString from_bytes(std::span<const std::uint8_t> bytes) { return from_bytes(bytes, bytes.size() * 8); }

    static BitString from_text(std::string_view text) {
        return from_bytes(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
    }

    static BitString from_hex(std::string_view hex, std::size_t bits) { return from_bytes(qcheque::from_hex(hex), bits); }

    // Fixed-width big-endian encoding of an unsigned value.
    static BitString from_uint(std::uint64_t value, std::size_t width) {
        if (width == 0 || width > 64) throw InvalidArgument("width must be in 1..64");
        if (width < 64 && (value >> width) != 0) throw InvalidArgument("value does not fit in width");
        BitString s;
        s.bits_.resize(width);
        for (std::size_t i = 0; i < width; ++i) s.bits_[i] = (value >> (width - 1 - i)) & 1;
        return s;
    }

    static BitString random(std::mt19937_64& rng, std::size_t bits) {
        BitString s;
        s.bits_.resize(bits);
        std::uint64_t word = 0;
        for (std::size_t i = 0; i < bits; ++i) {
            if (i % 64 == 0) word = rng();
            s.bits_[i] = (word >> (63 - i % 64)) & 1;
        }
        return s;
    }

    std::size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }
    bool operator[](std::size_t i) const { return bits_.at(i) != 0; }

    void flip(std::size_t i) { bits_.at(i) ^= 1; }

    BitString& append(const BitString& other) {
        bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
        return *this;
    }

    // Packed MSB-first; the last byte is zero padded.
    Bytes to_bytes() const {
        Bytes out((bits_.size() + 7) / 8, 0);
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80 >> (i % 8));
        return out;
    }

    std::string to_hex() const { return qcheque::to_hex(to_bytes()); }

    // Unambiguous byte encoding: 64-bit big-endian bit count, then the packed bits.
    Bytes encode() const {
        Bytes out;
        const std::uint64_t n = bits_.size();
        for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
        const auto packed = to_bytes();
        out.insert(out.end(), packed.begin(), packed.end());
        return out;
    }

    friend bool operator==(const BitString&, const BitString&) = default;
    friend auto operator<=>(const BitString&, const BitString&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

// Length-prefixed concatenation: each part contributes a 32-bit length
// followed by its bits, so distinct tuples never frame to the same string.
inline BitString frame(std::initializer_list<std::reference_wrapper<const BitString>> parts) {
    BitString out;
    for (const BitString& p : parts) {
        if (p.size() > 0xffffffffu) throw InvalidArgument("frame part too long");
        out.append(BitString::from_uint(p.size(), 32));
        out.append(p);
    }
    return out;
}

// Cheque amounts travel as the decimal string of an integer number of units.
inline BitString encode_amount(std::uint64_t units) { return BitString::from_text(std::to_string(units)); }

inline BitString encode_index(std::size_t i) { return BitString::from_uint(i, 32); }

inline BitString encode_id(std::string_view id) {
    if (id.empty()) throw InvalidArgument("account id must be nonempty");
    return BitString::from_text(id);
}

}  // namespace qcheque
