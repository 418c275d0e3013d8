#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "obscura/bytes.hpp"

namespace obscura {

// Unsigned 256-bit integer. Limbs are little-endian: limb[0] is least significant.
struct U256 {
    std::array<std::uint64_t, 4> limb{};

    constexpr bool operator==(const U256&) const = default;

    constexpr bool is_zero() const {
        return (limb[0] | limb[1] | limb[2] | limb[3]) == 0;
    }
    constexpr bool is_even() const { return (limb[0] & 1) == 0; }
    constexpr bool bit(unsigned i) const {
        return (limb[i >> 6] >> (i & 63)) & 1;
    }

    static constexpr U256 from_u64(std::uint64_t v) { return U256{{v, 0, 0, 0}}; }
};

constexpr int u256_cmp(const U256& a, const U256& b) {
    for (int i = 3; i >= 0; --i) {
        if (a.limb[i] < b.limb[i])
            return -1;
        if (a.limb[i] > b.limb[i])
            return 1;
    }
    return 0;
}

constexpr bool operator<(const U256& a, const U256& b) { return u256_cmp(a, b) < 0; }
constexpr bool operator>=(const U256& a, const U256& b) { return u256_cmp(a, b) >= 0; }

// out = a + b, returns the carry bit.
constexpr std::uint64_t u256_add(const U256& a, const U256& b, U256& out) {
    unsigned __int128 c = 0;
    for (int i = 0; i < 4; ++i) {
        c += static_cast<unsigned __int128>(a.limb[i]) + b.limb[i];
        out.limb[i] = static_cast<std::uint64_t>(c);
        c >>= 64;
    }
    return static_cast<std::uint64_t>(c);
}

// out = a - b, returns the borrow bit.
constexpr std::uint64_t u256_sub(const U256& a, const U256& b, U256& out) {
    unsigned __int128 borrow = 0;
    for (int i = 0; i < 4; ++i) {
        unsigned __int128 d = static_cast<unsigned __int128>(a.limb[i]) - b.limb[i] - borrow;
        out.limb[i] = static_cast<std::uint64_t>(d);
        borrow = (d >> 64) & 1;
    }
    return static_cast<std::uint64_t>(borrow);
}

constexpr U256 u256_shr1(const U256& a) {
    U256 r{};
    for (int i = 0; i < 4; ++i) {
        r.limb[i] = a.limb[i] >> 1;
        if (i < 3)
            r.limb[i] |= a.limb[i + 1] << 63;
    }
    return r;
}

constexpr U256 u256_from_hex(std::string_view hex) {
    U256 r{};
    for (char ch : hex) {
        std::uint64_t nib = 0;
        if (ch >= '0' && ch <= '9')
            nib = static_cast<std::uint64_t>(ch - '0');
        else if (ch >= 'a' && ch <= 'f')
            nib = static_cast<std::uint64_t>(ch - 'a' + 10);
        else if (ch >= 'A' && ch <= 'F')
            nib = static_cast<std::uint64_t>(ch - 'A' + 10);
        else
            continue;
        // r = r*16 + nib
        std::uint64_t carry = nib;
        for (int i = 0; i < 4; ++i) {
            std::uint64_t hi = r.limb[i] >> 60;
            r.limb[i] = (r.limb[i] << 4) | carry;
            carry = hi;
        }
    }
    return r;
}

inline U256 u256_from_be(std::span<const std::uint8_t> be32) {
    U256 r{};
    for (int i = 0; i < 32; ++i)
        r.limb[3 - i / 8] |= static_cast<std::uint64_t>(be32[static_cast<std::size_t>(i)])
                             << (56 - 8 * (i % 8));
    return r;
}

inline Bytes32 u256_to_be(const U256& v) {
    Bytes32 out{};
    for (int i = 0; i < 32; ++i)
        out[static_cast<std::size_t>(i)] =
                static_cast<std::uint8_t>(v.limb[3 - i / 8] >> (56 - 8 * (i % 8)));
    return out;
}

std::string u256_to_hex(const U256& v);

}  // namespace obscura
