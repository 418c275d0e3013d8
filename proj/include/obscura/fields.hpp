#pragma once

#include <optional>

#include "obscura/u256.hpp"

namespace obscura {

struct FieldParams {
    U256 modulus;      // odd prime < 2^255
    U256 r1;           // 2^256 mod modulus (Montgomery form of 1)
    U256 r2;           // 2^512 mod modulus
    std::uint64_t n0;  // -modulus^{-1} mod 2^64
};

namespace detail {

constexpr U256 mod_double(const U256& a, const U256& m) {
    U256 r{};
    u256_add(a, a, r);  // a < m < 2^255, no carry possible
    if (r >= m) {
        U256 t{};
        u256_sub(r, m, t);
        r = t;
    }
    return r;
}

consteval U256 pow2_mod(const U256& m, int exponent) {
    U256 r = U256::from_u64(1);
    for (int i = 0; i < exponent; ++i)
        r = mod_double(r, m);
    return r;
}

consteval std::uint64_t neg_inv64(std::uint64_t m0) {
    // Newton iteration for m0^{-1} mod 2^64 (m0 odd), then negate.
    std::uint64_t x = 1;
    for (int i = 0; i < 6; ++i)
        x *= 2 - m0 * x;
    return ~x + 1;
}

}  // namespace detail

consteval FieldParams make_field_params(U256 modulus) {
    return FieldParams{modulus, detail::pow2_mod(modulus, 256), detail::pow2_mod(modulus, 512),
                       detail::neg_inv64(modulus.limb[0])};
}

// BN254 base field and scalar field moduli.
inline constexpr FieldParams FP_FIELD = make_field_params(
        u256_from_hex("30644e72e131a029b85045b68181585d97816a916871ca8d3c208c16d87cfd47"));
inline constexpr FieldParams FR_FIELD = make_field_params(
        u256_from_hex("30644e72e131a029b85045b68181585d2833e84879b9709143e1f593f0000001"));

// Prime-field element in Montgomery form.
template <const FieldParams& F>
class Fe {
public:
    constexpr Fe() = default;

    static constexpr Fe zero() { return {}; }
    static constexpr Fe one() { return Fe(F.r1); }
    static constexpr U256 modulus() { return F.modulus; }

    // Reduces any 256-bit value.
    static constexpr Fe from_u256(const U256& a) { return Fe(mont_mul(a, F.r2)); }
    static constexpr Fe from_u64(std::uint64_t a) { return from_u256(U256::from_u64(a)); }

    static Fe from_bytes(const Bytes32& be) { return from_u256(u256_from_be(be)); }

    // Rejects non-canonical encodings (value >= modulus).
    static std::optional<Fe> from_bytes_checked(const Bytes32& be) {
        U256 v = u256_from_be(be);
        if (v >= F.modulus)
            return std::nullopt;
        return from_u256(v);
    }

    constexpr U256 value() const { return mont_mul(v_, U256::from_u64(1)); }
    Bytes32 to_bytes() const { return u256_to_be(value()); }

    constexpr bool is_zero() const { return v_.is_zero(); }
    constexpr bool operator==(const Fe&) const = default;

    friend constexpr Fe operator+(const Fe& a, const Fe& b) {
        U256 r{};
        u256_add(a.v_, b.v_, r);  // both < m < 2^255, no carry
        if (r >= F.modulus) {
            U256 t{};
            u256_sub(r, F.modulus, t);
            r = t;
        }
        return Fe(r);
    }

    friend constexpr Fe operator-(const Fe& a, const Fe& b) {
        U256 r{};
        if (u256_sub(a.v_, b.v_, r)) {
            U256 t{};
            u256_add(r, F.modulus, t);
            r = t;
        }
        return Fe(r);
    }

    friend constexpr Fe operator*(const Fe& a, const Fe& b) {
        return Fe(mont_mul(a.v_, b.v_));
    }

    constexpr Fe negated() const { return zero() - *this; }
    constexpr Fe squared() const { return *this * *this; }

    constexpr Fe doubled() const { return *this + *this; }

    constexpr Fe pow(const U256& e) const {
        Fe acc = one();
        for (int i = 255; i >= 0; --i) {
            acc = acc.squared();
            if (e.bit(static_cast<unsigned>(i)))
                acc = acc * *this;
        }
        return acc;
    }

    // Fermat inversion; zero maps to zero.
    constexpr Fe inverse() const {
        U256 e{};
        u256_sub(F.modulus, U256::from_u64(2), e);
        return pow(e);
    }

private:
    explicit constexpr Fe(const U256& raw) : v_(raw) {}

    // CIOS Montgomery multiplication: returns a*b*2^-256 mod m.
    // Requires b < m; a may be any 256-bit value (result is then < 2m before
    // the final conditional subtraction since ab/2^256 < m).
    static constexpr U256 mont_mul(const U256& a, const U256& b) {
        using u128 = unsigned __int128;
        std::uint64_t t[6] = {0, 0, 0, 0, 0, 0};
        for (int i = 0; i < 4; ++i) {
            u128 carry = 0;
            for (int j = 0; j < 4; ++j) {
                u128 cur = static_cast<u128>(t[j]) + static_cast<u128>(a.limb[j]) * b.limb[i] + carry;
                t[j] = static_cast<std::uint64_t>(cur);
                carry = cur >> 64;
            }
            u128 cur = static_cast<u128>(t[4]) + carry;
            t[4] = static_cast<std::uint64_t>(cur);
            t[5] = static_cast<std::uint64_t>(cur >> 64);

            std::uint64_t m = t[0] * F.n0;
            cur = static_cast<u128>(t[0]) + static_cast<u128>(m) * F.modulus.limb[0];
            carry = cur >> 64;
            for (int j = 1; j < 4; ++j) {
                cur = static_cast<u128>(t[j]) + static_cast<u128>(m) * F.modulus.limb[j] + carry;
                t[j - 1] = static_cast<std::uint64_t>(cur);
                carry = cur >> 64;
            }
            cur = static_cast<u128>(t[4]) + carry;
            t[3] = static_cast<std::uint64_t>(cur);
            t[4] = t[5] + static_cast<std::uint64_t>(cur >> 64);
            t[5] = 0;
        }
        U256 r{{t[0], t[1], t[2], t[3]}};
        if (t[4] != 0 || r >= F.modulus) {
            U256 tmp{};
            u256_sub(r, F.modulus, tmp);
            r = tmp;
        }
        return r;
    }

    U256 v_{};
};

using Fp = Fe<FP_FIELD>;
using Scalar = Fe<FR_FIELD>;

}  // namespace obscura
