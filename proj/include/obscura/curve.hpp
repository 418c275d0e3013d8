#pragma once

#include <span>

#include "obscura/errors.hpp"
#include "obscura/fields.hpp"

namespace obscura {

Bytes32 sha256(std::span<const std::uint8_t> data);

// SHA-256 output masked to 255 bits; may exceed the group order and is
// reduced mod q only when used as a scalar.
class Challenge {
public:
    Challenge() = default;

    static Challenge from_digest(const Bytes32& digest) {
        U256 v = u256_from_be(digest);
        v.limb[3] &= 0x7fffffffffffffffULL;
        return Challenge(v);
    }

    // Parses a 32-byte big-endian value; the top bit must already be clear.
    static Challenge from_bytes(const Bytes32& be) {
        U256 v = u256_from_be(be);
        if (v.bit(255))
            throw Error(Errc::MalformedChallenge, "top bit set");
        return Challenge(v);
    }

    Bytes32 to_bytes() const { return u256_to_be(v_); }
    U256 value() const { return v_; }
    Scalar as_scalar() const { return Scalar::from_u256(v_); }

    bool operator==(const Challenge&) const = default;

private:
    explicit Challenge(const U256& v) : v_(v) {}
    U256 v_{};
};

// Affine point on y^2 = x^3 + 3 over Fp (prime-order subgroup; cofactor 1).
// Default-constructed points are the identity.
class GroupPoint {
public:
    GroupPoint() = default;
    GroupPoint(const Fp& x, const Fp& y) : x_(x), y_(y), identity_(false) {}

    static GroupPoint identity() { return {}; }

    bool is_identity() const { return identity_; }
    const Fp& x() const { return x_; }
    const Fp& y() const { return y_; }

    bool on_curve() const;
    GroupPoint negated() const;

    bool operator==(const GroupPoint& o) const {
        if (identity_ || o.identity_)
            return identity_ == o.identity_;
        return x_ == o.x_ && y_ == o.y_;
    }

private:
    Fp x_{};
    Fp y_{};
    bool identity_ = true;
};

GroupPoint point_add(const GroupPoint& p, const GroupPoint& q);
GroupPoint point_mul(const GroupPoint& p, const Scalar& k);
GroupPoint point_mul(const GroupPoint& p, const Challenge& c);

const GroupPoint& generator_g();

// Nothing-up-my-sleeve second generator: try-and-increment over
// SHA-256("Obscura/H/v1" || counter), even-y root. Deterministic.
GroupPoint derive_generator_h();
const GroupPoint& generator_h();  // cached derive_generator_h()

Bytes64 serialize_point(const GroupPoint& p);                     // throws IdentityNotSerializable
GroupPoint deserialize_point(std::span<const std::uint8_t> b64);  // throws WrongLength/CoordinateOutOfRange/NotOnCurve

// SHA-256(m || L || R) masked to 255 bits.
Challenge hash_to_challenge(const Bytes32& m, const GroupPoint& l, const GroupPoint& r);

}  // namespace obscura
