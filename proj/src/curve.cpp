#include "obscura/curve.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <stdexcept>

namespace obscura {

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

std::optional<std::vector<std::uint8_t>> from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0)
        return std::nullopt;
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9')
            return c - '0';
        if (c >= 'a' && c <= 'f')
            return c - 'a' + 10;
        if (c >= 'A' && c <= 'F')
            return c - 'A' + 10;
        return -1;
    };
    std::vector<std::uint8_t> out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = nibble(hex[i]);
        int lo = nibble(hex[i + 1]);
        if (hi < 0 || lo < 0)
            return std::nullopt;
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

std::string u256_to_hex(const U256& v) {
    Bytes32 be = u256_to_be(v);
    return to_hex(be);
}

std::string_view errc_name(Errc code) {
    switch (code) {
        case Errc::IdentityNotSerializable: return "IdentityNotSerializable";
        case Errc::WrongLength: return "WrongLength";
        case Errc::NotOnCurve: return "NotOnCurve";
        case Errc::CoordinateOutOfRange: return "CoordinateOutOfRange";
        case Errc::ZeroScalar: return "ZeroScalar";
        case Errc::IndexMismatch: return "IndexMismatch";
        case Errc::BadIndex: return "BadIndex";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::DuplicateMember: return "DuplicateMember";
        case Errc::IdentityMember: return "IdentityMember";
        case Errc::RingTooLarge: return "RingTooLarge";
        case Errc::TruncatedPayload: return "TruncatedPayload";
        case Errc::MalformedChallenge: return "MalformedChallenge";
        case Errc::NonCanonicalScalar: return "NonCanonicalScalar";
        case Errc::InsufficientPool: return "InsufficientPool";
        case Errc::MalformedDocument: return "MalformedDocument";
        case Errc::ScriptError: return "ScriptError";
    }
    return "UnknownError";
}

Bytes32 sha256(std::span<const std::uint8_t> data) {
    Bytes32 out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != 32)
        throw std::runtime_error("sha256 failed");
    return out;
}

namespace {

const Fp CURVE_B = Fp::from_u64(3);

// Jacobian coordinates; Z = 0 marks the identity.
struct Jac {
    Fp x, y, z;
    bool is_identity() const { return z.is_zero(); }
};

Jac jac_identity() {
    return Jac{Fp::one(), Fp::one(), Fp::zero()};
}

Jac to_jac(const GroupPoint& p) {
    if (p.is_identity())
        return jac_identity();
    return Jac{p.x(), p.y(), Fp::one()};
}

GroupPoint to_affine(const Jac& p) {
    if (p.is_identity())
        return GroupPoint::identity();
    Fp zinv = p.z.inverse();
    Fp zinv2 = zinv.squared();
    return GroupPoint(p.x * zinv2, p.y * zinv2 * zinv);
}

Jac jac_dbl(const Jac& p) {
    if (p.is_identity() || p.y.is_zero())
        return jac_identity();
    // dbl-2009-l (a = 0)
    Fp a = p.x.squared();
    Fp b = p.y.squared();
    Fp c = b.squared();
    Fp d = ((p.x + b).squared() - a - c).doubled();
    Fp e = a + a + a;
    Fp f = e.squared();
    Fp x3 = f - d.doubled();
    Fp y3 = e * (d - x3) - c.doubled().doubled().doubled();
    Fp z3 = (p.y * p.z).doubled();
    return Jac{x3, y3, z3};
}

// Mixed addition with an affine (non-identity) point.
Jac jac_add_affine(const Jac& p, const GroupPoint& q) {
    if (p.is_identity())
        return Jac{q.x(), q.y(), Fp::one()};
    // madd-2007-bl
    Fp z1z1 = p.z.squared();
    Fp u2 = q.x() * z1z1;
    Fp s2 = q.y() * p.z * z1z1;
    if (u2 == p.x) {
        if (s2 == p.y)
            return jac_dbl(p);
        return jac_identity();
    }
    Fp h = u2 - p.x;
    Fp hh = h.squared();
    Fp i = hh.doubled().doubled();
    Fp j = h * i;
    Fp r = (s2 - p.y).doubled();
    Fp v = p.x * i;
    Fp x3 = r.squared() - j - v.doubled();
    Fp y3 = r * (v - x3) - (p.y * j).doubled();
    Fp z3 = (p.z + h).squared() - z1z1 - hh;
    return Jac{x3, y3, z3};
}

Jac jac_add(const Jac& p, const Jac& q) {
    if (p.is_identity())
        return q;
    if (q.is_identity())
        return p;
    // add-2007-bl
    Fp z1z1 = p.z.squared();
    Fp z2z2 = q.z.squared();
    Fp u1 = p.x * z2z2;
    Fp u2 = q.x * z1z1;
    Fp s1 = p.y * q.z * z2z2;
    Fp s2 = q.y * p.z * z1z1;
    if (u1 == u2) {
        if (s1 == s2)
            return jac_dbl(p);
        return jac_identity();
    }
    Fp h = u2 - u1;
    Fp i = h.doubled().squared();
    Fp j = h * i;
    Fp r = (s2 - s1).doubled();
    Fp v = u1 * i;
    Fp x3 = r.squared() - j - v.doubled();
    Fp y3 = r * (v - x3) - (s1 * j).doubled();
    Fp z3 = ((p.z + q.z).squared() - z1z1 - z2z2) * h;
    return Jac{x3, y3, z3};
}

GroupPoint mul_impl(const GroupPoint& p, const U256& k) {
    if (p.is_identity() || k.is_zero())
        return GroupPoint::identity();
    Jac acc = jac_identity();
    bool seen = false;
    for (int i = 255; i >= 0; --i) {
        if (seen)
            acc = jac_dbl(acc);
        if (k.bit(static_cast<unsigned>(i))) {
            acc = jac_add_affine(acc, p);
            seen = true;
        }
    }
    return to_affine(acc);
}

}  // namespace

bool GroupPoint::on_curve() const {
    if (identity_)
        return true;
    return y_.squared() == x_.squared() * x_ + CURVE_B;
}

GroupPoint GroupPoint::negated() const {
    if (identity_)
        return *this;
    return GroupPoint(x_, y_.negated());
}

GroupPoint point_add(const GroupPoint& p, const GroupPoint& q) {
    return to_affine(jac_add(to_jac(p), to_jac(q)));
}

GroupPoint point_mul(const GroupPoint& p, const Scalar& k) {
    return mul_impl(p, k.value());
}

GroupPoint point_mul(const GroupPoint& p, const Challenge& c) {
    return mul_impl(p, c.as_scalar().value());
}

const GroupPoint& generator_g() {
    static const GroupPoint g(Fp::from_u64(1), Fp::from_u64(2));
    return g;
}

GroupPoint derive_generator_h() {
    static constexpr char TAG[] = "Obscura/H/v1";
    U256 qr_exp = u256_shr1([] {
        U256 t{};
        u256_sub(Fp::modulus(), U256::from_u64(1), t);
        return t;
    }());  // (p-1)/2
    U256 sqrt_exp = u256_shr1(u256_shr1([] {
        U256 t{};
        u256_add(Fp::modulus(), U256::from_u64(1), t);
        return t;
    }()));  // (p+1)/4; valid since p = 3 mod 4

    for (std::uint32_t counter = 0;; ++counter) {
        std::uint8_t buf[sizeof(TAG) - 1 + 4];
        std::memcpy(buf, TAG, sizeof(TAG) - 1);
        buf[sizeof(TAG) - 1] = static_cast<std::uint8_t>(counter >> 24);
        buf[sizeof(TAG) + 0] = static_cast<std::uint8_t>(counter >> 16);
        buf[sizeof(TAG) + 1] = static_cast<std::uint8_t>(counter >> 8);
        buf[sizeof(TAG) + 2] = static_cast<std::uint8_t>(counter);
        Bytes32 digest = sha256(buf);
        Fp x = Fp::from_bytes(digest);
        Fp rhs = x.squared() * x + CURVE_B;
        if (rhs.is_zero())
            continue;
        if (!(rhs.pow(qr_exp) == Fp::one()))
            continue;
        Fp y = rhs.pow(sqrt_exp);
        if (!y.value().is_even())
            y = y.negated();
        return GroupPoint(x, y);
    }
}

const GroupPoint& generator_h() {
    static const GroupPoint h = derive_generator_h();
    return h;
}

Bytes64 serialize_point(const GroupPoint& p) {
    if (p.is_identity())
        throw Error(Errc::IdentityNotSerializable);
    Bytes64 out{};
    Bytes32 xb = p.x().to_bytes();
    Bytes32 yb = p.y().to_bytes();
    std::memcpy(out.data(), xb.data(), 32);
    std::memcpy(out.data() + 32, yb.data(), 32);
    return out;
}

GroupPoint deserialize_point(std::span<const std::uint8_t> b64) {
    if (b64.size() != 64)
        throw Error(Errc::WrongLength, "expected 64 bytes, got " + std::to_string(b64.size()));
    Bytes32 xb{};
    Bytes32 yb{};
    std::memcpy(xb.data(), b64.data(), 32);
    std::memcpy(yb.data(), b64.data() + 32, 32);
    auto x = Fp::from_bytes_checked(xb);
    if (!x)
        throw Error(Errc::CoordinateOutOfRange, "x");
    auto y = Fp::from_bytes_checked(yb);
    if (!y)
        throw Error(Errc::CoordinateOutOfRange, "y");
    GroupPoint p(*x, *y);
    if (!p.on_curve())
        throw Error(Errc::NotOnCurve);
    return p;
}

Challenge hash_to_challenge(const Bytes32& m, const GroupPoint& l, const GroupPoint& r) {
    std::uint8_t buf[160];
    Bytes64 lb = serialize_point(l);
    Bytes64 rb = serialize_point(r);
    std::memcpy(buf, m.data(), 32);
    std::memcpy(buf + 32, lb.data(), 64);
    std::memcpy(buf + 96, rb.data(), 64);
    return Challenge::from_digest(sha256(buf));
}

}  // namespace obscura
