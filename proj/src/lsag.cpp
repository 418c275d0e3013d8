#include "obscura/lsag.hpp"

#include <algorithm>

namespace obscura::lsag {

Ring::Ring(std::vector<GroupPoint> members) : members_(std::move(members)) {
    if (members_.empty())
        throw Error(Errc::LengthMismatch, "empty ring");
    if (members_.size() > 255)
        throw Error(Errc::RingTooLarge, "ring exceeds one-byte size limit");
    for (std::size_t i = 0; i < members_.size(); ++i) {
        if (members_[i].is_identity())
            throw Error(Errc::IdentityMember, "ring member " + std::to_string(i));
        for (std::size_t j = i + 1; j < members_.size(); ++j)
            if (members_[i] == members_[j])
                throw Error(Errc::DuplicateMember,
                            "indices " + std::to_string(i) + " and " + std::to_string(j));
    }
}

KeyPair keygen(RandomSource& rng) {
    Scalar x = random_nonzero_scalar(rng);
    return keypair_from_secret(x);
}

KeyPair keypair_from_secret(const Scalar& x) {
    if (x.is_zero())
        throw Error(Errc::ZeroScalar);
    return KeyPair{x, point_mul(generator_g(), x), point_mul(generator_h(), x)};
}

GroupPoint compute_key_image(const Scalar& x) {
    if (x.is_zero())
        throw Error(Errc::ZeroScalar);
    return point_mul(generator_h(), x);
}

LsagSignature sign(const Scalar& x, const Ring& ring, std::size_t pi, const Bytes32& m,
                   RandomSource& rng, SignTrace* trace) {
    const std::size_t n = ring.size();
    if (pi >= n)
        throw Error(Errc::BadIndex, "pi = " + std::to_string(pi));
    if (x.is_zero())
        throw Error(Errc::ZeroScalar);
    if (!(ring[pi] == point_mul(generator_g(), x)))
        throw Error(Errc::IndexMismatch, "ring[pi] != xG");

    const GroupPoint key_image = point_mul(generator_h(), x);

    std::vector<Challenge> c(n);
    std::vector<Scalar> s(n);

    // Initialization: L_pi = aG, R_pi = aH, c_{pi+1} = H(m || L || R).
    Scalar alpha = random_nonzero_scalar(rng);
    GroupPoint l = point_mul(generator_g(), alpha);
    GroupPoint r = point_mul(generator_h(), alpha);
    c[(pi + 1) % n] = hash_to_challenge(m, l, r);

    // Decoy simulation in cyclic order pi+1, ..., pi-1.
    for (std::size_t off = 1; off < n; ++off) {
        std::size_t i = (pi + off) % n;
        s[i] = random_scalar(rng);
        l = point_add(point_mul(generator_g(), s[i]), point_mul(ring[i], c[i]));
        r = point_add(point_mul(generator_h(), s[i]), point_mul(key_image, c[i]));
        c[(i + 1) % n] = hash_to_challenge(m, l, r);
    }

    // Closure: s_pi = alpha - c_pi * x (mod q).
    s[pi] = alpha - c[pi].as_scalar() * x;

    if (trace) {
        trace->alpha = alpha;
        trace->pi = pi;
    }
    return LsagSignature{c[0], std::move(s)};
}

bool verify(const Ring& ring, const GroupPoint& key_image, const Bytes32& m,
            const LsagSignature& sig, VerifyTrace* trace) {
    const std::size_t n = ring.size();
    if (sig.s.size() != n)
        throw Error(Errc::LengthMismatch,
                    "ring size " + std::to_string(n) + ", responses " + std::to_string(sig.s.size()));
    if (key_image.is_identity())
        return false;

    Challenge c = sig.c0;
    for (std::size_t i = 0; i < n; ++i) {
        GroupPoint l = point_add(point_mul(generator_g(), sig.s[i]), point_mul(ring[i], c));
        GroupPoint r = point_add(point_mul(generator_h(), sig.s[i]), point_mul(key_image, c));
        if (l.is_identity() || r.is_identity())
            return false;  // unserializable, cannot extend the hash chain
        if (trace) {
            trace->l.push_back(l);
            trace->r.push_back(r);
        }
        c = hash_to_challenge(m, l, r);
    }
    return c == sig.c0;
}

bool audit_disclosure(const Scalar& x, const GroupPoint& commitment, const GroupPoint& key_image) {
    if (x.is_zero())
        throw Error(Errc::ZeroScalar);
    return point_mul(generator_g(), x) == commitment && point_mul(generator_h(), x) == key_image;
}

}  // namespace obscura::lsag
