#pragma once

#include <vector>

#include "obscura/curve.hpp"
#include "obscura/random.hpp"

namespace obscura::lsag {

struct KeyPair {
    Scalar x;               // secret
    GroupPoint commitment;  // P = xG
    GroupPoint key_image;   // I = xH
};

// Ordered anonymity set; rejects duplicates, identity members and rings
// larger than the one-byte wire limit.
class Ring {
public:
    explicit Ring(std::vector<GroupPoint> members);

    std::size_t size() const { return members_.size(); }
    const GroupPoint& operator[](std::size_t i) const { return members_[i]; }
    const std::vector<GroupPoint>& members() const { return members_; }

private:
    std::vector<GroupPoint> members_;
};

struct LsagSignature {
    Challenge c0;
    std::vector<Scalar> s;
};

KeyPair keygen(RandomSource& rng);

// Derives P and I from a known secret (test hook and audit path).
KeyPair keypair_from_secret(const Scalar& x);  // throws ZeroScalar

GroupPoint compute_key_image(const Scalar& x);  // throws ZeroScalar

struct SignTrace {
    Scalar alpha;
    std::size_t pi = 0;
};

struct VerifyTrace {
    std::vector<GroupPoint> l;
    std::vector<GroupPoint> r;
};

// Cyclic LSAG pass: commit at the true index, simulate decoys with random
// responses, close with s_pi = alpha - c_pi*x. The emitted c0 is the running
// challenge held at ring index 0.
LsagSignature sign(const Scalar& x, const Ring& ring, std::size_t pi, const Bytes32& m,
                   RandomSource& rng, SignTrace* trace = nullptr);

// Recomputes the challenge chain from c0 and accepts iff it closes.
bool verify(const Ring& ring, const GroupPoint& key_image, const Bytes32& m,
            const LsagSignature& sig, VerifyTrace* trace = nullptr);

// Consistent iff P = xG and I = xH.
bool audit_disclosure(const Scalar& x, const GroupPoint& commitment, const GroupPoint& key_image);

}  // namespace obscura::lsag
