#include "obscura/proof_codec.hpp"

#include <cstring>

namespace obscura::codec {

PackedProof pack(const lsag::Ring& ring, const lsag::LsagSignature& sig) {
    const std::size_t n = ring.size();
    if (sig.s.size() != n)
        throw Error(Errc::LengthMismatch,
                    "ring size " + std::to_string(n) + ", responses " + std::to_string(sig.s.size()));
    PackedProof out;
    out.bytes.resize(packed_size(n));
    std::uint8_t* p = out.bytes.data();
    *p++ = static_cast<std::uint8_t>(n);
    for (std::size_t i = 0; i < n; ++i) {
        Bytes64 pt = serialize_point(ring[i]);
        std::memcpy(p, pt.data(), 64);
        p += 64;
    }
    Bytes32 c0 = sig.c0.to_bytes();
    std::memcpy(p, c0.data(), 32);
    p += 32;
    for (std::size_t i = 0; i < n; ++i) {
        Bytes32 sb = sig.s[i].to_bytes();
        std::memcpy(p, sb.data(), 32);
        p += 32;
    }
    return out;
}

std::pair<lsag::Ring, lsag::LsagSignature> unpack(std::span<const std::uint8_t> payload) {
    if (payload.size() < packed_size(1))
        throw Error(Errc::TruncatedPayload, std::to_string(payload.size()) + " bytes");
    // A payload whose body is not a whole number of 96-byte units is cut off;
    // a whole-unit body that disagrees with the declared n is a length mismatch.
    if ((payload.size() - 33) % 96 != 0)
        throw Error(Errc::TruncatedPayload, std::to_string(payload.size()) + " bytes");
    const std::size_t n = payload[0];
    if (n == 0 || payload.size() != packed_size(n))
        throw Error(Errc::LengthMismatch, "declared n = " + std::to_string(n) + ", payload " +
                                                  std::to_string(payload.size()) + " bytes");

    const std::uint8_t* p = payload.data() + 1;
    std::vector<GroupPoint> members;
    members.reserve(n);
    for (std::size_t i = 0; i < n; ++i, p += 64)
        members.push_back(deserialize_point({p, 64}));

    Bytes32 c0b{};
    std::memcpy(c0b.data(), p, 32);
    p += 32;
    Challenge c0 = Challenge::from_bytes(c0b);

    std::vector<Scalar> s;
    s.reserve(n);
    for (std::size_t i = 0; i < n; ++i, p += 32) {
        Bytes32 sb{};
        std::memcpy(sb.data(), p, 32);
        auto scalar = Scalar::from_bytes_checked(sb);
        if (!scalar)
            throw Error(Errc::NonCanonicalScalar, "s[" + std::to_string(i) + "] >= q");
        s.push_back(*scalar);
    }

    return {lsag::Ring(std::move(members)), lsag::LsagSignature{c0, std::move(s)}};
}

}  // namespace obscura::codec
