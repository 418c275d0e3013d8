#pragma once

#include <utility>
#include <vector>

#include "obscura/lsag.hpp"

namespace obscura::codec {

// Wire payload: [n: 1] || [P_0..P_{n-1}: 64n] || [c0: 32] || [s_0..s_{n-1}: 32n],
// all integers big-endian. Total length 96n + 33.
struct PackedProof {
    std::vector<std::uint8_t> bytes;

    std::size_t ring_size() const { return bytes.empty() ? 0 : bytes[0]; }
};

constexpr std::size_t packed_size(std::size_t n) {
    return 96 * n + 33;
}

PackedProof pack(const lsag::Ring& ring, const lsag::LsagSignature& sig);

// Strict parse: size consistency, on-curve points, masked challenge,
// canonical (sub-order) responses, ring well-formedness.
std::pair<lsag::Ring, lsag::LsagSignature> unpack(std::span<const std::uint8_t> payload);

}  // namespace obscura::codec
