#include "obscura/random.hpp"

#include <stdexcept>

namespace obscura {

void SystemRandomSource::fill(std::span<std::uint8_t> out) {
    std::size_t i = 0;
    while (i < out.size()) {
        unsigned int w = rd_();
        for (int j = 0; j < 4 && i < out.size(); ++j, ++i)
            out[i] = static_cast<std::uint8_t>(w >> (8 * j));
    }
}

void SeededRandomSource::fill(std::span<std::uint8_t> out) {
    std::size_t i = 0;
    while (i < out.size()) {
        std::uint64_t w = gen_();
        for (int j = 0; j < 8 && i < out.size(); ++j, ++i)
            out[i] = static_cast<std::uint8_t>(w >> (8 * j));
    }
}

Scalar random_scalar(RandomSource& rng) {
    // q is a 254-bit prime; mask to 254 bits and reject the tail above q.
    for (;;) {
        Bytes32 b{};
        rng.fill(b);
        b[0] &= 0x3f;
        U256 v = u256_from_be(b);
        if (v < Scalar::modulus())
            return Scalar::from_u256(v);
    }
}

Scalar random_nonzero_scalar(RandomSource& rng) {
    for (;;) {
        Scalar s = random_scalar(rng);
        if (!s.is_zero())
            return s;
    }
}

std::uint64_t uniform_below(RandomSource& rng, std::uint64_t bound) {
    if (bound == 0)
        throw std::invalid_argument("uniform_below: zero bound");
    if (bound == 1)
        return 0;
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
        std::uint64_t v = rng.next_u64();
        if (v < limit)
            return v % bound;
    }
}

}  // namespace obscura
