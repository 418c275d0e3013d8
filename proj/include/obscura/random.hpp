#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "obscura/fields.hpp"

namespace obscura {

class RandomSource {
public:
    virtual ~RandomSource() = default;
    virtual void fill(std::span<std::uint8_t> out) = 0;

    std::uint64_t next_u64() {
        std::uint8_t b[8];
        fill(b);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v = (v << 8) | b[i];
        return v;
    }
};

// OS-entropy-backed source for production paths.
class SystemRandomSource final : public RandomSource {
public:
    void fill(std::span<std::uint8_t> out) override;

private:
    std::random_device rd_;
};

// Deterministic source for tests and scripted scenarios.
class SeededRandomSource final : public RandomSource {
public:
    explicit SeededRandomSource(std::uint64_t seed) : gen_(seed) {}
    void fill(std::span<std::uint8_t> out) override;

private:
    std::mt19937_64 gen_;
};

// Uniform in [0, q) via rejection sampling.
Scalar random_scalar(RandomSource& rng);
// Uniform in [1, q).
Scalar random_nonzero_scalar(RandomSource& rng);
// Uniform in [0, bound); bound > 0.
std::uint64_t uniform_below(RandomSource& rng, std::uint64_t bound);

}  // namespace obscura
