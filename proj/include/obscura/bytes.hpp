#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace obscura {

using Bytes32 = std::array<std::uint8_t, 32>;
using Bytes64 = std::array<std::uint8_t, 64>;

std::string to_hex(std::span<const std::uint8_t> bytes);

// Lowercase or uppercase hex, no prefix. Empty input yields an empty vector.
std::optional<std::vector<std::uint8_t>> from_hex(std::string_view hex);

template <std::size_t N>
std::optional<std::array<std::uint8_t, N>> from_hex_fixed(std::string_view hex) {
    auto v = from_hex(hex);
    if (!v || v->size() != N)
        return std::nullopt;
    std::array<std::uint8_t, N> out{};
    std::copy(v->begin(), v->end(), out.begin());
    return out;
}

}  // namespace obscura
