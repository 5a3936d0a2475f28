#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qaoalab {

/// Basis index / bit-string. Bit i holds variable (qubit) i, so qubit 0 is
/// the least significant bit of the index.
using Index = std::uint64_t;

inline constexpr int bit(Index z, int i) { return static_cast<int>((z >> i) & 1u); }

inline constexpr Index flip(Index z, int i) { return z ^ (Index{1} << i); }

inline constexpr Index dimension(int n) { return Index{1} << n; }

/// Text form of a bit-string: character i is bit i (variable 0 leftmost).
inline std::string to_bitstring(Index z, int n) {
    std::string s(static_cast<std::size_t>(n), '0');
    for (int i = 0; i < n; ++i) {
        if (bit(z, i)) s[static_cast<std::size_t>(i)] = '1';
    }
    return s;
}

inline Index parse_bitstring(std::string_view s) {
    if (s.empty() || s.size() > 63) {
        throw std::invalid_argument("bit-string must have 1..63 characters: '" + std::string(s) + "'");
    }
    Index z = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '1') {
            z |= Index{1} << i;
        } else if (s[i] != '0') {
            throw std::invalid_argument("bit-string contains non-binary character: '" + std::string(s) + "'");
        }
    }
    return z;
}

}  // namespace qaoalab
